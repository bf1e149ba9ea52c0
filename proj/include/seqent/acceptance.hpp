#pragma once

// The ten acceptance criteria, shared by the acceptance test binary and `selfcheck`.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace seqent {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;

  /// "PASS criterion 3 (name): detail [1.2 s]".
  std::string line() const;
};

class AcceptanceSuite {
 public:
  /// config_dir holds acceptance.json for the determinism criterion.
  explicit AcceptanceSuite(std::filesystem::path config_dir);
  ~AcceptanceSuite();
  AcceptanceSuite(const AcceptanceSuite&) = delete;
  AcceptanceSuite& operator=(const AcceptanceSuite&) = delete;

  static constexpr int kCriteria = 10;

  /// Criteria 6, 7 and 9 share one crosscheck run, computed on first use.
  CriterionResult run(int id);
  std::vector<CriterionResult> run_all();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace seqent
