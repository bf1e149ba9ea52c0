#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "seqent/cylinder.hpp"
#include "seqent/measure.hpp"
#include "seqent/point.hpp"
#include "seqent/verdict.hpp"

namespace seqent {

struct ConstantE {
  CylinderUnion set;
};

struct TableE {
  CylinderUnion default_set;
  std::map<std::int64_t, CylinderUnion> overrides;
};

/// E : Z -> Borel sets. E(s) enters independence checks unshifted.
class EMap {
 public:
  static EMap constant(CylinderUnion set) { return EMap(ConstantE{std::move(set)}); }
  static EMap table(CylinderUnion default_set, std::map<std::int64_t, CylinderUnion> overrides) {
    return EMap(TableE{std::move(default_set), std::move(overrides)});
  }
  /// E == X.
  static EMap whole() { return constant(CylinderUnion::whole()); }

  const CylinderUnion& at(std::int64_t s) const;
  /// The intersection of E(s) over s in i_set (X for an empty set).
  CylinderUnion combined(std::span<const std::int64_t> i_set, const Sft& sft) const;
  /// Smallest measure among all sets the map can return.
  Rational min_measure(const MarkovMeasure& m) const;
  /// Every referenced set has measure >= 1 - eps, compared exactly.
  bool valid_for(const MarkovMeasure& m, double eps) const;

  bool is_constant() const noexcept { return std::holds_alternative<ConstantE>(rep_); }
  const std::variant<ConstantE, TableE>& rep() const noexcept { return rep_; }
  std::string describe() const;

 private:
  explicit EMap(std::variant<ConstantE, TableE> rep) : rep_(std::move(rep)) {}
  std::variant<ConstantE, TableE> rep_;
};

inline constexpr std::size_t kDefaultSigmaCap = 20;
inline constexpr std::size_t kExhaustiveWindowCap = 24;

/// For every sigma : I -> {1, 2}, the intersection over s in I of E(s) and T^{-s} A_sigma(s) is nonempty.
/// Throws CapExceeded when |I| > sigma_cap.
bool is_independence_set(const Sft& sft, const CylinderUnion& a1, const CylinderUnion& a2,
                         std::span<const std::int64_t> i_set, const EMap& e, std::size_t sigma_cap = kDefaultSigmaCap);

struct IndependenceReport {
  std::vector<std::int64_t> window;
  std::vector<std::int64_t> best_i;
  Rational ratio;
  std::string e_map;
  bool exhaustive = true;
};

/// Largest independence set inside the window, lexicographically smallest among ties.
/// Exhaustive branch and bound up to `exhaustive_cap` elements, greedy beyond.
IndependenceReport max_independence_subset(const Sft& sft, const CylinderUnion& a1, const CylinderUnion& a2,
                                           std::span<const std::int64_t> window, const EMap& e,
                                           std::size_t exhaustive_cap = kExhaustiveWindowCap);

/// Per N, the report with the smallest ratio over the family on F = {0, ..., N-1}; first wins ties.
std::vector<IndependenceReport> independence_density_profile(const Sft& sft, const MarkovMeasure& m,
                                                             const CylinderUnion& a1, const CylinderUnion& a2,
                                                             std::span<const std::int64_t> n_list,
                                                             std::span<const EMap> e_family);

/// The constant map E = (T^{-s} ux cap T^{-t} uy)^c.
EMap bad_constant_e(const MarkovMeasure& m, std::int64_t s, std::int64_t t, const CylinderUnion& ux,
                    const CylinderUnion& uy);

/// The centered cylinder [x_{-d} ... x_d]_{-d}.
CylinderUnion neighbourhood(const Sft& sft, const PointRep& x, std::int64_t depth);

/// Seeded TableE maps: each default and up to three overrides at shifts in [0, window)
/// remove one admissible cylinder of length 6, of measure <= 1/64 when one is found.
std::vector<EMap> random_table_maps(const MarkovMeasure& m, std::size_t count, std::uint64_t seed,
                                    std::int64_t window = 24);

struct InParams {
  std::vector<double> eps_grid = default_eps_grid();
  std::vector<std::int64_t> n_list{6, 12, 18, 24};
  double c_min = 0.05;
  /// Constant adversaries bad_constant_e(s, t) for 0 <= s, t <= ra_bound with s != t.
  std::int64_t ra_bound = 6;
  std::vector<EMap> extras;
};

/// IN pair test over the neighbourhood levels 0..depth. A level passes at eps when every
/// map of the family valid at eps keeps the ratio at or above c_min for every N; ratios at
/// or above c_min are certified by explicit sets, lower ones by exhaustive search.
/// Throws InvalidArgument when x and y agree on [-depth, depth].
Verdict classify_in_pair(const Sft& sft, const MarkovMeasure& m, const PointRep& x, const PointRep& y,
                         std::int64_t depth, const InParams& params);

}  // namespace seqent
