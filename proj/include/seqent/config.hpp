#pragma once

// Experiment configuration: JSON with every rational written as a "p/q" string.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqent/cylinder.hpp"
#include "seqent/measure.hpp"
#include "seqent/panel.hpp"
#include "seqent/rational.hpp"

namespace seqent {

struct SystemSpec {
  std::string id;
  int alphabet_size = 0;
  /// Omitted: read off from the positive transitions.
  std::optional<std::vector<std::vector<bool>>> allowed;
  std::vector<std::vector<Rational>> transition;

  MarkovMeasure build() const;
  static SystemSpec from_measure(std::string id, const MarkovMeasure& m);
};

/// {"whole": true} or {"start": s, "words": ["01", ...]}.
struct CylinderSpec {
  bool whole = false;
  std::int64_t start = 0;
  std::vector<std::string> words;

  CylinderUnion build(const Sft& sft) const;
};

/// {"periodic": "01"} or {"left": "0", "core": "1", "right": "0"}.
struct PointSpec {
  std::string left;
  std::string core;
  std::string right;
  bool periodic = false;

  PointRep build(const Sft& sft) const;
};

struct PairSpec {
  std::string label;
  PointSpec x;
  PointSpec y;
};

/// Optional classifier overrides: "eps_grid" as rational strings, "n_list" for IN windows.
struct ClassifierGrids {
  std::optional<std::vector<Rational>> eps_grid;
  std::optional<std::vector<std::int64_t>> n_list;
};

struct EntropyExperiment {
  enum class Op { profile, separation };
  Op op = Op::profile;
  /// profile: "generators" or a two-set partition {B, B^c}.
  std::optional<CylinderSpec> two_set;
  /// Explicit S, or an arithmetic progression start + step * i.
  std::vector<std::int64_t> sequence;
  std::optional<std::pair<std::int64_t, std::int64_t>> arithmetic;
  std::int64_t n_max = 12;
  /// separation
  std::optional<CylinderSpec> base;
  std::vector<std::int64_t> horizons;
  Rational eps;
};

struct IndependenceExperiment {
  CylinderSpec a1;
  CylinderSpec a2;
  /// Constant E; whole space when omitted.
  std::optional<CylinderSpec> e;
  std::vector<std::int64_t> n_list;
};

struct SensitivityExperiment {
  enum class Op { witnesses, classify };
  Op op = Op::witnesses;
  CylinderSpec a;
  CylinderSpec ux;
  CylinderSpec uy;
  Rational eps;
  std::vector<std::uint64_t> seeds;
  std::int64_t horizon = 100000;
  std::vector<PairSpec> pairs;
  std::int64_t depth = 1;
  std::int64_t cell_length = 2;
  std::vector<std::string> classifiers;
  ClassifierGrids grids;
};

struct CrosscheckExperiment {
  std::vector<std::string> systems;
  /// Empty: the canonical panel pairs of each system.
  std::vector<std::pair<std::string, std::vector<PairSpec>>> pairs;
  std::int64_t depth = 1;
  std::int64_t cell_length = 2;
  std::int64_t horizon = 100000;
  /// Random table-valued E maps added to the IN adversary family.
  std::int64_t table_e_extras = 0;
  ClassifierGrids grids;
};

struct DensityExperiment {
  enum class Op { birkhoff, diam_mean };
  Op op = Op::birkhoff;
  CylinderSpec set;
  std::vector<std::int64_t> n_list;
};

using ExperimentBody =
    std::variant<EntropyExperiment, IndependenceExperiment, SensitivityExperiment, CrosscheckExperiment, DensityExperiment>;

struct Experiment {
  std::string id;
  /// Unused by crosscheck, which names its systems itself.
  std::string system;
  std::optional<std::uint64_t> seed;
  ExperimentBody body;

  const char* kind() const noexcept;
};

struct ExperimentConfig {
  std::string name;
  std::uint64_t seed = 0;
  bool record_runtime = false;
  std::vector<SystemSpec> systems;
  std::vector<Experiment> experiments;
  std::string csv = "report.csv";
  std::string json = "report.json";

  const SystemSpec& system(const std::string& id) const;
};

/// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const ExperimentConfig& c);
nlohmann::json to_json(const SystemSpec& s);
SystemSpec parse_system(const nlohmann::json& j, const std::string& where);

}  // namespace seqent
