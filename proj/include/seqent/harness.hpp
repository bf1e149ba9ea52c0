#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqent/config.hpp"

namespace seqent {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitDegenerate = 2, kExitInconclusive = 3 };

/// One CSV line. Exact rationals appear as "p/q", reals with 12 decimals.
struct ReportRow {
  std::string experiment_id;
  std::string system_id;
  std::string operation;
  std::string inputs_digest;
  std::string outputs;
  std::string verdict;
  std::string witness_summary;
  /// Empty unless the config sets record_runtime, so reports stay reproducible.
  std::string runtime_ms;
  /// Full witness data and parameters; JSON mirror only.
  nlohmann::json detail = nlohmann::json::object();
};

inline constexpr const char* kCsvHeader =
    "experiment_id,system_id,operation,inputs_digest,outputs,verdict,witness_summary,runtime_ms";

struct RunOptions {
  std::optional<std::uint64_t> seed_override;
  unsigned threads = 1;
};

struct RunResult {
  std::vector<ReportRow> rows;
  int exit_code = kExitOk;
  std::vector<std::string> errors;
};

/// Reals at fixed 12-decimal precision.
std::string format_real(double v);

/// Runs every experiment; rows come back sorted by (experiment, system, operation).
RunResult run_config(const ExperimentConfig& config, const RunOptions& options);

std::string csv_text(const std::vector<ReportRow>& rows);
std::string json_text(const ExperimentConfig& config, const RunResult& result);

/// Writes the CSV and the JSON mirror named in the config under out_dir.
void write_reports(const ExperimentConfig& config, const RunResult& result, const std::filesystem::path& out_dir);

/// The acceptance panel as config-ready system specs.
std::vector<SystemSpec> panel_specs();

}  // namespace seqent
