#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "seqent/config.hpp"
#include "seqent/error.hpp"
#include "seqent/harness.hpp"

using namespace seqent;
using nlohmann::json;

namespace {

const std::filesystem::path kConfigDir = SEQENT_CONFIG_DIR;

json bernoulli_system() {
  return json::parse(R"({"id": "b", "alphabet_size": 2, "transition": [["1/2", "1/2"], ["1/2", "1/2"]]})");
}

json golden_system() {
  return json::parse(
      R"({"id": "g", "alphabet_size": 2, "allowed": [[1, 1], [1, 0]], "transition": [["1/2", "1/2"], ["1", "0"]]})");
}

json config_with(json systems, json experiments) {
  return {{"name", "t"}, {"seed", 3}, {"systems", std::move(systems)}, {"experiments", std::move(experiments)}};
}

json ok_experiment() {
  return json::parse(R"({"id": "ok", "kind": "independence", "system": "g", "a1": {"start": 0, "words": ["0"]},
                         "a2": {"start": 0, "words": ["1"]}, "n_list": [4]})");
}

json degenerate_experiment() {
  return json::parse(R"({"id": "deg", "kind": "density", "system": "g", "op": "diam_mean",
                         "set": {"start": 0, "words": ["11"]}, "n_list": [10]})");
}

json inconclusive_experiment() {
  return json::parse(R"({"id": "inc", "kind": "sensitivity", "system": "b", "op": "witnesses", "a": {"whole": true},
                         "ux": {"start": 0, "words": ["000000"]}, "uy": {"start": 0, "words": ["111111"]},
                         "eps": "1/10000", "seeds": [1], "horizon": 10})");
}

/// "k1=v1;k2=v2" into a map.
std::map<std::string, std::string> fields(const std::string& outputs) {
  std::map<std::string, std::string> out;
  std::stringstream ss(outputs);
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto eq = item.find('=');
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

std::string expect_config_error(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ConfigError";
  return {};
}

}  // namespace

TEST(Config, BundledConfigsRoundTrip) {
  std::size_t seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kConfigDir)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    const ExperimentConfig c = load_config(entry.path());
    const json once = to_json(c);
    EXPECT_EQ(to_json(parse_config(once)), once) << entry.path();
  }
  EXPECT_GE(seen, 3U);
}

TEST(Config, PanelSpecsRoundTrip) {
  for (const auto& spec : panel_specs()) {
    const SystemSpec back = parse_system(to_json(spec), "panel");
    EXPECT_EQ(to_json(back), to_json(spec));
    EXPECT_EQ(back.build().stationary(), spec.build().stationary()) << spec.id;
  }
}

TEST(Config, GoldenMeanStationaryIsTwoThirdsOneThird) {
  const auto specs = panel_specs();
  const auto it = std::find_if(specs.begin(), specs.end(), [](const SystemSpec& s) { return s.id == "golden_mean"; });
  ASSERT_NE(it, specs.end());
  const auto pi = it->build().stationary();
  ASSERT_EQ(pi.size(), 2U);
  EXPECT_EQ(pi[0], Rational(2, 3));
  EXPECT_EQ(pi[1], Rational(1, 3));
}

TEST(Config, ZeroDenominatorNamesTheField) {
  json sys = golden_system();
  sys["transition"][0][1] = "1/0";
  const std::string msg = expect_config_error(config_with({sys}, {ok_experiment()}));
  EXPECT_NE(msg.find("systems[0].transition[0][1]"), std::string::npos) << msg;
}

TEST(Config, RejectsEmptyExperimentList) {
  EXPECT_THROW(parse_config(config_with({golden_system()}, json::array())), ConfigError);
}

TEST(Config, RejectsUnknownKeysAndBadLetters) {
  json sys = golden_system();
  sys["colour"] = "red";
  EXPECT_NE(expect_config_error(config_with({sys}, {ok_experiment()})).find("colour"), std::string::npos);

  json exp = degenerate_experiment();
  exp["system"] = "b";
  exp["set"]["words"] = {"2"};
  EXPECT_NE(expect_config_error(config_with({bernoulli_system()}, {exp})).find("experiments[0]"), std::string::npos);
}

TEST(Config, RejectsStochasticityViolations) {
  json sys = golden_system();
  sys["transition"][0][0] = "2/3";
  EXPECT_THROW(parse_config(config_with({sys}, {ok_experiment()})), ConfigError);
  EXPECT_NO_THROW(parse_config(config_with({golden_system()}, {ok_experiment()})));
}

TEST(Config, RejectsUnknownSystemReference) {
  json exp = degenerate_experiment();
  exp["system"] = "nowhere";
  EXPECT_NE(expect_config_error(config_with({golden_system()}, {exp})).find("nowhere"), std::string::npos);
}

TEST(Harness, FormatReal) {
  EXPECT_EQ(format_real(0.5), "0.500000000000");
  EXPECT_EQ(format_real(std::log(2.0)), "0.693147180560");
}

TEST(Harness, BernoulliEntropyConfigGivesLogTwo) {
  const ExperimentConfig c = load_config(kConfigDir / "bernoulli_entropy.json");
  const RunResult r = run_config(c, {});
  EXPECT_EQ(r.exit_code, kExitOk);
  std::size_t rows = 0;
  for (const auto& row : r.rows) {
    if (row.operation.rfind("entropy_profile", 0) != 0) continue;
    ++rows;
    const auto f = fields(row.outputs);
    EXPECT_NEAR(std::stod(f.at("h_per_n")), std::log(2.0), 1e-11) << row.operation;
  }
  EXPECT_EQ(rows, 24U);
}

TEST(Harness, GoldenMeanIndependenceRatio) {
  const ExperimentConfig c = load_config(kConfigDir / "goldenmean_independence.json");
  const RunResult r = run_config(c, {});
  EXPECT_EQ(r.exit_code, kExitOk);
  ASSERT_FALSE(r.rows.empty());
  for (const auto& row : r.rows) {
    const long n = std::stol(row.operation.substr(row.operation.find('=') + 1));
    Rational expected((n + 1) / 2, n);
    expected.canonicalize();
    EXPECT_EQ(fields(row.outputs).at("ratio"), to_fraction_string(expected)) << row.operation;
  }
}

TEST(Harness, ExitCodes) {
  const json systems = {bernoulli_system(), golden_system()};
  EXPECT_EQ(run_config(parse_config(config_with(systems, {ok_experiment()})), {}).exit_code, kExitOk);

  const RunResult deg = run_config(parse_config(config_with(systems, {degenerate_experiment()})), {});
  EXPECT_EQ(deg.exit_code, kExitDegenerate);
  ASSERT_EQ(deg.rows.size(), 1U);
  EXPECT_EQ(deg.rows[0].verdict, "degenerate");

  const RunResult inc = run_config(parse_config(config_with(systems, {inconclusive_experiment()})), {});
  EXPECT_EQ(inc.exit_code, kExitInconclusive);

  const RunResult both =
      run_config(parse_config(config_with(systems, {inconclusive_experiment(), degenerate_experiment()})), {});
  EXPECT_EQ(both.exit_code, kExitDegenerate);
}

TEST(Harness, CsvHeaderAndLineEndings) {
  const ExperimentConfig c = load_config(kConfigDir / "acceptance.json");
  const RunResult r = run_config(c, {});
  const std::string csv = csv_text(r.rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kCsvHeader);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  EXPECT_EQ(csv.back(), '\n');
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), r.rows.size() + 1);
}

TEST(Harness, CsvQuotesCommasAndQuotes) {
  ReportRow row;
  row.experiment_id = "e";
  row.witness_summary = "a, \"b\"";
  const std::string csv = csv_text({row});
  EXPECT_NE(csv.find("\"a, \"\"b\"\"\""), std::string::npos) << csv;
}

TEST(Harness, RowsAreSorted) {
  const RunResult r = run_config(load_config(kConfigDir / "acceptance.json"), {});
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    const auto& a = r.rows[i - 1];
    const auto& b = r.rows[i];
    EXPECT_LE(std::tie(a.experiment_id, a.system_id, a.operation), std::tie(b.experiment_id, b.system_id, b.operation));
  }
}

TEST(Harness, DeterministicAcrossThreadCounts) {
  const ExperimentConfig c = load_config(kConfigDir / "acceptance.json");
  const std::string one = csv_text(run_config(c, {std::nullopt, 1}).rows);
  EXPECT_EQ(csv_text(run_config(c, {std::nullopt, 1}).rows), one);
  EXPECT_EQ(csv_text(run_config(c, {std::nullopt, 3}).rows), one);
}

TEST(Harness, SeedOverrideChangesDigests) {
  const ExperimentConfig c = parse_config(config_with({bernoulli_system(), golden_system()}, {inconclusive_experiment()}));
  const RunResult a = run_config(c, {});
  const RunResult b = run_config(c, {std::uint64_t{99}, 1});
  ASSERT_EQ(a.rows.size(), b.rows.size());
  EXPECT_NE(a.rows[0].inputs_digest, b.rows[0].inputs_digest);
  EXPECT_EQ(run_config(c, {std::uint64_t{99}, 1}).rows[0].inputs_digest, b.rows[0].inputs_digest);
}

TEST(Harness, RuntimeOnlyWhenRequested) {
  ExperimentConfig c = load_config(kConfigDir / "goldenmean_independence.json");
  for (const auto& row : run_config(c, {}).rows) EXPECT_TRUE(row.runtime_ms.empty());
  c.record_runtime = true;
  for (const auto& row : run_config(c, {}).rows) EXPECT_FALSE(row.runtime_ms.empty());
}

TEST(Harness, WriteReportsMatchesCsvText) {
  const ExperimentConfig c = load_config(kConfigDir / "goldenmean_independence.json");
  const RunResult r = run_config(c, {});
  const auto dir = std::filesystem::temp_directory_path() / "seqent_harness_test";
  std::filesystem::remove_all(dir);
  write_reports(c, r, dir);
  std::ifstream in(dir / c.csv, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(bytes, csv_text(r.rows));
  std::ifstream js(dir / c.json);
  const json mirror = json::parse(js);
  EXPECT_TRUE(mirror.is_object());
  std::filesystem::remove_all(dir);
}

TEST(Harness, ClassifierGridOverridesApply) {
  const json cycle = json::parse(R"({"id": "c", "alphabet_size": 4,
      "transition": [["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"], ["1", "0", "0", "0"]]})");
  json exp = json::parse(R"({"id": "cls", "kind": "sensitivity", "system": "c", "op": "classify",
      "pairs": [{"label": "p", "x": {"periodic": "0123"}, "y": {"periodic": "1230"}}],
      "depth": 1, "cell_length": 2, "classifiers": ["in"]})");
  const RunResult plain = run_config(parse_config(config_with({cycle}, {exp})), {});
  ASSERT_EQ(plain.rows.size(), 1U);
  EXPECT_EQ(plain.rows[0].verdict, "negative");

  // Windows up to 12 leave a 1/12 ratio, above the 0.05 floor.
  exp["n_list"] = {6, 12};
  exp["eps_grid"] = {"1/2", "1/5"};
  const ExperimentConfig c = parse_config(config_with({cycle}, {exp}));
  EXPECT_EQ(to_json(parse_config(to_json(c))), to_json(c));
  const RunResult shallow = run_config(c, {});
  ASSERT_EQ(shallow.rows.size(), 1U);
  EXPECT_EQ(shallow.rows[0].verdict, "positive");
  EXPECT_EQ(fields(shallow.rows[0].outputs).at("eps_certified"), "0.500000000000");

  exp["eps_grid"] = {"1/2", "1"};
  EXPECT_NE(expect_config_error(config_with({cycle}, {exp})).find("eps_grid[1]"), std::string::npos);
}
