// seqent: run experiment configs, list the acceptance panel, run the acceptance suite.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "seqent/acceptance.hpp"
#include "seqent/config.hpp"
#include "seqent/error.hpp"
#include "seqent/harness.hpp"
#include "seqent/kernels.hpp"
#include "seqent/panel.hpp"

#ifndef SEQENT_CONFIG_DIR
#define SEQENT_CONFIG_DIR "configs"
#endif

namespace {

int run(const std::string& path, const std::string& out_dir, const std::optional<std::uint64_t>& seed,
        unsigned threads) {
  seqent::ExperimentConfig cfg;
  try {
    cfg = seqent::load_config(path);
  } catch (const seqent::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return seqent::kExitConfig;
  }
  seqent::RunOptions opt;
  opt.seed_override = seed;
  opt.threads = threads;
  const seqent::RunResult res = seqent::run_config(cfg, opt);
  for (const auto& e : res.errors) std::cerr << "error: " << e << "\n";
  if (res.exit_code == seqent::kExitConfig) return res.exit_code;
  seqent::write_reports(cfg, res, out_dir);
  std::cout << "wrote " << res.rows.size() << " rows to " << (std::filesystem::path(out_dir) / cfg.csv).string()
            << " and " << cfg.json << " (exit " << res.exit_code << ")\n";
  return res.exit_code;
}

int list_panel() {
  const auto panel = seqent::acceptance_panel();
  for (std::size_t i = 0; i < panel.size(); ++i) {
    const auto& sys = panel[i];
    std::cout << sys.id << ": " << sys.description << "\n  pi = (";
    const auto& pi = sys.measure.stationary();
    for (std::size_t k = 0; k < pi.size(); ++k) std::cout << (k ? ", " : "") << seqent::to_fraction_string(pi[k]);
    std::cout << ")\n  config: " << seqent::to_json(seqent::panel_specs()[i]).dump() << "\n  pairs:";
    for (const auto& p : sys.pairs) std::cout << " " << p.label;
    std::cout << "\n";
  }
  return 0;
}

int selfcheck(const std::string& config_dir) {
  std::cout << "kernels: " << seqent::kernels::isa_name(seqent::kernels::active()) << "\n";
  seqent::AcceptanceSuite suite(config_dir);
  int failed = 0;
  for (int id = 1; id <= seqent::AcceptanceSuite::kCriteria; ++id) {
    const auto r = suite.run(id);
    std::cout << r.line() << std::endl;
    failed += !r.pass;
  }
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << "\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequence entropy and sensitivity experiments on Markov subshifts"};
  app.require_subcommand(1);
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  app.add_option("--out-dir", out_dir, "Directory for report files");
  app.add_option("--seed-override", seed, "Replace every experiment seed");
  app.add_option("--threads", threads, "Experiments run concurrently")->check(CLI::Range(1U, 256U));

  std::string config;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment config");
  run_cmd->add_option("config", config, "Config file")->required();
  auto* list_cmd = app.add_subcommand("list-panel", "List the acceptance panel");
  std::string config_dir = SEQENT_CONFIG_DIR;
  auto* check_cmd = app.add_subcommand("selfcheck", "Run the acceptance suite");
  check_cmd->add_option("--config-dir", config_dir, "Directory holding acceptance.json");
  app.fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : seqent::kExitConfig;
  }
  try {
    if (*run_cmd) return run(config, out_dir, seed, threads);
    if (*list_cmd) return list_panel();
    if (*check_cmd) return selfcheck(config_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return seqent::kExitConfig;
  }
  return 0;
}
