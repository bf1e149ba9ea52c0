#include "seqent/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "seqent/entropy.hpp"
#include "seqent/error.hpp"
#include "seqent/folner.hpp"
#include "seqent/independence.hpp"
#include "seqent/seeding.hpp"
#include "seqent/sensitivity.hpp"

namespace seqent {

using nlohmann::json;

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// FNV-1a over the canonical JSON text.
std::string digest(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return hex64(h);
}

std::string padded(std::int64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06lld", static_cast<long long>(v));
  return buf;
}

std::string join_ints(const std::vector<std::int64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + std::to_string(v[i]);
  return out;
}

json witness_json(const Witness& w) {
  json j{{"label", w.label}, {"points", w.points}, {"shifts", w.shifts}, {"density", format_real(w.density)}};
  if (w.target) j["target"] = to_fraction_string(*w.target);
  return j;
}

json verdict_json(const Verdict& v) {
  json ws = json::array();
  for (const auto& w : v.witnesses) ws.push_back(witness_json(w));
  return {{"classification", to_string(v.classification)},
          {"eps_certified", format_real(v.eps_certified)},
          {"params", v.params},
          {"note", v.note},
          {"witnesses", ws}};
}

std::string witness_summary(const Verdict& v) {
  if (v.witnesses.empty()) return v.note;
  const Witness& w = v.witnesses.front();
  std::string s = w.label;
  if (v.witnesses.size() > 1) s += " (+" + std::to_string(v.witnesses.size() - 1) + " more)";
  return s;
}

/// Everything one experiment contributes to the report.
struct Outcome {
  std::vector<ReportRow> rows;
  int exit_code = kExitOk;
  std::vector<std::string> errors;
};

class Runner {
 public:
  Runner(const ExperimentConfig& config, const Experiment& x, std::size_t index, std::uint64_t seed)
      : config_(config), x_(x), index_(index), seed_(seed) {
    json inputs{{"experiment", to_json(config).at("experiments").at(index)}, {"seed", seed}};
    if (!x.system.empty()) inputs["system"] = to_json(config.system(x.system));
    digest_ = digest(inputs.dump());
  }

  Outcome run() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const std::string where = "experiments[" + std::to_string(index_) + "] (" + x_.id + ")";
    try {
      std::visit([&](const auto& body) { run_body(body, out); }, x_.body);
    } catch (const ConfigError& e) {
      out.exit_code = kExitConfig;
      out.errors.push_back(where + ": " + e.what());
    } catch (const InvalidArgument& e) {
      out.exit_code = kExitConfig;
      out.errors.push_back(where + ": " + e.what());
    } catch (const Degenerate& e) {
      out.exit_code = kExitDegenerate;
      out.errors.push_back(where + ": " + e.what());
      out.rows.push_back(row(x_.system, "error", "", "degenerate", e.what()));
    } catch (const CapExceeded& e) {
      out.rows.push_back(row(x_.system, "error", "", "inconclusive", e.what()));
    } catch (const WindowExceeded& e) {
      out.rows.push_back(row(x_.system, "error", "", "inconclusive", e.what()));
    }
    if (config_.record_runtime) {
      const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      for (auto& r : out.rows) r.runtime_ms = format_real(ms);
    }
    if (out.exit_code == kExitOk) {
      for (const auto& r : out.rows) {
        if (r.verdict == "inconclusive") out.exit_code = kExitInconclusive;
      }
    }
    return out;
  }

 private:
  ReportRow row(std::string system, std::string op, std::string outputs, std::string verdict, std::string summary) const {
    ReportRow r;
    r.experiment_id = x_.id;
    r.system_id = std::move(system);
    r.operation = std::move(op);
    r.inputs_digest = digest_;
    r.outputs = std::move(outputs);
    r.verdict = std::move(verdict);
    r.witness_summary = std::move(summary);
    return r;
  }

  void run_body(const EntropyExperiment& e, Outcome& out) {
    const MarkovMeasure m = config_.system(x_.system).build();
    if (e.op == EntropyExperiment::Op::separation) {
      const CylinderUnion base = e.base->build(m.sft());
      for (auto h : e.horizons) {
        const auto count = separation_count(m, base, h, to_double(e.eps));
        out.rows.push_back(row(x_.system, "separation horizon=" + padded(h),
                               "count=" + std::to_string(count) + ";eps=" + to_fraction_string(e.eps), "-", ""));
      }
      return;
    }
    const Partition p = e.two_set ? Partition::two_set(m, e.two_set->build(m.sft())) : Partition::generators(m);
    SequenceS s = e.sequence;
    if (e.arithmetic) {
      s.clear();
      for (std::int64_t i = 0; i < e.n_max; ++i) s.push_back(e.arithmetic->first + e.arithmetic->second * i);
    }
    s.resize(static_cast<std::size_t>(e.n_max));
    const EntropyProfile prof = sequence_entropy_profile(m, p, s);
    for (const auto& r : prof.rows) {
      ReportRow rr = row(x_.system, "entropy_profile n=" + padded(r.n),
                         "h=" + format_real(r.h) + ";h_per_n=" + format_real(r.h_per_n), "-",
                         "s_n=" + std::to_string(s[static_cast<std::size_t>(r.n - 1)]));
      rr.detail = {{"partition_atoms", p.size()}, {"exact_measures", prof.exact_measures}};
      out.rows.push_back(std::move(rr));
    }
  }

  void run_body(const IndependenceExperiment& e, Outcome& out) {
    const MarkovMeasure m = config_.system(x_.system).build();
    const Sft& sft = m.sft();
    const CylinderUnion a1 = e.a1.build(sft), a2 = e.a2.build(sft);
    const EMap emap = e.e ? EMap::constant(e.e->build(sft)) : EMap::whole();
    for (auto n : e.n_list) {
      std::vector<std::int64_t> f(static_cast<std::size_t>(n));
      for (std::int64_t i = 0; i < n; ++i) f[static_cast<std::size_t>(i)] = i;
      const IndependenceReport r = max_independence_subset(sft, a1, a2, f, emap);
      ReportRow rr = row(x_.system, "max_independence N=" + padded(n),
                         "size=" + std::to_string(r.best_i.size()) + ";ratio=" + to_fraction_string(r.ratio),
                         r.exhaustive ? "-" : "inconclusive", "I={" + join_ints(r.best_i) + "}");
      rr.detail = {{"best_i", r.best_i}, {"e_map", r.e_map}, {"exhaustive", r.exhaustive}};
      out.rows.push_back(std::move(rr));
    }
  }

  /// Config grids override the eps grid of all three classifiers and the IN window list.
  static void apply_grids(const ClassifierGrids& g, InParams& in, WitnessParams& ms, DiamParams& diam) {
    if (g.eps_grid) {
      std::vector<double> grid;
      for (const auto& r : *g.eps_grid) grid.push_back(to_double(r));
      in.eps_grid = ms.search.eps_grid = diam.eps_grid = grid;
    }
    if (g.n_list) in.n_list = *g.n_list;
  }

  void run_body(const SensitivityExperiment& e, Outcome& out) {
    const MarkovMeasure m = config_.system(x_.system).build();
    const Sft& sft = m.sft();
    WitnessParams wp;
    wp.search.horizon = e.horizon;
    wp.search.seed = seed_;
    if (e.op == SensitivityExperiment::Op::witnesses) {
      const CylinderUnion a = e.a.build(sft), ux = e.ux.build(sft), uy = e.uy.build(sft);
      for (auto s : e.seeds) {
        const Verdict v = find_sensitivity_witnesses(sft, m, a, ux, uy, to_double(e.eps), derive_seed(seed_, {s}), wp);
        std::string outputs = "eps=" + to_fraction_string(e.eps);
        if (!v.witnesses.empty()) {
          const Witness& w = v.witnesses.front();
          outputs += ";s=" + std::to_string(w.shifts[0]) + ";t=" + std::to_string(w.shifts[1]) +
                     ";density=" + format_real(w.density) + ";target=" + to_fraction_string(*w.target);
        }
        ReportRow rr = row(x_.system, "witnesses seed=" + padded(static_cast<std::int64_t>(s)), outputs,
                           to_string(v.classification), witness_summary(v));
        rr.detail = verdict_json(v);
        out.rows.push_back(std::move(rr));
      }
      return;
    }
    InParams ip;
    DiamParams dp;
    apply_grids(e.grids, ip, wp, dp);
    const auto cells = cylinder_cells(m, static_cast<std::size_t>(e.cell_length));
    for (const auto& pair : e.pairs) {
      const PointRep x = pair.x.build(sft), y = pair.y.build(sft);
      for (const auto& c : e.classifiers) {
        Verdict v;
        if (c == "in") {
          v = classify_in_pair(sft, m, x, y, e.depth, ip);
        } else if (c == "ms") {
          v = classify_ms_pair(sft, m, x, y, e.depth, cells, wp);
        } else {
          v = classify_diam_pair(sft, m, x, y, e.depth, cells, dp);
        }
        ReportRow rr = row(x_.system, "classify_" + c + " pair=" + pair.label,
                           "eps_certified=" + format_real(v.eps_certified), to_string(v.classification),
                           witness_summary(v));
        rr.detail = verdict_json(v);
        out.rows.push_back(std::move(rr));
      }
    }
  }

  void run_body(const CrosscheckExperiment& e, Outcome& out) {
    std::vector<PanelSystem> panel;
    const auto canonical = acceptance_panel();
    for (const auto& id : e.systems) {
      const MarkovMeasure m = config_.system(id).build();
      std::vector<PointPair> pairs;
      if (e.pairs.empty()) {
        const auto it = std::find_if(canonical.begin(), canonical.end(), [&](const PanelSystem& s) { return s.id == id; });
        if (it == canonical.end()) throw ConfigError("pairs: \"panel\" needs a panel system id, got \"" + id + "\"");
        if (!(it->measure.sft() == m.sft())) throw ConfigError("pairs: system \"" + id + "\" differs from the panel system");
        pairs = it->pairs;
      } else {
        for (const auto& [sid, list] : e.pairs) {
          if (sid != id) continue;
          for (const auto& p : list) pairs.push_back({p.label, p.x.build(m.sft()), p.y.build(m.sft())});
        }
      }
      panel.push_back({id, "", m, std::move(pairs)});
    }
    CrosscheckConfig cfg;
    cfg.depth = e.depth;
    cfg.cell_length = static_cast<std::size_t>(e.cell_length);
    cfg.ms.search.horizon = e.horizon;
    cfg.ms.search.seed = seed_;
    apply_grids(e.grids, cfg.in, cfg.ms, cfg.diam);
    CrosscheckReport report;
    if (e.table_e_extras == 0) {
      report = equivalence_crosscheck(panel, cfg);
    } else {
      // Extras are drawn per system, so each run of the panel uses its own maps.
      for (std::size_t i = 0; i < panel.size(); ++i) {
        CrosscheckConfig local = cfg;
        local.in.extras = random_table_maps(panel[i].measure, static_cast<std::size_t>(e.table_e_extras),
                                            derive_seed(seed_, {i}));
        const CrosscheckReport part = equivalence_crosscheck({panel[i]}, local);
        report.rows.insert(report.rows.end(), part.rows.begin(), part.rows.end());
        report.systems.insert(report.systems.end(), part.systems.begin(), part.systems.end());
      }
    }
    for (const auto& r : report.rows) {
      const std::string outputs = std::string("in=") + to_string(r.in.classification) +
                                  ";ms=" + to_string(r.ms.classification) + ";diam=" + to_string(r.diam.classification) +
                                  ";kushnirenko=" + (r.kushnirenko ? "positive" : "negative") +
                                  ";count_half=" + std::to_string(r.count_half) +
                                  ";count_full=" + std::to_string(r.count_full) + ";agree=" + (r.agree() ? "1" : "0");
      std::string verdict = to_string(r.in.classification);
      for (const Verdict* v : {&r.ms, &r.diam}) {
        if (v->classification == Classification::inconclusive) verdict = "inconclusive";
      }
      ReportRow rr = row(r.system, "crosscheck pair=" + r.pair, outputs, verdict,
                         r.agree() ? witness_summary(r.ms) : "DISAGREE");
      rr.detail = {{"in", verdict_json(r.in)}, {"ms", verdict_json(r.ms)}, {"diam", verdict_json(r.diam)}};
      out.rows.push_back(std::move(rr));
    }
    for (const auto& s : report.systems) {
      out.rows.push_back(row(s.system, "crosscheck system_diam_mean",
                             "eps_certified=" + format_real(s.eps_certified) +
                                 ";system_positive=" + (s.system_positive ? "1" : "0") +
                                 ";some_pair_positive=" + (s.some_pair_positive ? "1" : "0") +
                                 ";agree=" + (s.agree() ? "1" : "0"),
                             s.system_positive ? "positive" : "negative", ""));
    }
  }

  void run_body(const DensityExperiment& e, Outcome& out) {
    const MarkovMeasure m = config_.system(x_.system).build();
    const Sft& sft = m.sft();
    const CylinderUnion set = e.set.build(sft);
    const auto windows = FolnerWindows::canonical();
    if (e.op == DensityExperiment::Op::diam_mean) {
      for (auto n : e.n_list) {
        const DiamMeanEstimate d = diam_mean_profile(sft, m, set, windows, n);
        std::string outputs = "tail_max=" + format_real(d.tail_max);
        if (d.exact) outputs += ";exact=" + to_fraction_string(d.exact_value);
        out.rows.push_back(row(x_.system, "diam_mean n_max=" + padded(n), outputs, "-", ""));
      }
      return;
    }
    const std::int64_t n_max = *std::max_element(e.n_list.begin(), e.n_list.end());
    const PointRep p = sample_point(m, std::min<std::int64_t>(0, set.lo()),
                                    n_max + std::max<std::int64_t>(0, set.hi()) + 1, seed_);
    const Rational target = measure_of(m, normalize(set, sft));
    for (auto n : e.n_list) {
      const Rational avg = birkhoff_average(p, set, windows, n);
      out.rows.push_back(row(x_.system, "birkhoff n=" + padded(n),
                             "average=" + to_fraction_string(avg) + ";average_real=" + format_real(to_double(avg)) +
                                 ";target=" + to_fraction_string(target),
                             "-", ""));
    }
  }

  const ExperimentConfig& config_;
  const Experiment& x_;
  std::size_t index_;
  std::uint64_t seed_;
  std::string digest_;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

int worse(int a, int b) {
  // Config errors dominate, then degenerate experiments, then inconclusive verdicts.
  auto rank = [](int c) { return c == kExitConfig ? 3 : c == kExitDegenerate ? 2 : c == kExitInconclusive ? 1 : 0; };
  return rank(a) >= rank(b) ? a : b;
}

}  // namespace

std::string format_real(double v) {
  if (v == 0.0) v = 0.0;  // no negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  return buf;
}

RunResult run_config(const ExperimentConfig& config, const RunOptions& options) {
  const std::size_t n = config.experiments.size();
  std::vector<Outcome> outcomes(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const Experiment& x = config.experiments[i];
      const std::uint64_t seed = options.seed_override ? *options.seed_override : x.seed.value_or(config.seed);
      outcomes[i] = Runner(config, x, i, seed).run();
    }
  };
  const unsigned threads = std::max(1U, std::min<unsigned>(options.threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  RunResult result;
  for (auto& o : outcomes) {
    result.exit_code = worse(result.exit_code, o.exit_code);
    for (auto& r : o.rows) result.rows.push_back(std::move(r));
    for (auto& e : o.errors) result.errors.push_back(std::move(e));
  }
  std::stable_sort(result.rows.begin(), result.rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.experiment_id, a.system_id, a.operation) < std::tie(b.experiment_id, b.system_id, b.operation);
  });
  return result;
}

std::string csv_text(const std::vector<ReportRow>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) {
    out += csv_field(r.experiment_id) + "," + csv_field(r.system_id) + "," + csv_field(r.operation) + "," +
           csv_field(r.inputs_digest) + "," + csv_field(r.outputs) + "," + csv_field(r.verdict) + "," +
           csv_field(r.witness_summary) + "," + csv_field(r.runtime_ms) + "\n";
  }
  return out;
}

std::string json_text(const ExperimentConfig& config, const RunResult& result) {
  json rows = json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"experiment_id", r.experiment_id},
                    {"system_id", r.system_id},
                    {"operation", r.operation},
                    {"inputs_digest", r.inputs_digest},
                    {"outputs", r.outputs},
                    {"verdict", r.verdict},
                    {"witness_summary", r.witness_summary},
                    {"runtime_ms", r.runtime_ms},
                    {"detail", r.detail}});
  }
  json j{{"config", to_json(config)}, {"exit_code", result.exit_code}, {"errors", result.errors}, {"rows", rows}};
  return j.dump(2) + "\n";
}

void write_reports(const ExperimentConfig& config, const RunResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << text;
  };
  write(out_dir / config.csv, csv_text(result.rows));
  write(out_dir / config.json, json_text(config, result));
}

std::vector<SystemSpec> panel_specs() {
  std::vector<SystemSpec> out;
  for (const auto& sys : acceptance_panel()) out.push_back(SystemSpec::from_measure(sys.id, sys.measure));
  return out;
}

}  // namespace seqent
