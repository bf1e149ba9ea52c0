#include "seqent/acceptance.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include "seqent/config.hpp"
#include "seqent/entropy.hpp"
#include "seqent/error.hpp"
#include "seqent/harness.hpp"
#include "seqent/independence.hpp"
#include "seqent/panel.hpp"
#include "seqent/seeding.hpp"
#include "seqent/sensitivity.hpp"

namespace seqent {

namespace {

// Pinned tolerances and sizes.
constexpr int kConstraintSets = 1000;
constexpr int kMaxSpan = 14;
constexpr double kMeasureSeconds = 60.0;
constexpr double kEntropyTol = 1e-12;
constexpr int kEntropyN = 12;
constexpr int kRandomSequences = 5;
constexpr int kLawMaxN = 12;
constexpr double kLawSeconds = 60.0;
constexpr double kSeparationEps = 0.5;
constexpr std::int64_t kBernoulliHorizon = 64;
constexpr std::int64_t kCycleHorizon = 256;
constexpr std::int64_t kCycleCountCap = 4;
constexpr int kWitnessSeeds = 20;
constexpr int kWitnessGood = 19;
constexpr double kWitnessTol = 0.02;
constexpr std::int64_t kWitnessHorizon = 100000;
constexpr double kWitnessSeconds = 120.0;
constexpr std::int64_t kCrossDepth = 1;
constexpr std::size_t kCellLength = 2;
constexpr std::uint64_t kCrossSeed = 20240601;
constexpr std::size_t kTableExtras = 50;
constexpr std::int64_t kPigeonTrials = 10000;
constexpr std::size_t kPigeonSpace = 12;

const char* const kNames[AcceptanceSuite::kCriteria] = {
    "exact measure engine",       "entropy exactness",
    "golden-mean independence law", "separation counts",
    "witness construction",       "IN and ms agree on the panel",
    "constant-E reduction",       "pigeonhole lemma",
    "ms implies diam",            "determinism",
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

ShiftedConstraintSet random_constraints(std::mt19937_64& rng, const Sft& sft) {
  std::uniform_int_distribution<int> count(1, 3), length(1, 4), origin(-2, 2), n_words(1, 3);
  std::uniform_int_distribution<int> symbol(0, sft.alphabet_size() - 1);
  std::uniform_int_distribution<int> shift(0, kMaxSpan - 4);
  ShiftedConstraintSet c;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    const auto len = static_cast<std::size_t>(length(rng));
    const int lo = origin(rng);
    std::vector<Word> words;
    for (int k = n_words(rng); k > 0; --k) {
      Word w(len);
      for (auto& s : w) s = static_cast<Symbol>(symbol(rng));
      words.push_back(std::move(w));
    }
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    // Shifted supports start in [2, kMaxSpan - 2] with length <= 4, so the hull spans <= kMaxSpan.
    c.push_back({shift(rng) + 2 - lo, CylinderUnion::from_words(lo, std::move(words))});
  }
  return c;
}

SequenceS random_sequence(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<std::int64_t> start(0, 3), gap(1, 4);
  SequenceS s{start(rng)};
  while (static_cast<int>(s.size()) < n) s.push_back(s.back() + gap(rng));
  return s;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

std::string CriterionResult::line() const {
  std::ostringstream out;
  out << (pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << detail << " [" << fmt(seconds)
      << " s]";
  return out.str();
}

struct AcceptanceSuite::State {
  std::filesystem::path config_dir;
  std::vector<PanelSystem> panel = acceptance_panel();
  std::optional<CrosscheckReport> cross;

  CrosscheckConfig cross_config() const {
    CrosscheckConfig cfg;
    cfg.depth = kCrossDepth;
    cfg.cell_length = kCellLength;
    cfg.ms.search.horizon = kWitnessHorizon;
    cfg.ms.search.seed = kCrossSeed;
    return cfg;
  }

  const CrosscheckReport& crosscheck() {
    if (!cross) cross = equivalence_crosscheck(panel, cross_config());
    return *cross;
  }

  CriterionResult c1() {
    const auto t0 = std::chrono::steady_clock::now();
    auto rng = make_engine(1);
    int mismatches = 0, nonzero = 0;
    for (int i = 0; i < kConstraintSets; ++i) {
      const MarkovMeasure& m = panel[static_cast<std::size_t>(i) % panel.size()].measure;
      const ShiftedConstraintSet c = random_constraints(rng, m.sft());
      const Resolution r = resolve_constraints(c, m.sft());
      const Rational direct = measure_of_constraints(m, c);
      const Rational via = r.nonempty() ? measure_of(m, r.set) : Rational(0);
      mismatches += direct != via;
      nonzero += direct != 0;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {1, "", mismatches == 0 && secs < kMeasureSeconds,
            std::to_string(kConstraintSets) + " sets, " + std::to_string(mismatches) + " mismatches, " +
                std::to_string(nonzero) + " of positive measure, " + fmt(secs) + " s < " + fmt(kMeasureSeconds) + " s"};
  }

  CriterionResult c2() {
    auto rng = make_engine(2);
    const MarkovMeasure& b = panel[0].measure;
    const MarkovMeasure& g = panel[1].measure;
    const MarkovMeasure& c = panel[2].measure;
    double worst_b = 0.0, worst_c = -1.0;
    for (int k = 0; k < kRandomSequences; ++k) {
      const SequenceS s = random_sequence(rng, kEntropyN);
      for (const auto& row : sequence_entropy_profile(b, Partition::generators(b), s).rows) {
        worst_b = std::max(worst_b, std::abs(row.h_per_n - std::log(2.0)));
      }
      for (const auto& row : sequence_entropy_profile(c, Partition::generators(c), s).rows) {
        worst_c = std::max(worst_c, row.h - std::log(4.0));
      }
    }
    const double h1 = sequence_entropy_profile(g, Partition::generators(g), {0}).rows.front().h;
    const double golden = std::abs(h1 - (std::log(3.0) - 2.0 / 3.0 * std::log(2.0)));
    const bool pass = worst_b <= kEntropyTol && golden <= kEntropyTol && worst_c <= kEntropyTol;
    return {2, "", pass,
            "max |H_n/n - log 2| = " + fmt(worst_b) + ", |H_1 - (log 3 - 2/3 log 2)| = " + fmt(golden) +
                ", max (H_n - log 4) on the 4-cycle = " + fmt(worst_c) + ", tol " + fmt(kEntropyTol)};
  }

  CriterionResult c3() {
    const auto t0 = std::chrono::steady_clock::now();
    const MarkovMeasure& g = panel[1].measure;
    const Sft& sft = g.sft();
    const auto a1 = CylinderUnion::from_words(0, {{0}}), a2 = CylinderUnion::from_words(0, {{1}});
    std::string failures;
    for (int n = 1; n <= kLawMaxN; ++n) {
      std::vector<std::int64_t> f(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) f[static_cast<std::size_t>(i)] = i;
      const IndependenceReport r = max_independence_subset(sft, a1, a2, f, EMap::whole());
      // Every subset, in increasing mask order so all proper subsets are decided first.
      // A set with a dependent subset of one fewer element is dependent; the rest are checked directly.
      const std::uint32_t full = 1U << n;
      std::vector<std::uint8_t> indep(full, 0);
      std::size_t best = 0;
      for (std::uint32_t mask = 0; mask < full; ++mask) {
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
          if ((mask >> i) & 1U) ok = indep[mask & ~(1U << i)] != 0;
        }
        if (ok) {
          std::vector<std::int64_t> set;
          for (int i = 0; i < n; ++i) {
            if ((mask >> i) & 1U) set.push_back(i);
          }
          ok = is_independence_set(sft, a1, a2, set, EMap::whole());
          if (ok) best = std::max(best, set.size());
        }
        indep[mask] = ok;
      }
      const auto law = static_cast<std::size_t>((n + 1) / 2);
      if (r.best_i.size() != law || best != law || !is_independence_set(sft, a1, a2, r.best_i, EMap::whole())) {
        failures += " N=" + std::to_string(n);
      }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {3, "", failures.empty() && secs < kLawSeconds,
            (failures.empty() ? std::string("search and 2^N enumeration give ceil(N/2) for N <= 12")
                              : "mismatch at" + failures) +
                ", " + fmt(secs) + " s < " + fmt(kLawSeconds) + " s"};
  }

  CriterionResult c4() {
    const MarkovMeasure& b = panel[0].measure;
    const MarkovMeasure& c = panel[2].measure;
    const auto zero = CylinderUnion::from_words(0, {{0}});
    std::string bad;
    for (std::int64_t h = 1; h <= kBernoulliHorizon; ++h) {
      if (separation_count(b, zero, h, kSeparationEps) != h) bad += " bernoulli h=" + std::to_string(h);
    }
    const Rational d2 = l2_distance_sq(b, {{0, zero}}, {{1, zero}});
    if (d2 != Rational(1, 2)) bad += " distance^2=" + to_fraction_string(d2);
    std::int64_t worst = 0;
    for (double eps : {1e-9, 1e-3, 0.1, 0.5, 0.9}) {
      for (Symbol a = 0; a < 4; ++a) {
        for (std::int64_t h = 1; h <= kCycleHorizon; ++h) {
          worst = std::max(worst, separation_count(c, CylinderUnion::from_words(0, {{a}}), h, eps));
        }
      }
    }
    if (worst > kCycleCountCap) bad += " 4-cycle count " + std::to_string(worst);
    return {4, "", bad.empty(),
            bad.empty() ? "Bernoulli count = horizon for h <= 64 at eps 0.5 (distance^2 = 1/2); 4-cycle max count " +
                              std::to_string(worst) + " <= 4 for h <= 256"
                        : "failed:" + bad};
  }

  CriterionResult c5() {
    const auto t0 = std::chrono::steady_clock::now();
    const MarkovMeasure& b = panel[0].measure;
    const auto ux = CylinderUnion::from_words(0, {{0}}), uy = CylinderUnion::from_words(0, {{1}});
    WitnessParams wp;
    wp.search.horizon = kWitnessHorizon;
    int good = 0;
    bool targets = true;
    double worst = 0.0;
    for (int k = 0; k < kWitnessSeeds; ++k) {
      const Verdict v = find_sensitivity_witnesses(b.sft(), b, CylinderUnion::whole(), ux, uy, 0.2,
                                                   derive_seed(5, {static_cast<std::uint64_t>(k)}), wp);
      if (v.witnesses.empty()) {
        targets = false;
        continue;
      }
      const Witness& w = v.witnesses.front();
      targets = targets && w.target && *w.target == Rational(1, 4) && w.shifts[0] == 0 && w.shifts[1] == 1;
      const double err = std::abs(w.density - 0.25);
      worst = std::max(worst, err);
      good += err <= kWitnessTol;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {5, "", good >= kWitnessGood && targets && secs < kWitnessSeconds,
            std::to_string(good) + "/" + std::to_string(kWitnessSeeds) + " seeds within " + fmt(kWitnessTol) +
                " of 1/4 (worst " + fmt(worst) + "), exact target 1/4 at (s,t)=(0,1): " + (targets ? "yes" : "no") +
                ", " + fmt(secs) + " s < " + fmt(kWitnessSeconds) + " s"};
  }

  CriterionResult c6() {
    const CrosscheckReport& r = crosscheck();
    std::string bad;
    bool generator_row = false;
    for (const auto& row : r.rows) {
      if (!row.in_equals_ms) bad += " " + row.system + ":" + row.pair;
      if (row.system == "four_cycle" &&
          (row.in.positive() || row.ms.positive() || row.diam.positive() || row.kushnirenko)) {
        bad += " periodic-positive:" + row.pair;
      }
      if (row.system == "bernoulli" && row.pair == "0~|1~") {
        generator_row = row.in.positive() && row.ms.positive() && row.diam.positive() && row.kushnirenko;
      }
    }
    if (!generator_row) bad += " generator-row";
    const std::size_t dis = r.disagreements();
    return {6, "", bad.empty() && dis == 0,
            std::to_string(r.rows.size()) + " rows, " + std::to_string(dis) + " disagreements" +
                (bad.empty() ? std::string(", IN = ms everywhere, 4-cycle all negative, generator pair all positive")
                             : ", failed:" + bad)};
  }

  CriterionResult c7() {
    const CrosscheckReport& r = crosscheck();
    std::string bad;
    std::size_t row_index = 0;
    for (std::size_t i = 0; i < panel.size(); ++i) {
      const PanelSystem& sys = panel[i];
      InParams params = cross_config().in;
      params.extras = random_table_maps(sys.measure, kTableExtras, derive_seed(7, {i}));
      for (const auto& pair : sys.pairs) {
        const Verdict v = classify_in_pair(sys.measure.sft(), sys.measure, pair.x, pair.y, kCrossDepth, params);
        const CrosscheckRow& before = r.rows[row_index++];
        if (v.classification != before.in.classification) bad += " " + sys.id + ":" + pair.label;
      }
    }
    return {7, "", bad.empty(),
            bad.empty() ? std::to_string(kTableExtras) + " random TableE maps per system change no IN verdict"
                        : "changed:" + bad};
  }

  CriterionResult c8() {
    std::string bad;
    for (const Rational& a : {Rational(1, 3), Rational(2, 5), Rational(1, 2)}) {
      if (!pigeonhole_oracle(kPigeonTrials, kPigeonSpace, a, derive_seed(8, {a.get_den().get_ui()}))) {
        bad += " oracle a=" + to_fraction_string(a);
      }
    }
    for (const Rational& a : {Rational(1, 2), Rational(1, 3), Rational(1, 4)}) {
      const FiniteFamily f = explicit_disjoint_family(a);
      bool ok = static_cast<std::int64_t>(f.sets.size()) == pigeonhole_bound(a) - 1 && !family_has_overlap(f);
      for (const auto& set : f.sets) {
        Rational mass = 0;
        for (std::size_t k = 0; k < set.size(); ++k) mass += set[k] ? f.weights[k] : 0;
        ok = ok && mass >= a;
      }
      if (!ok) bad += " family a=" + to_fraction_string(a);
    }
    return {8, "", bad.empty(),
            bad.empty() ? "10^4 trials on 12-point spaces at a in {1/3, 2/5, 1/2}; disjoint families of size bound-1 "
                          "for a in {1/2, 1/3, 1/4}"
                        : "failed:" + bad};
  }

  CriterionResult c9() {
    const CrosscheckReport& r = crosscheck();
    std::string bad;
    std::size_t ms_positive = 0;
    for (const auto& row : r.rows) {
      if (row.ms.positive()) {
        ++ms_positive;
        if (!row.diam.positive()) bad += " " + row.system + ":" + row.pair;
      }
    }
    std::size_t systems = 0;
    for (const auto& sys : panel) {
      const Sft& sft = sys.measure.sft();
      if (std::popcount(realizable_symbols(CylinderUnion::whole(), sft, 0, 0).front()) < 2) continue;
      ++systems;
      const auto d = diam_mean_profile(sft, sys.measure, CylinderUnion::whole(), FolnerWindows::canonical(), 1000);
      if (!d.exact || d.exact_value != 1) bad += " diam(X) " + sys.id;
    }
    return {9, "", bad.empty(),
            std::to_string(ms_positive) + " ms-positive rows all diam-positive; diam_mean_profile(X) = 1 exactly on " +
                std::to_string(systems) + " systems" + (bad.empty() ? "" : "; failed:" + bad)};
  }

  CriterionResult c10() {
    const auto path = config_dir / "acceptance.json";
    const ExperimentConfig cfg = load_config(path);
    const auto base = std::filesystem::temp_directory_path() / ("seqent_acceptance_" + std::to_string(::getpid()));
    std::string csv[2];
    int codes[2];
    for (int k = 0; k < 2; ++k) {
      RunOptions opt;
      opt.threads = k == 0 ? 1U : 2U;
      const RunResult res = run_config(cfg, opt);
      codes[k] = res.exit_code;
      const auto dir = base / std::to_string(k);
      write_reports(cfg, res, dir);
      csv[k] = read_file(dir / cfg.csv);
    }
    std::filesystem::remove_all(base);
    const bool same = csv[0] == csv[1] && !csv[0].empty();
    return {10, "", same && codes[0] == kExitOk && codes[1] == kExitOk,
            std::string(same ? "byte-identical" : "different") + " CSV across two runs (1 and 2 threads) of " +
                path.filename().string() + ", " + std::to_string(csv[0].size()) + " bytes, exit codes " +
                std::to_string(codes[0]) + "/" + std::to_string(codes[1])};
  }
};

AcceptanceSuite::AcceptanceSuite(std::filesystem::path config_dir) : state_(std::make_unique<State>()) {
  state_->config_dir = std::move(config_dir);
}

AcceptanceSuite::~AcceptanceSuite() = default;

CriterionResult AcceptanceSuite::run(int id) {
  if (id < 1 || id > kCriteria) throw InvalidArgument("criterion ids run from 1 to 10");
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = state_->c1(); break;
      case 2: r = state_->c2(); break;
      case 3: r = state_->c3(); break;
      case 4: r = state_->c4(); break;
      case 5: r = state_->c5(); break;
      case 6: r = state_->c6(); break;
      case 7: r = state_->c7(); break;
      case 8: r = state_->c8(); break;
      case 9: r = state_->c9(); break;
      default: r = state_->c10(); break;
    }
  } catch (const std::exception& e) {
    r = {id, "", false, std::string("exception: ") + e.what()};
  }
  r.id = id;
  r.name = kNames[id - 1];
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<CriterionResult> AcceptanceSuite::run_all() {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriteria; ++id) out.push_back(run(id));
  return out;
}

}  // namespace seqent
