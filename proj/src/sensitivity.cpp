#include "seqent/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "seqent/error.hpp"
#include "seqent/seeding.hpp"

namespace seqent {
namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + fmt(v[i]);
  return out;
}

void check_depth(const PointRep& x, const PointRep& y, std::int64_t depth) {
  if (depth < 0) throw InvalidArgument("depth must be >= 0");
  if (agree_on(x, y, -depth, depth)) {
    throw InvalidArgument("x and y agree on [-" + std::to_string(depth) + ", " + std::to_string(depth) + "]");
  }
}

std::vector<double> descending(std::vector<double> grid) {
  std::sort(grid.begin(), grid.end(), std::greater<>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

/// Past this shift the relative position of coordinate 0 and the support of `a`
/// only matters modulo the period.
std::int64_t periodic_burn_in(const Sft& sft, std::int64_t rightmost) {
  return std::max<std::int64_t>(0, rightmost) + sft.mixing_steps() + 2 * sft.period() + 1;
}

double diam_at(const Sft& sft, const CylinderUnion& a, std::int64_t s) {
  const CylinderUnion moved = a.image(s);
  const std::int64_t horizon =
      a.length() == 0 ? sft.mixing_steps() + sft.period() + 2
                      : std::max(std::abs(moved.lo()), std::abs(moved.hi())) + sft.mixing_steps() + sft.period() + 2;
  return diam_of_set(moved, sft, horizon).value;
}

}  // namespace

const std::vector<double>& fine_eps_grid() {
  static const std::vector<double> grid{0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001, 0.0005, 0.0002, 0.0001};
  return grid;
}

std::int64_t pigeonhole_bound(const Rational& a) {
  if (a <= 0 || a > 1) throw InvalidArgument("pigeonhole_bound: a must lie in (0, 1], got " + to_fraction_string(a));
  const Rational inv = 1 / a;
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), inv.get_num_mpz_t(), inv.get_den_mpz_t());
  return q.get_si() + 1;
}

std::vector<RAPair> ra_search(const MarkovMeasure& m, const CylinderUnion& a, std::int64_t bound) {
  if (bound < 0) throw InvalidArgument("ra_search: bound must be >= 0");
  if (measure_of(m, normalize(a, m.sft())) == 0) throw Degenerate("ra_search: the set has measure 0");
  std::vector<RAPair> out;
  for (std::int64_t s = 0; s <= bound; ++s) {
    for (std::int64_t t = s + 1; t <= bound; ++t) {
      Rational mu = measure_of_constraints(m, {{s, a}, {t, a}});
      if (mu > 0) out.push_back({s, t, std::move(mu)});
    }
  }
  return out;
}

Verdict find_sensitivity_witnesses(const Sft& sft, const MarkovMeasure& m, const CylinderUnion& a,
                                   const CylinderUnion& ux, const CylinderUnion& uy, double eps, std::uint64_t seed,
                                   const WitnessParams& params) {
  if (!(eps > 0.0)) throw InvalidArgument("eps must be > 0");
  if (params.search.horizon < 10) throw InvalidArgument("horizon must be >= 10");
  if (is_empty(ux, sft) || is_empty(uy, sft)) throw InvalidArgument("neighbourhoods must be nonempty");
  const auto pairs = ra_search(m, a, params.ra_bound);
  const double tol = std::min(params.search.tol, eps / 2.0);

  Verdict v;
  v.params = {{"entry_horizon", std::to_string(params.search.entry_horizon)},
              {"eps", fmt(eps)},
              {"horizon", std::to_string(params.search.horizon)},
              {"ra_bound", std::to_string(params.ra_bound)},
              {"seed", std::to_string(seed)},
              {"tol", fmt(tol)}};

  const Rational need = decimal_rational(eps);
  std::int64_t s = 0, t = 0;
  Rational target;
  bool found = false;
  for (const auto& pr : pairs) {
    for (const auto& [u, w] : {std::pair{pr.s, pr.t}, std::pair{pr.t, pr.s}}) {
      Rational mu = measure_of_constraints(m, {{u, ux}, {w, uy}});
      if (mu >= need) {
        s = u, t = w, target = std::move(mu), found = true;
        break;
      }
    }
    if (found) break;
  }
  if (!found) {
    v.note = "no pair in R_a within the bound reaches eps";
    return v;
  }

  const Resolution both = resolve_constraints({{s, a}, {t, a}}, sft);
  const std::int64_t far = std::max(s, t);
  const std::int64_t lo = std::min({std::int64_t{0}, both.set.lo(), ux.lo(), uy.lo()});
  const std::int64_t hi = params.search.entry_horizon + far + params.search.horizon +
                          std::max({std::int64_t{0}, both.set.hi(), ux.hi(), uy.hi()}) + 1;
  const auto z = sample_entry(m, both.set, lo, hi, params.search.entry_horizon, derive_seed(seed, {
                                                                                     static_cast<std::uint64_t>(s),
                                                                                     static_cast<std::uint64_t>(t)}));
  if (!z) {
    v.classification = Classification::inconclusive;
    v.note = "no entry into T^-" + std::to_string(s) + " a cap T^-" + std::to_string(t) + " a within " +
             std::to_string(params.search.entry_horizon) + " steps";
    return v;
  }
  const PointRep p = z->point.shifted(s), q = z->point.shifted(t);
  const auto n = static_cast<std::size_t>(params.search.horizon);
  const auto fp = orbit_indicator(p, ux, 0, n);
  const auto fq = orbit_indicator(q, uy, 0, n);
  std::vector<std::uint8_t> joint(n);
  for (std::size_t i = 0; i < n; ++i) joint[i] = static_cast<std::uint8_t>(fp[i] & fq[i]);
  const double d = density_of_flags(joint, params.search.tail_fraction).upper;

  Witness w;
  w.label = "s=" + std::to_string(s) + " t=" + std::to_string(t) + " e=" + std::to_string(z->entry);
  w.points = {p.describe(), q.describe()};
  w.shifts = {s, t, z->entry};
  w.density = d;
  w.target = target;
  v.witnesses.push_back(std::move(w));
  if (d >= eps - tol) {
    v.classification = Classification::positive;
    v.eps_certified = eps;
  } else {
    v.classification = Classification::inconclusive;
    v.note = "empirical density " + fmt(d) + " below eps - tol";
  }
  return v;
}

Verdict classify_ms_pair(const Sft& sft, const MarkovMeasure& m, const PointRep& x, const PointRep& y,
                         std::int64_t depth, const std::vector<CylinderUnion>& cells, const WitnessParams& params) {
  check_depth(x, y, depth);
  if (cells.empty()) throw InvalidArgument("cell family must be nonempty");
  const auto grid = descending(params.search.eps_grid);
  if (grid.empty()) throw InvalidArgument("eps grid must be nonempty");

  Verdict v;
  v.params = {{"cells", std::to_string(cells.size())},
              {"depth", std::to_string(depth)},
              {"eps_grid", join_doubles(grid)},
              {"horizon", std::to_string(params.search.horizon)},
              {"ra_bound", std::to_string(params.ra_bound)},
              {"seed", std::to_string(params.search.seed)}};
  v.eps_certified = grid.front();
  bool all_pass = true, undecided = false;

  for (std::int64_t d = 0; d <= depth; ++d) {
    const CylinderUnion ux = neighbourhood(sft, x, d), uy = neighbourhood(sft, y, d);
    double level_eps = grid.front();
    std::vector<Witness> level_witnesses;
    for (std::size_t c = 0; c < cells.size() && level_eps > 0.0; ++c) {
      const CylinderUnion& a = cells[c];
      // The largest exact value any pair reaches; grid points above it cannot succeed.
      Rational best = 0;
      for (const auto& pr : ra_search(m, a, params.ra_bound)) {
        best = std::max(best, Rational(measure_of_constraints(m, {{pr.s, ux}, {pr.t, uy}})));
        best = std::max(best, Rational(measure_of_constraints(m, {{pr.t, ux}, {pr.s, uy}})));
      }
      double cell_eps = 0.0;
      bool cell_undecided = false;
      const std::uint64_t seed =
          derive_seed(params.search.seed, {static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(c)});
      for (double eps : grid) {
        if (decimal_rational(eps) > best) continue;
        Verdict r = find_sensitivity_witnesses(sft, m, a, ux, uy, eps, seed, params);
        if (r.positive()) {
          cell_eps = eps;
          Witness w = std::move(r.witnesses.front());
          w.label = "level " + std::to_string(d) + " cell " + a.to_string() + ": " + w.label;
          level_witnesses.push_back(std::move(w));
          break;
        }
        if (r.classification == Classification::inconclusive) cell_undecided = true;
      }
      if (cell_eps == 0.0) undecided = undecided || cell_undecided;
      level_eps = std::min(level_eps, cell_eps);
    }
    if (level_eps > 0.0) {
      v.eps_certified = std::min(v.eps_certified, level_eps);
      for (auto& w : level_witnesses) v.witnesses.push_back(std::move(w));
    } else {
      all_pass = false;
      v.note = "level " + std::to_string(d) + " has a cell with no certified eps";
      break;
    }
  }

  if (all_pass) {
    v.classification = Classification::positive;
  } else {
    v.classification = undecided ? Classification::inconclusive : Classification::negative;
    v.eps_certified = 0.0;
    v.witnesses.clear();
  }
  return v;
}

DiamMeanEstimate diam_mean_profile(const Sft& sft, const MarkovMeasure& m, const CylinderUnion& a,
                                   const FolnerWindows& windows, std::int64_t n_max, double tail_fraction) {
  (void)m;
  if (n_max < 1) throw InvalidArgument("n_max must be >= 1");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw InvalidArgument("tail_fraction must lie in (0, 1]");
  const CylinderUnion an = normalize(a, sft);
  if (an.has_no_patterns()) throw Degenerate("diam_mean_profile: the set is empty");

  DiamMeanEstimate out;
  const bool periodic = sft.is_irreducible();
  const std::int64_t p = periodic ? sft.period() : 0;
  const std::int64_t burn = periodic ? periodic_burn_in(sft, an.length() == 0 ? 0 : an.hi()) : 0;
  std::map<std::int64_t, double> cache;
  auto d = [&](std::int64_t s) {
    if (periodic && s >= burn + p) s = burn + (s - burn) % p;
    auto it = cache.find(s);
    if (it == cache.end()) it = cache.emplace(s, diam_at(sft, an, s)).first;
    return it->second;
  };

  if (periodic) {
    Rational sum = 0;
    for (std::int64_t s = burn; s < burn + p; ++s) sum += Rational(d(s));
    out.exact = windows.is_canonical();
    out.exact_value = sum / p;
    out.exact_value.canonicalize();
  }

  const auto first = static_cast<std::int64_t>(std::ceil(tail_fraction * static_cast<double>(n_max)));
  double best = 0.0;
  if (windows.is_canonical()) {
    double run = 0.0;
    for (std::int64_t n = 1; n <= n_max; ++n) {
      run += d(n - 1);
      if (n >= std::max<std::int64_t>(first, 1)) best = std::max(best, run / static_cast<double>(n));
    }
  } else {
    for (std::int64_t n = std::max<std::int64_t>(first, 1); n <= n_max; ++n) {
      const auto f = windows.window(n);
      double sum = 0.0;
      for (auto s : f) sum += d(s);
      best = std::max(best, sum / static_cast<double>(f.size()));
    }
  }
  out.tail_max = best;
  return out;
}

DensityEstimate diam_witness_density(const Sft& sft, const CylinderUnion& a, const CylinderUnion& ux,
                                     const CylinderUnion& uy, std::int64_t n_max) {
  if (n_max < 1) throw InvalidArgument("n_max must be >= 1");
  auto hit = [&](std::int64_t s) {
    return !intersect_rectangles(a, ux.preimage(s), sft).has_no_patterns() &&
           !intersect_rectangles(a, uy.preimage(s), sft).has_no_patterns();
  };
  if (sft.is_irreducible()) {
    const std::int64_t p = sft.period();
    const std::int64_t right = a.length() == 0 ? 0 : a.hi();
    const std::int64_t left = std::min(ux.length() == 0 ? 0 : ux.lo(), uy.length() == 0 ? 0 : uy.lo());
    const std::int64_t burn = std::max<std::int64_t>(0, right - left) + sft.mixing_steps() + 1;
    std::int64_t count = 0;
    for (std::int64_t s = burn; s < burn + p; ++s) count += hit(s);
    DensityEstimate e;
    e.upper_exact = Rational(count, p);
    e.upper_exact.canonicalize();
    e.lower_exact = e.upper_exact;
    e.upper = e.lower = to_double(e.upper_exact);
    e.periodic = true;
    e.detected_period = p;
    e.n_max = n_max;
    return e;
  }
  std::vector<std::uint8_t> flags(static_cast<std::size_t>(n_max));
  for (std::int64_t s = 0; s < n_max; ++s) flags[static_cast<std::size_t>(s)] = hit(s);
  return density_of_flags(flags);
}

Verdict classify_diam_pair(const Sft& sft, const MarkovMeasure& m, const PointRep& x, const PointRep& y,
                           std::int64_t depth, const std::vector<CylinderUnion>& cells, const DiamParams& params) {
  check_depth(x, y, depth);
  if (cells.empty()) throw InvalidArgument("cell family must be nonempty");
  if (params.eps_grid.empty()) throw InvalidArgument("eps grid must be nonempty");
  (void)m;

  Verdict v;
  v.params = {{"cells", std::to_string(cells.size())},
              {"depth", std::to_string(depth)},
              {"eps_grid", join_doubles(descending(params.eps_grid))},
              {"n_max", std::to_string(params.n_max)}};
  v.eps_certified = 1.0;
  for (std::int64_t d = 0; d <= depth; ++d) {
    const CylinderUnion ux = neighbourhood(sft, x, d), uy = neighbourhood(sft, y, d);
    double level = 1.0;
    const CylinderUnion* weakest = nullptr;
    DensityEstimate weakest_est;
    for (const auto& a : cells) {
      const DensityEstimate e = diam_witness_density(sft, a, ux, uy, params.n_max);
      if (!weakest || e.upper < level) {
        level = e.upper;
        weakest = &a;
        weakest_est = e;
      }
    }
    const double eps = certify_on_grid(level, 0.0, params.eps_grid);
    if (eps == 0.0) {
      v.classification = Classification::negative;
      v.eps_certified = 0.0;
      v.witnesses.clear();
      v.note = "level " + std::to_string(d) + ": cell " + weakest->to_string() + " has witness density " + fmt(level);
      return v;
    }
    v.eps_certified = std::min(v.eps_certified, eps);
    Witness w;
    w.label = "level " + std::to_string(d) + " weakest cell " + weakest->to_string();
    w.points = {x.describe(), y.describe()};
    if (weakest_est.periodic) w.shifts = {weakest_est.detected_period};
    w.density = level;
    if (weakest_est.periodic) w.target = weakest_est.upper_exact;
    v.witnesses.push_back(std::move(w));
  }
  v.classification = Classification::positive;
  return v;
}

std::size_t CrosscheckReport::disagreements() const noexcept {
  std::size_t n = 0;
  for (const auto& r : rows) n += !r.agree();
  for (const auto& s : systems) n += !s.agree();
  return n;
}

CrosscheckReport equivalence_crosscheck(const std::vector<PanelSystem>& panel, const CrosscheckConfig& config) {
  if (panel.empty()) throw InvalidArgument("panel must be nonempty");
  CrosscheckReport report;
  for (const auto& sys : panel) {
    const MarkovMeasure& m = sys.measure;
    const Sft& sft = m.sft();
    const auto cells = cylinder_cells(m, config.cell_length);
    bool any_diam = false;
    for (const auto& pair : sys.pairs) {
      CrosscheckRow row;
      row.system = sys.id;
      row.pair = pair.label;
      row.in = classify_in_pair(sft, m, pair.x, pair.y, config.depth, config.in);
      row.ms = classify_ms_pair(sft, m, pair.x, pair.y, config.depth, cells, config.ms);
      row.diam = classify_diam_pair(sft, m, pair.x, pair.y, config.depth, cells, config.diam);
      const CylinderUnion ux = neighbourhood(sft, pair.x, config.depth);
      const Rational mu = measure_of(m, ux);
      const double var = to_double(mu) * (1.0 - to_double(mu));
      if (var > 0.0) {
        const double eps = 0.5 * std::sqrt(2.0 * var);
        row.count_half = separation_count(m, ux, config.separation_horizon / 2, eps);
        row.count_full = separation_count(m, ux, config.separation_horizon, eps);
        row.kushnirenko = row.count_full > row.count_half;
      }
      row.in_equals_ms = row.in.classification == row.ms.classification;
      row.in_implies_diam = !row.in.positive() || row.diam.positive();
      row.in_implies_kushnirenko = !row.in.positive() || row.kushnirenko;
      any_diam = any_diam || row.diam.positive();
      report.rows.push_back(std::move(row));
    }
    SystemDiamRow sd;
    sd.system = sys.id;
    double weakest = 1.0;
    const auto windows = FolnerWindows::canonical();
    for (const auto& a : cells) {
      weakest = std::min(weakest, diam_mean_profile(sft, m, a, windows, config.diam.n_max).value());
    }
    sd.eps_certified = certify_on_grid(weakest, 0.0, config.diam.eps_grid);
    sd.system_positive = sd.eps_certified > 0.0;
    sd.some_pair_positive = any_diam;
    report.systems.push_back(sd);
  }
  return report;
}

bool family_has_overlap(const FiniteFamily& f) {
  for (std::size_t i = 0; i < f.sets.size(); ++i) {
    for (std::size_t j = i + 1; j < f.sets.size(); ++j) {
      for (std::size_t k = 0; k < f.weights.size(); ++k) {
        if (f.sets[i][k] && f.sets[j][k] && f.weights[k] > 0) return true;
      }
    }
  }
  return false;
}

FiniteFamily explicit_disjoint_family(const Rational& a) {
  const std::int64_t bound = pigeonhole_bound(a);
  const Rational inv = 1 / a;
  if (inv.get_den() != 1) throw InvalidArgument("explicit_disjoint_family: 1/a must be an integer");
  const auto k = static_cast<std::size_t>(bound - 1);
  FiniteFamily f;
  f.weights.assign(k, a);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<bool> set(k, false);
    set[i] = true;
    f.sets.push_back(std::move(set));
  }
  return f;
}

bool pigeonhole_oracle(std::int64_t trials, std::size_t space_size, const Rational& a, std::uint64_t seed) {
  if (space_size < 1 || space_size > 20) throw InvalidArgument("pigeonhole_oracle: space_size must lie in [1, 20]");
  if (trials < 0) throw InvalidArgument("pigeonhole_oracle: trials must be >= 0");
  const auto n_sets = static_cast<std::size_t>(pigeonhole_bound(a));
  auto rng = make_engine(seed);
  std::uniform_int_distribution<long> weight(1, 10);
  std::bernoulli_distribution coin(0.5);
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    FiniteFamily f;
    long total = 0;
    std::vector<long> w(space_size);
    for (auto& x : w) total += (x = weight(rng));
    for (auto x : w) f.weights.emplace_back(x, total);
    for (auto& q : f.weights) q.canonicalize();
    for (std::size_t i = 0; i < n_sets; ++i) {
      std::vector<bool> set(space_size);
      Rational mass = 0;
      for (std::size_t k = 0; k < space_size; ++k) {
        if (coin(rng)) {
          set[k] = true;
          mass += f.weights[k];
        }
      }
      // Pad with random missing points until the set reaches measure a.
      std::vector<std::size_t> order(space_size);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::shuffle(order.begin(), order.end(), rng);
      for (auto k : order) {
        if (mass >= a) break;
        if (!set[k]) {
          set[k] = true;
          mass += f.weights[k];
        }
      }
      f.sets.push_back(std::move(set));
    }
    if (!family_has_overlap(f)) return false;
  }
  return true;
}

}  // namespace seqent
