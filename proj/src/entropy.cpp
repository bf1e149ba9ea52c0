#include "seqent/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "seqent/error.hpp"
#include "seqent/kernels.hpp"
#include "seqent/seeding.hpp"

namespace seqent {
namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Atoms of J v T^{-shift} P that are nonempty in the subshift. Throws once the
// refinement would hold more than 2^join_cap atoms.
std::vector<CylinderUnion> refine(const Sft& sft, const std::vector<CylinderUnion>& current,
                                  const std::vector<CylinderUnion>& atoms, std::int64_t shift, int join_cap) {
  const std::size_t limit = std::size_t{1} << join_cap;
  std::vector<CylinderUnion> out;
  for (const auto& a : current) {
    for (const auto& b : atoms) {
      CylinderUnion c = intersect_rectangles(a, b.preimage(shift), sft);
      if (c.has_no_patterns()) continue;
      if (out.size() == limit) {
        throw CapExceeded("join exceeds 2^" + std::to_string(join_cap) + " nonempty atoms");
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

void check_join_cap(std::size_t length, int join_cap) {
  if (join_cap < 1 || join_cap > 24) throw InvalidArgument("join_cap must lie in [1, 24]");
  if (length > static_cast<std::size_t>(join_cap)) {
    throw CapExceeded("sequence of length " + std::to_string(length) + " exceeds join cap " +
                      std::to_string(join_cap));
  }
}

double entropy_of_atoms(const MarkovMeasure& m, const std::vector<CylinderUnion>& atoms) {
  std::map<Rational, std::int64_t> groups;
  for (const auto& a : atoms) ++groups[measure_of(m, a)];
  double h = 0.0;
  for (const auto& [mu, count] : groups) {
    if (sgn(mu) <= 0) continue;
    h -= static_cast<double>(count) * to_double(mu) * log_of(mu);
  }
  return h;
}

}  // namespace

Partition Partition::make(const MarkovMeasure& m, std::vector<CylinderUnion> atoms) {
  const Sft& sft = m.sft();
  if (atoms.empty()) throw InvalidArgument("a partition needs at least one atom");
  Rational total = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    atoms[i] = normalize(atoms[i], sft);
    if (is_empty(atoms[i], sft)) throw InvalidArgument("partition atom " + std::to_string(i) + " is empty");
    total += measure_of(m, atoms[i]);
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      if (!is_empty(intersect(atoms[i], atoms[j], sft), sft)) {
        throw InvalidArgument("partition atoms " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
      }
    }
  }
  if (total != 1) throw InvalidArgument("partition atoms have total measure " + to_fraction_string(total) + ", not 1");
  return Partition(std::move(atoms));
}

Partition Partition::generators(const MarkovMeasure& m) {
  std::vector<CylinderUnion> atoms;
  for (int a = 0; a < m.alphabet_size(); ++a) {
    auto c = normalize(CylinderUnion::from_words(0, {Word{static_cast<Symbol>(a)}}), m.sft());
    if (!is_empty(c, m.sft())) atoms.push_back(std::move(c));
  }
  return make(m, std::move(atoms));
}

Partition Partition::two_set(const MarkovMeasure& m, const CylinderUnion& b) {
  const Sft& sft = m.sft();
  std::vector<CylinderUnion> atoms;
  auto in = normalize(b, sft);
  auto out = complement(in, sft);
  if (!is_empty(in, sft)) atoms.push_back(std::move(in));
  if (!is_empty(out, sft)) atoms.push_back(std::move(out));
  return make(m, std::move(atoms));
}

void validate_sequence(const SequenceS& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0) throw InvalidArgument("sequence times must be >= 0");
    if (i > 0 && s[i] <= s[i - 1]) throw InvalidArgument("sequence times must be strictly increasing");
  }
}

double shannon_entropy(const MarkovMeasure& m, const Partition& p) { return entropy_of_atoms(m, p.atoms()); }

Partition join_under_sequence(const MarkovMeasure& m, const Partition& p, const SequenceS& s, int join_cap) {
  validate_sequence(s);
  check_join_cap(s.size(), join_cap);
  std::vector<CylinderUnion> current{CylinderUnion::whole()};
  for (auto t : s) current = refine(m.sft(), current, p.atoms(), t, join_cap);
  return Partition(std::move(current));
}

EntropyProfile sequence_entropy_profile(const MarkovMeasure& m, const Partition& p, const SequenceS& s,
                                        int join_cap) {
  validate_sequence(s);
  check_join_cap(s.size(), join_cap);
  EntropyProfile profile;
  std::vector<CylinderUnion> current{CylinderUnion::whole()};
  for (std::size_t i = 0; i < s.size(); ++i) {
    current = refine(m.sft(), current, p.atoms(), s[i], join_cap);
    const double h = entropy_of_atoms(m, current);
    const auto n = static_cast<std::int64_t>(i + 1);
    profile.rows.push_back({n, h, h / static_cast<double>(n)});
  }
  return profile;
}

std::int64_t separation_count(const MarkovMeasure& m, const CylinderUnion& base, std::int64_t horizon, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("separation eps must be > 0");
  if (horizon < 0) throw InvalidArgument("separation horizon must be >= 0");
  const Rational eps_sq = from_double(eps) * from_double(eps);
  // The distance between T^{-s} base and T^{-t} base depends only on s - t.
  std::map<std::int64_t, bool> separated_at;
  auto separated = [&](std::int64_t gap) {
    auto it = separated_at.find(gap);
    if (it != separated_at.end()) return it->second;
    const Rational d = l2_distance_sq(m, {{0, base}}, {{gap, base}});
    return separated_at[gap] = (d > eps_sq);
  };
  std::vector<std::int64_t> chosen;
  for (std::int64_t s = 0; s < horizon; ++s) {
    bool ok = true;
    for (auto t : chosen) {
      if (!separated(s - t)) {
        ok = false;
        break;
      }
    }
    if (ok) chosen.push_back(s);
  }
  return static_cast<std::int64_t>(chosen.size());
}

double df_estimate(const PointRep& x, const PointRep& y, const CylinderUnion& b, const FolnerWindows& windows,
                   std::int64_t n_max, double tail_fraction) {
  if (n_max < 10) throw InvalidArgument("n_max must be >= 10");
  if (windows.is_canonical()) {
    auto fx = orbit_indicator(x, b, 0, static_cast<std::size_t>(n_max));
    const auto fy = orbit_indicator(y, b, 0, static_cast<std::size_t>(n_max));
    for (std::size_t i = 0; i < fx.size(); ++i) fx[i] ^= fy[i];
    return std::sqrt(density_of_flags(fx, tail_fraction).upper);
  }
  auto pred = [&](std::int64_t s) { return b.contains(x, s) != b.contains(y, s); };
  return std::sqrt(density(pred, windows, n_max, tail_fraction).upper);
}

std::vector<CylinderUnion> cylinder_cells(const MarkovMeasure& m, std::size_t max_len) {
  std::vector<CylinderUnion> cells;
  for (std::size_t len = 1; len <= max_len; ++len) {
    for (const Word& w : m.sft().admissible_words(len)) {
      auto c = CylinderUnion::from_words(0, {w});
      if (sgn(measure_of(m, c)) > 0) cells.push_back(normalize(c, m.sft()));
    }
  }
  return cells;
}

Verdict ms_function_test(const MarkovMeasure& m, const CylinderUnion& b, const std::vector<CylinderUnion>& cells,
                         const SearchParams& params) {
  if (params.horizon < 10) throw InvalidArgument("horizon must be >= 10");
  if (params.attempts < 1) throw InvalidArgument("attempts must be >= 1");
  const Sft& sft = m.sft();
  const CylinderUnion bn = normalize(b, sft);

  Verdict v;
  v.params = {{"attempts", std::to_string(params.attempts)},
              {"cells", std::to_string(cells.size())},
              {"entry_horizon", std::to_string(params.entry_horizon)},
              {"horizon", std::to_string(params.horizon)},
              {"seed", std::to_string(params.seed)},
              {"tail_fraction", fmt(params.tail_fraction)},
              {"tol", fmt(params.tol)}};
  if (cells.empty()) {
    v.classification = Classification::inconclusive;
    v.note = "no cells";
    return v;
  }

  double weakest = 1.0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const CylinderUnion& cell = cells[c];
    const std::int64_t lo = std::min({std::int64_t{0}, cell.lo(), bn.lo()});
    const std::int64_t hi =
        params.entry_horizon + params.horizon + std::max({std::int64_t{0}, cell.hi(), bn.hi()});
    double best = -1.0;
    Witness best_witness;
    for (int a = 0; a < params.attempts; ++a) {
      const auto ua = static_cast<std::uint64_t>(a);
      const auto ps = sample_entry(m, cell, lo, hi, params.entry_horizon, derive_seed(params.seed, {c, ua, 0}));
      const auto qs = sample_entry(m, cell, lo, hi, params.entry_horizon, derive_seed(params.seed, {c, ua, 1}));
      if (!ps || !qs) continue;
      const auto n = static_cast<std::size_t>(params.horizon);
      const auto fp = orbit_indicator(ps->point, bn, 0, n);
      const auto fq = orbit_indicator(qs->point, bn, 0, n);
      for (int order = 0; order < 2; ++order) {
        const auto& f1 = order == 0 ? fp : fq;
        const auto& f2 = order == 0 ? fq : fp;
        std::vector<std::uint8_t> g(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<std::uint8_t>(f1[i] & (f2[i] ^ 1U));
        const double d = density_of_flags(g, params.tail_fraction).upper;
        if (d > best) {
          best = d;
          const auto& p1 = order == 0 ? *ps : *qs;
          const auto& p2 = order == 0 ? *qs : *ps;
          best_witness = Witness{"cell " + cell.to_string(), {p1.point.describe(), p2.point.describe()},
                                 {p1.entry, p2.entry}, d, std::nullopt};
        }
      }
    }
    if (best < 0.0) {
      v.classification = Classification::inconclusive;
      v.note = "no sampled point entered cell " + cell.to_string();
      v.witnesses.clear();
      return v;
    }
    weakest = std::min(weakest, best);
    v.witnesses.push_back(std::move(best_witness));
  }

  v.eps_certified = certify_on_grid(weakest, params.tol, params.eps_grid);
  if (v.eps_certified > 0.0) {
    v.classification = Classification::positive;
  } else {
    v.witnesses.clear();
    v.classification = weakest > params.tol ? Classification::inconclusive : Classification::negative;
    v.note = "weakest cell density " + fmt(weakest);
  }
  return v;
}

SequenceS greedy_entropy_sequence(const MarkovMeasure& m, const Partition& p, std::int64_t length,
                                  std::int64_t window, int join_cap) {
  if (length < 1 || window < 1) throw InvalidArgument("greedy length and window must be >= 1");
  check_join_cap(static_cast<std::size_t>(length), join_cap);
  SequenceS s{0};
  std::vector<CylinderUnion> current = refine(m.sft(), {CylinderUnion::whole()}, p.atoms(), 0, join_cap);
  while (static_cast<std::int64_t>(s.size()) < length) {
    double best_h = -1.0;
    std::int64_t best_t = 0;
    std::vector<CylinderUnion> best_join;
    for (std::int64_t t = s.back() + 1; t <= s.back() + window; ++t) {
      auto joined = refine(m.sft(), current, p.atoms(), t, join_cap);
      const double h = entropy_of_atoms(m, joined);
      if (h > best_h + 1e-12) {
        best_h = h;
        best_t = t;
        best_join = std::move(joined);
      }
    }
    s.push_back(best_t);
    current = std::move(best_join);
  }
  return s;
}

HmsHapReport crosscheck_hms_hap(const MarkovMeasure& m, const CylinderUnion& b, const CrosscheckParams& params) {
  const Sft& sft = m.sft();
  HmsHapReport r;
  const CylinderUnion bn = normalize(b, sft);

  r.ms = ms_function_test(m, bn, cylinder_cells(m, params.cell_length), params.search);
  r.sensitive = r.ms.positive();

  const Rational mu = measure_of(m, bn);
  const double var = to_double(mu) * (1.0 - to_double(mu));
  if (var > 0.0) {
    r.separation_eps = 0.5 * std::sqrt(2.0 * var);
    r.count_half = separation_count(m, bn, params.separation_horizon / 2, r.separation_eps);
    r.count_full = separation_count(m, bn, params.separation_horizon, r.separation_eps);
    r.separation_grows = r.count_full > r.count_half;
  }

  if (var > 0.0) {
    const Partition p = Partition::two_set(m, bn);
    r.greedy_s = greedy_entropy_sequence(m, p, params.greedy_length, params.greedy_window);
    r.greedy_profile = sequence_entropy_profile(m, p, r.greedy_s);
    const auto& rows = r.greedy_profile.rows;
    const double last = rows.back().h - (rows.size() > 1 ? rows[rows.size() - 2].h : 0.0);
    r.entropy_positive = last > params.entropy_increment_floor;
  }
  r.agree = r.sensitive == r.separation_grows && r.sensitive == r.entropy_positive;
  return r;
}

}  // namespace seqent
