#include "seqent/independence.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <unordered_map>

#include "seqent/error.hpp"
#include "seqent/seeding.hpp"

namespace seqent {
namespace {

/// The subshift points of `c` restricted to coordinates >= cut, as a set over [cut, ...].
/// Relies on tight patterns: a tight rectangle projects onto a suffix as its suffix masks.
CylinderUnion project_from(const CylinderUnion& c, std::int64_t cut, const Sft& sft) {
  if (c.has_no_patterns() || c.length() == 0 || cut <= c.lo()) return c;
  std::vector<Pattern> out;
  if (cut > c.hi()) {
    SymbolMask mask = 0;
    for (const auto& p : c.patterns()) mask |= sft.step_forward(p.back(), cut - c.hi());
    if (mask == sft.all_symbols()) return CylinderUnion::whole();
    out.push_back({mask});
  } else {
    const auto skip = static_cast<std::ptrdiff_t>(cut - c.lo());
    for (const auto& p : c.patterns()) out.emplace_back(p.begin() + skip, p.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  // Projected rectangles may overlap; only the union matters here.
  return normalize(CylinderUnion::from_disjoint_patterns(cut, std::move(out)), sft);
}

/// Decides "every sigma is feasible" by sweeping I left to right. After each step
/// only the coordinates later constraints can reach are kept, so equal partial
/// states are solved once.
class SweepChecker {
 public:
  SweepChecker(const Sft& sft, const CylinderUnion& a1, const CylinderUnion& a2) : sft_(sft), a_{a1, a2} {
    bool any = false;
    for (const auto& a : a_) {
      if (a.length() == 0) continue;
      lo_ = any ? std::min(lo_, a.lo()) : a.lo();
      any = true;
    }
  }

  bool check(const CylinderUnion& base, std::span<const std::int64_t> sorted_i) {
    if (sorted_i.empty()) return !base.has_no_patterns();
    if (base.has_no_patterns()) return false;
    for (const auto& a : a_) {
      if (a.has_no_patterns()) return false;
    }
    i_ = sorted_i;
    memo_.assign(sorted_i.size(), {});
    return descend(0, project_from(base, sorted_i[0] + lo_ - 1, sft_));
  }

 private:
  bool descend(std::size_t j, const CylinderUnion& state) {
    if (j == i_.size()) return true;
    const std::string key = state.to_string();
    if (auto it = memo_[j].find(key); it != memo_[j].end()) return it->second;
    bool ok = true;
    for (const auto& a : a_) {
      CylinderUnion next = intersect_rectangles(state, a.preimage(i_[j]), sft_);
      if (next.has_no_patterns()) {
        ok = false;
        break;
      }
      if (j + 1 < i_.size()) next = project_from(next, i_[j + 1] + lo_ - 1, sft_);
      if (!descend(j + 1, next)) {
        ok = false;
        break;
      }
    }
    memo_[j].emplace(key, ok);
    return ok;
  }

  const Sft& sft_;
  std::array<CylinderUnion, 2> a_;
  std::int64_t lo_ = 0;
  std::span<const std::int64_t> i_;
  std::vector<std::unordered_map<std::string, bool>> memo_;
};

std::vector<std::int64_t> sorted_unique(std::span<const std::int64_t> v) {
  std::vector<std::int64_t> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string join_ints(const std::vector<std::int64_t>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "}";
}

constexpr std::size_t kTableOverrideCap = 10;

enum class Membership { free, forced_in, forced_out };

/// Largest independent subset of a window for a fixed base set, by dynamic
/// programming over the window in increasing order. The best completion depends
/// only on the position, the frontier states left by all sigma on the chosen
/// prefix and whether a free element was taken, so those are memoized. Failing
/// prefixes are never extended (supersets of a failing set fail).
class SubsetSearch {
 public:
  SubsetSearch(const Sft& sft, const CylinderUnion& a1, const CylinderUnion& a2,
               const std::vector<std::int64_t>& window)
      : sft_(sft), a_{a1, a2}, window_(window) {
    bool any = false;
    for (const auto& a : a_) {
      if (a.length() == 0) continue;
      lo_ = any ? std::min(lo_, a.lo()) : a.lo();
      any = true;
    }
  }

  /// nullopt when no subset meets the membership constraints.
  std::optional<std::vector<std::int64_t>> solve(const CylinderUnion& base, const std::vector<Membership>& status,
                                                 bool require_free) {
    status_ = &status;
    require_free_ = require_free;
    memo_.clear();
    Node node{{normalize(base, sft_)}, false};
    if (node.states[0].has_no_patterns()) {
      node.states.clear();
      if (require_free || std::count(status.begin(), status.end(), Membership::forced_in) > 0) return std::nullopt;
      return std::vector<std::int64_t>{};
    }
    if (best(0, node) < 0) return std::nullopt;
    std::vector<std::int64_t> out;
    for (std::size_t idx = 0; idx < window_.size(); ++idx) {
      if (!memo_.at(key(idx, node)).include) continue;
      out.push_back(window_[idx]);
      node = *extend(idx, node);
    }
    return out;
  }

 private:
  static constexpr int kInfeasible = -1000000;

  struct Node {
    std::vector<CylinderUnion> states;
    bool took_free = false;
  };
  struct Entry {
    int value = kInfeasible;
    bool include = false;
  };

  static std::string key(std::size_t idx, const Node& node) {
    std::vector<std::string> parts;
    for (const auto& st : node.states) parts.push_back(st.to_string());
    std::sort(parts.begin(), parts.end());
    std::string k = std::to_string(idx) + (node.took_free ? "+" : "-");
    for (const auto& p : parts) k += "|" + p;
    return k;
  }

  /// Frontier after appending window_[idx], or nullopt if some sigma becomes infeasible.
  std::optional<Node> extend(std::size_t idx, const Node& node) const {
    const std::int64_t f = window_[idx];
    // Later elements are >= f + 1, so their constraints start at or after f + 1 + lo.
    const std::int64_t cut = f + lo_;
    Node out;
    out.took_free = node.took_free || (*status_)[idx] == Membership::free;
    std::unordered_map<std::string, bool> seen;
    for (const auto& st : node.states) {
      for (const auto& a : a_) {
        CylinderUnion next = intersect_rectangles(st, a.preimage(f), sft_);
        if (next.has_no_patterns()) return std::nullopt;
        next = project_from(next, cut, sft_);
        if (seen.emplace(next.to_string(), true).second) out.states.push_back(std::move(next));
      }
    }
    return out;
  }

  // Including wins ties, which yields the lexicographically smallest maximum.
  int best(std::size_t idx, const Node& node) {
    if (idx == window_.size()) return (require_free_ && !node.took_free) ? kInfeasible : 0;
    const std::string k = key(idx, node);
    if (auto it = memo_.find(k); it != memo_.end()) return it->second.value;
    const Membership m = (*status_)[idx];
    Entry e;
    if (m != Membership::forced_in) e.value = best(idx + 1, node);
    if (m != Membership::forced_out) {
      if (auto next = extend(idx, node)) {
        const int with = best(idx + 1, *next);
        if (with >= 0 && with + 1 >= e.value) e = {with + 1, true};
      }
    }
    if (e.value < 0) e = {kInfeasible, false};
    memo_.emplace(k, e);
    return e.value;
  }

  const Sft& sft_;
  std::array<CylinderUnion, 2> a_;
  const std::vector<std::int64_t>& window_;
  std::int64_t lo_ = 0;
  const std::vector<Membership>* status_ = nullptr;
  bool require_free_ = false;
  std::unordered_map<std::string, Entry> memo_;
};

bool better_subset(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  return a.size() != b.size() ? a.size() > b.size() : a < b;
}

/// Exhaustive search under a table map: fixing which overridden shifts join I, and
/// whether I uses the default set, turns E into a constant base set.
std::optional<std::vector<std::int64_t>> table_search(const Sft& sft, const CylinderUnion& a1,
                                                      const CylinderUnion& a2, const std::vector<std::int64_t>& f,
                                                      const TableE& t, std::size_t override_cap) {
  std::vector<std::size_t> overridden;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (t.overrides.count(f[i]) != 0) overridden.push_back(i);
  }
  if (overridden.size() > override_cap) return std::nullopt;
  SubsetSearch search(sft, a1, a2, f);
  SweepChecker checker(sft, a1, a2);
  std::vector<std::int64_t> best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << overridden.size()); ++mask) {
    CylinderUnion base = CylinderUnion::whole();
    std::vector<Membership> status(f.size(), Membership::free);
    std::vector<std::int64_t> chosen;
    for (std::size_t j = 0; j < overridden.size(); ++j) {
      const std::size_t i = overridden[j];
      if ((mask >> j) & 1U) {
        status[i] = Membership::forced_in;
        chosen.push_back(f[i]);
        base = intersect(base, t.overrides.at(f[i]), sft);
      } else {
        status[i] = Membership::forced_out;
      }
    }
    if (checker.check(base, chosen) && better_subset(chosen, best)) best = chosen;
    if (auto r = search.solve(intersect(base, t.default_set, sft), status, true)) {
      if (better_subset(*r, best)) best = std::move(*r);
    }
  }
  return best;
}

/// Stops once `enough` elements are taken.
std::vector<std::int64_t> greedy_search(const Sft& sft, const CylinderUnion& a1, const CylinderUnion& a2,
                                        const std::vector<std::int64_t>& f, const EMap& e,
                                        std::size_t enough = std::numeric_limits<std::size_t>::max()) {
  SweepChecker checker(sft, a1, a2);
  std::vector<std::int64_t> cur;
  for (auto x : f) {
    if (cur.size() >= enough) break;
    cur.push_back(x);
    if (!checker.check(e.combined(cur, sft), cur)) cur.pop_back();
  }
  return cur;
}

}  // namespace

const CylinderUnion& EMap::at(std::int64_t s) const {
  if (const auto* c = std::get_if<ConstantE>(&rep_)) return c->set;
  const auto& t = std::get<TableE>(rep_);
  const auto it = t.overrides.find(s);
  return it == t.overrides.end() ? t.default_set : it->second;
}

CylinderUnion EMap::combined(std::span<const std::int64_t> i_set, const Sft& sft) const {
  if (i_set.empty()) return CylinderUnion::whole();
  if (const auto* c = std::get_if<ConstantE>(&rep_)) return normalize(c->set, sft);
  const auto& t = std::get<TableE>(rep_);
  CylinderUnion acc = CylinderUnion::whole();
  bool uses_default = false;
  for (auto s : i_set) {
    const auto it = t.overrides.find(s);
    if (it == t.overrides.end()) {
      uses_default = true;
    } else {
      acc = intersect(acc, it->second, sft);
    }
  }
  if (uses_default) acc = intersect(acc, t.default_set, sft);
  return acc;
}

Rational EMap::min_measure(const MarkovMeasure& m) const {
  if (const auto* c = std::get_if<ConstantE>(&rep_)) return measure_of(m, normalize(c->set, m.sft()));
  const auto& t = std::get<TableE>(rep_);
  Rational lowest = measure_of(m, normalize(t.default_set, m.sft()));
  for (const auto& [s, set] : t.overrides) lowest = std::min(lowest, Rational(measure_of(m, normalize(set, m.sft()))));
  return lowest;
}

bool EMap::valid_for(const MarkovMeasure& m, double eps) const {
  return min_measure(m) >= 1 - decimal_rational(eps);
}

std::string EMap::describe() const {
  if (const auto* c = std::get_if<ConstantE>(&rep_)) return "const " + c->set.to_string();
  const auto& t = std::get<TableE>(rep_);
  std::ostringstream os;
  os << "table default " << t.default_set.to_string();
  for (const auto& [s, set] : t.overrides) os << "; " << s << " -> " << set.to_string();
  return os.str();
}

bool is_independence_set(const Sft& sft, const CylinderUnion& a1, const CylinderUnion& a2,
                         std::span<const std::int64_t> i_set, const EMap& e, std::size_t sigma_cap) {
  const auto sorted = sorted_unique(i_set);
  if (sorted.size() > sigma_cap) {
    throw CapExceeded("independence set of size " + std::to_string(sorted.size()) + " exceeds sigma cap " +
                      std::to_string(sigma_cap));
  }
  SweepChecker checker(sft, normalize(a1, sft), normalize(a2, sft));
  return checker.check(e.combined(sorted, sft), sorted);
}

IndependenceReport max_independence_subset(const Sft& sft, const CylinderUnion& a1, const CylinderUnion& a2,
                                           std::span<const std::int64_t> window, const EMap& e,
                                           std::size_t exhaustive_cap) {
  const auto f = sorted_unique(window);
  if (f.empty()) throw InvalidArgument("independence window must be nonempty");
  const CylinderUnion n1 = normalize(a1, sft), n2 = normalize(a2, sft);
  IndependenceReport r;
  r.window = f;
  r.e_map = e.describe();
  r.exhaustive = f.size() <= exhaustive_cap;
  if (r.exhaustive) {
    if (const auto* c = std::get_if<ConstantE>(&e.rep())) {
      SubsetSearch search(sft, n1, n2, f);
      r.best_i = *search.solve(c->set, std::vector<Membership>(f.size(), Membership::free), false);
    } else if (auto best = table_search(sft, n1, n2, f, std::get<TableE>(e.rep()), kTableOverrideCap)) {
      r.best_i = std::move(*best);
    } else {
      r.exhaustive = false;
    }
  }
  if (!r.exhaustive) r.best_i = greedy_search(sft, n1, n2, f, e);
  r.ratio = Rational(static_cast<long>(r.best_i.size()), static_cast<long>(f.size()));
  r.ratio.canonicalize();
  return r;
}

std::vector<IndependenceReport> independence_density_profile(const Sft& sft, const MarkovMeasure& /*m*/,
                                                             const CylinderUnion& a1, const CylinderUnion& a2,
                                                             std::span<const std::int64_t> n_list,
                                                             std::span<const EMap> e_family) {
  if (e_family.empty()) throw InvalidArgument("E-family must be nonempty");
  std::vector<IndependenceReport> out;
  for (auto n : n_list) {
    if (n < 1) throw InvalidArgument("window sizes must be >= 1");
    std::vector<std::int64_t> f(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) f[static_cast<std::size_t>(i)] = i;
    std::optional<IndependenceReport> worst;
    for (const auto& e : e_family) {
      auto r = max_independence_subset(sft, a1, a2, f, e);
      if (!worst || r.ratio < worst->ratio) worst = std::move(r);
    }
    out.push_back(std::move(*worst));
  }
  return out;
}

EMap bad_constant_e(const MarkovMeasure& m, std::int64_t s, std::int64_t t, const CylinderUnion& ux,
                    const CylinderUnion& uy) {
  const Resolution r = resolve_constraints({{s, ux}, {t, uy}}, m.sft());
  return EMap::constant(r.nonempty() ? complement(r.set, m.sft()) : CylinderUnion::whole());
}

CylinderUnion neighbourhood(const Sft& sft, const PointRep& x, std::int64_t depth) {
  if (depth < 0) throw InvalidArgument("depth must be >= 0");
  return normalize(CylinderUnion::from_cylinder(Cylinder::make(sft, -depth, x.window(-depth, depth))), sft);
}

std::vector<EMap> random_table_maps(const MarkovMeasure& m, std::size_t count, std::uint64_t seed,
                                    std::int64_t window) {
  if (window < 1) throw InvalidArgument("window must be >= 1");
  const Sft& sft = m.sft();
  const std::vector<Word> words = sft.admissible_words(6);
  auto rng = make_engine(seed);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::uniform_int_distribution<std::int64_t> start(-2, 8), shift(0, window - 1);
  std::uniform_int_distribution<int> n_overrides(0, 3);
  auto hole = [&] {
    CylinderUnion c;
    for (int tries = 0; tries < 64; ++tries) {
      c = CylinderUnion::from_words(start(rng), {words[pick(rng)]});
      if (measure_of(m, c) <= Rational(1, 64)) break;
    }
    return complement(c, sft);
  };
  std::vector<EMap> out;
  for (std::size_t i = 0; i < count; ++i) {
    CylinderUnion def = hole();
    std::map<std::int64_t, CylinderUnion> overrides;
    const int k = n_overrides(rng);
    for (int j = 0; j < k; ++j) overrides[shift(rng)] = hole();
    out.push_back(EMap::table(std::move(def), std::move(overrides)));
  }
  return out;
}

Verdict classify_in_pair(const Sft& sft, const MarkovMeasure& m, const PointRep& x, const PointRep& y,
                         std::int64_t depth, const InParams& params) {
  if (depth < 0) throw InvalidArgument("depth must be >= 0");
  if (agree_on(x, y, -depth, depth)) {
    throw InvalidArgument("x and y agree on [-" + std::to_string(depth) + ", " + std::to_string(depth) + "]");
  }
  if (params.eps_grid.empty() || params.n_list.empty()) throw InvalidArgument("eps grid and N list must be nonempty");
  const double max_eps = *std::max_element(params.eps_grid.begin(), params.eps_grid.end());

  Verdict v;
  v.params = {{"c_min", std::to_string(params.c_min)},
              {"depth", std::to_string(depth)},
              {"extras", std::to_string(params.extras.size())},
              {"n_list", join_ints(params.n_list)},
              {"ra_bound", std::to_string(params.ra_bound)}};
  v.eps_certified = max_eps;
  bool all_pass = true, any_undecided = false;

  for (std::int64_t d = 0; d <= depth; ++d) {
    const CylinderUnion ux = neighbourhood(sft, x, d), uy = neighbourhood(sft, y, d);
    struct Candidate {
      EMap e;
      Rational measure;
      std::vector<IndependenceReport> profile;
      Rational floor;
      bool exhaustive = true;
      /// Extras only need greedy to reach c_min; their floor is then a lower bound.
      bool truncated = false;
    };
    std::vector<Candidate> candidates;
    auto consider = [&](EMap e) {
      Rational mu = e.min_measure(m);
      if (mu < 1 - decimal_rational(max_eps)) return;
      candidates.push_back({std::move(e), std::move(mu), {}, 0, true});
    };
    consider(EMap::whole());
    for (std::int64_t s = 0; s <= params.ra_bound; ++s) {
      for (std::int64_t t = 0; t <= params.ra_bound; ++t) {
        if (s != t) consider(bad_constant_e(m, s, t, ux, uy));
      }
    }
    const std::size_t base_count = candidates.size();
    for (const auto& e : params.extras) consider(e);

    // A greedy independence set certifies ratio >= c_min on its own; only windows
    // where greedy falls short need the exact search, so negative decisions stay exact.
    // Candidates are visited by decreasing measure: once one fails exactly, every eps a
    // smaller-measure candidate qualifies for is already decided, so it is skipped.
    const Rational c_min = decimal_rational(params.c_min);
    std::vector<std::size_t> order(candidates.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return candidates[a].measure > candidates[b].measure; });
    std::vector<bool> skipped(candidates.size(), false);
    bool exact_fail_seen = false;
    for (std::size_t k : order) {
      auto& c = candidates[k];
      if (exact_fail_seen) {
        skipped[k] = true;
        continue;
      }
      c.floor = 1;
      for (auto n : params.n_list) {
        if (n < 1) throw InvalidArgument("window sizes must be >= 1");
        std::vector<std::int64_t> f(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) f[static_cast<std::size_t>(i)] = i;
        IndependenceReport r;
        r.window = f;
        r.e_map = c.e.describe();
        std::size_t enough = std::numeric_limits<std::size_t>::max();
        if (k >= base_count) {
          // Smallest k with k / n >= c_min.
          const Rational scaled = c_min * Rational(static_cast<long>(n));
          mpz_class need = scaled.get_num() / scaled.get_den();
          if (need * scaled.get_den() < scaled.get_num()) need += 1;
          enough = static_cast<std::size_t>(need.get_ui());
          c.truncated = true;
        }
        r.best_i = greedy_search(sft, ux, uy, f, c.e, enough);
        r.ratio = Rational(static_cast<long>(r.best_i.size()), static_cast<long>(n));
        r.ratio.canonicalize();
        r.exhaustive = false;
        if (r.ratio < c_min) r = max_independence_subset(sft, ux, uy, f, c.e);
        c.floor = std::min(c.floor, r.ratio);
        const bool failed = r.ratio < c_min;
        if (failed) c.exhaustive = c.exhaustive && r.exhaustive;
        c.profile.push_back(std::move(r));
        if (failed && c.exhaustive) {
          exact_fail_seen = true;
          break;
        }
      }
    }

    double level_eps = 0.0;
    const Candidate* level_worst = nullptr;
    bool undecided = false;
    for (double eps : params.eps_grid) {
      const Rational need = 1 - decimal_rational(eps);
      const Candidate* worst = nullptr;
      bool decided_fail = false, open_fail = false;
      for (std::size_t k = 0; k < candidates.size(); ++k) {
        const auto& c = candidates[k];
        if (skipped[k] || c.measure < need) continue;
        if (!c.truncated && (!worst || c.floor < worst->floor)) worst = &c;
        if (c.floor < c_min) (c.exhaustive ? decided_fail : open_fail) = true;
      }
      if (!decided_fail && !open_fail) {
        if (eps > level_eps) {
          level_eps = eps;
          level_worst = worst;
        }
      } else if (!decided_fail) {
        undecided = true;
      }
    }

    if (level_worst) {
      const auto& last = level_worst->profile.back();
      Witness w;
      w.label = "level " + std::to_string(d) + ": c=" + to_fraction_string(level_worst->floor) +
                " N=" + std::to_string(last.window.size()) + " E=" + level_worst->e.describe();
      w.points = {x.describe(), y.describe()};
      w.shifts = last.best_i;
      w.density = to_double(level_worst->floor);
      w.target = level_worst->floor;
      v.witnesses.push_back(std::move(w));
      v.eps_certified = std::min(v.eps_certified, level_eps);
    } else {
      all_pass = false;
      any_undecided = any_undecided || undecided;
      v.note = "level " + std::to_string(d) + " has no eps with ratio floor >= c_min";
    }
  }

  if (all_pass) {
    v.classification = Classification::positive;
  } else {
    v.classification = any_undecided ? Classification::inconclusive : Classification::negative;
    v.eps_certified = 0.0;
    v.witnesses.clear();
  }
  return v;
}

}  // namespace seqent
