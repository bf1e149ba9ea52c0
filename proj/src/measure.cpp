#include "seqent/measure.hpp"

#include <map>
#include <string>

#include "seqent/error.hpp"
#include "seqent/seeding.hpp"

namespace seqent {
namespace {

void check_stochastic(const RationalMatrix& p) {
  const std::size_t k = p.size();
  if (k == 0) throw InvalidArgument("transition matrix is empty");
  for (std::size_t a = 0; a < k; ++a) {
    if (p[a].size() != k) throw InvalidArgument("transition matrix is not square");
    Rational row_sum = 0;
    for (const auto& q : p[a]) {
      if (sgn(q) < 0) throw InvalidArgument("transition row " + std::to_string(a) + " has a negative entry");
      row_sum += q;
    }
    if (row_sum != 1) {
      throw InvalidArgument("transition row " + std::to_string(a) + " sums to " + to_fraction_string(row_sum));
    }
  }
}

bool irreducible(const RationalMatrix& p) {
  const std::size_t k = p.size();
  auto reach_all = [&](bool forward) {
    std::vector<bool> seen(k, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < k; ++b) {
        const Rational& q = forward ? p[a][b] : p[b][a];
        if (sgn(q) > 0 && !seen[b]) {
          seen[b] = true;
          stack.push_back(b);
        }
      }
    }
    for (bool s : seen) {
      if (!s) return false;
    }
    return true;
  };
  return reach_all(true) && reach_all(false);
}

Sft support_of(const RationalMatrix& p) {
  const std::size_t k = p.size();
  std::vector<std::vector<bool>> allowed(k, std::vector<bool>(k, false));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) allowed[a][b] = sgn(p[a][b]) > 0;
  }
  return Sft(static_cast<int>(k), allowed);
}

RationalVector masked(RationalVector v, SymbolMask mask) {
  for (std::size_t a = 0; a < v.size(); ++a) {
    if (!has_symbol(mask, static_cast<Symbol>(a))) v[a] = 0;
  }
  return v;
}

/// (v P) restricted to `mask`.
RationalVector advance(const RationalVector& v, const RationalMatrix& p, SymbolMask mask) {
  const std::size_t k = v.size();
  RationalVector out(k, Rational(0));
  for (std::size_t a = 0; a < k; ++a) {
    if (sgn(v[a]) == 0) continue;
    for (std::size_t b = 0; b < k; ++b) {
      if (has_symbol(mask, static_cast<Symbol>(b)) && sgn(p[a][b]) != 0) out[b] += v[a] * p[a][b];
    }
  }
  return out;
}

Rational total(const RationalVector& v) {
  Rational s = 0;
  for (const auto& q : v) s += q;
  return s;
}

Rational pattern_measure(const MarkovMeasure& m, const Pattern& pattern) {
  if (pattern.empty()) return 1;
  bool explicit_word = true;
  for (auto mask : pattern) explicit_word = explicit_word && is_singleton(mask);
  const auto& p = m.transition();
  if (explicit_word) {
    auto prev = static_cast<std::size_t>(std::countr_zero(pattern[0]));
    if (prev >= p.size()) return 0;
    Rational value = m.stationary()[prev];
    for (std::size_t i = 1; i < pattern.size() && sgn(value) != 0; ++i) {
      const auto cur = static_cast<std::size_t>(std::countr_zero(pattern[i]));
      if (cur >= p.size()) return 0;
      value *= p[prev][cur];
      prev = cur;
    }
    return value;
  }
  RationalVector v = masked(m.stationary(), pattern[0]);
  for (std::size_t i = 1; i < pattern.size(); ++i) v = advance(v, p, pattern[i]);
  return total(v);
}

/// Sum over pattern choices, one per constraint, of the measure of the merged rectangle.
class ConstraintMeasure {
 public:
  explicit ConstraintMeasure(const MarkovMeasure& m) : m_(m) {}

  Rational run(const std::vector<CylinderUnion>& sets) {
    sets_ = &sets;
    result_ = 0;
    descend(0, {});
    return result_;
  }

 private:
  void descend(std::size_t i, const std::map<std::int64_t, SymbolMask>& merged) {
    if (i == sets_->size()) {
      result_ += rectangle_measure(merged);
      return;
    }
    const CylinderUnion& u = (*sets_)[i];
    for (const Pattern& pattern : u.patterns()) {
      auto next = merged;
      bool alive = true;
      for (std::size_t j = 0; j < pattern.size() && alive; ++j) {
        const std::int64_t coord = u.lo() + static_cast<std::int64_t>(j);
        auto [it, inserted] = next.try_emplace(coord, m_.sft().all_symbols());
        it->second &= pattern[j];
        alive = it->second != 0;
      }
      if (alive) descend(i + 1, next);
    }
  }

  Rational rectangle_measure(const std::map<std::int64_t, SymbolMask>& merged) {
    if (merged.empty()) return 1;
    auto it = merged.begin();
    RationalVector v = masked(m_.stationary(), it->second);
    std::int64_t prev = it->first;
    for (++it; it != merged.end(); ++it) {
      const std::int64_t gap = it->first - prev;
      v = advance(v, gap == 1 ? m_.transition() : power(gap), it->second);
      prev = it->first;
    }
    return total(v);
  }

  const RationalMatrix& power(std::int64_t gap) {
    auto it = powers_.find(gap);
    if (it == powers_.end()) it = powers_.emplace(gap, matrix_power(m_.transition(), gap)).first;
    return it->second;
  }

  const MarkovMeasure& m_;
  const std::vector<CylinderUnion>* sets_ = nullptr;
  Rational result_;
  std::map<std::int64_t, RationalMatrix> powers_;
};

/// Symbol j is drawn when thr[j-1] <= u < thr[j], with thr[j] = floor(cum_j * 2^64).
/// A cumulative mass of 1 accepts every u.
struct Threshold {
  std::uint64_t value = 0;
  bool saturated = false;
};

std::vector<Threshold> thresholds(const RationalVector& dist) {
  std::vector<Threshold> thr;
  thr.reserve(dist.size());
  Rational cum = 0;
  for (const auto& q : dist) {
    cum += q;
    if (cum >= 1) {
      thr.push_back({0, true});
      continue;
    }
    mpz_class scaled = cum.get_num();
    scaled <<= 64;
    scaled /= cum.get_den();
    std::uint64_t value = 0;
    mpz_export(&value, nullptr, -1, sizeof(value), 0, 0, scaled.get_mpz_t());
    thr.push_back({value, false});
  }
  return thr;
}

Symbol draw(const std::vector<Threshold>& thr, std::uint64_t u) {
  for (std::size_t j = 0; j < thr.size(); ++j) {
    if (thr[j].saturated || u < thr[j].value) return static_cast<Symbol>(j);
  }
  return static_cast<Symbol>(thr.size() - 1);
}

}  // namespace

RationalVector stationary_vector(const RationalMatrix& transition) {
  check_stochastic(transition);
  if (!irreducible(transition)) throw InvalidArgument("transition graph is reducible; stationary vector not unique");
  const std::size_t k = transition.size();
  // Rows 0..k-2 of (P^T - I), then the normalization row.
  RationalMatrix a(k, RationalVector(k + 1, Rational(0)));
  for (std::size_t i = 0; i + 1 < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) a[i][j] = transition[j][i] - (i == j ? 1 : 0);
  }
  for (std::size_t j = 0; j < k; ++j) a[k - 1][j] = 1;
  a[k - 1][k] = 1;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    while (pivot < k && sgn(a[pivot][col]) == 0) ++pivot;
    if (pivot == k) throw InvalidArgument("stationary vector is not unique");
    std::swap(a[pivot], a[col]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col || sgn(a[r][col]) == 0) continue;
      const Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= k; ++c) a[r][c] -= f * a[col][c];
    }
  }
  RationalVector pi(k);
  for (std::size_t i = 0; i < k; ++i) pi[i] = a[i][k] / a[i][i];
  return pi;
}

MarkovMeasure::MarkovMeasure(Sft sft, RationalMatrix transition)
    : sft_(std::move(sft)), transition_(std::move(transition)) {
  const auto k = static_cast<std::size_t>(sft_.alphabet_size());
  if (transition_.size() != k) throw InvalidArgument("transition matrix size does not match the alphabet");
  check_stochastic(transition_);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      if (sgn(transition_[a][b]) > 0 && !sft_.allowed(static_cast<Symbol>(a), static_cast<Symbol>(b))) {
        throw InvalidArgument("transition " + std::to_string(a) + "->" + std::to_string(b) +
                              " has positive probability but is forbidden");
      }
    }
  }
  stationary_ = stationary_vector(transition_);
}

MarkovMeasure MarkovMeasure::from_transition(RationalMatrix transition) {
  check_stochastic(transition);
  Sft sft = support_of(transition);
  return MarkovMeasure(std::move(sft), std::move(transition));
}

Rational measure_of(const MarkovMeasure& m, const CylinderUnion& s) {
  Rational sum = 0;
  for (const Pattern& pattern : s.patterns()) sum += pattern_measure(m, pattern);
  return sum;
}

Rational measure_of_constraints(const MarkovMeasure& m, const ShiftedConstraintSet& c) {
  std::vector<CylinderUnion> sets;
  sets.reserve(c.size());
  for (const auto& [shift, set] : c) {
    if (set.has_no_patterns()) return 0;
    if (set.is_whole_form()) continue;
    sets.push_back(set.preimage(shift));
  }
  return ConstraintMeasure(m).run(sets);
}

Rational l2_distance_sq(const MarkovMeasure& m, const ShiftedConstraintSet& a, const ShiftedConstraintSet& b) {
  ShiftedConstraintSet both = a;
  both.insert(both.end(), b.begin(), b.end());
  return measure_of_constraints(m, a) + measure_of_constraints(m, b) - 2 * measure_of_constraints(m, both);
}

PointRep sample_point(const MarkovMeasure& m, std::int64_t lo, std::int64_t hi, std::uint64_t seed) {
  if (lo > hi) throw InvalidArgument("sample_point: lo > hi");
  const auto k = static_cast<std::size_t>(m.alphabet_size());
  const auto initial = thresholds(m.stationary());
  std::vector<std::vector<Threshold>> rows(k);
  for (std::size_t a = 0; a < k; ++a) rows[a] = thresholds(m.transition()[a]);

  auto engine = make_engine(derive_seed(seed, {static_cast<std::uint64_t>(lo), static_cast<std::uint64_t>(hi)}));
  std::vector<Symbol> symbols(static_cast<std::size_t>(hi - lo + 1));
  symbols[0] = draw(initial, engine());
  for (std::size_t i = 1; i < symbols.size(); ++i) symbols[i] = draw(rows[symbols[i - 1]], engine());
  return PointRep::sampled(m.sft(), lo, std::move(symbols), seed);
}

}  // namespace seqent
