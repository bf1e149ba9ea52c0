#include "seqent/folner.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "seqent/error.hpp"
#include "seqent/kernels.hpp"

namespace seqent {
namespace {

/// Smallest p <= tail/4 such that flags is p-periodic on its second half, or 0.
std::int64_t tail_period(std::span<const std::uint8_t> flags) {
  const std::size_t n = flags.size();
  const std::size_t start = n / 2;
  const std::size_t tail = n - start;
  for (std::size_t p = 1; p <= tail / 4; ++p) {
    bool ok = true;
    for (std::size_t i = start; i + p < n && ok; ++i) ok = flags[i] == flags[i + p];
    if (ok) return static_cast<std::int64_t>(p);
  }
  return 0;
}

std::vector<std::int64_t> minkowski_union(const std::vector<std::vector<std::int64_t>>& negated,
                                          const std::vector<std::int64_t>& fn) {
  std::unordered_set<std::int64_t> out;
  for (const auto& neg : negated) {
    for (auto a : neg) {
      for (auto b : fn) out.insert(a + b);
    }
  }
  return {out.begin(), out.end()};
}

bool contiguous(const std::vector<std::int64_t>& w) { return w.back() - w.front() + 1 == static_cast<std::int64_t>(w.size()); }

}  // namespace

FolnerWindows FolnerWindows::canonical() {
  return FolnerWindows(
      "canonical",
      [](std::int64_t n) {
        std::vector<std::int64_t> w(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = i;
        return w;
      },
      true);
}

FolnerWindows FolnerWindows::from_rule(std::string name, Rule rule) {
  return FolnerWindows(std::move(name), std::move(rule), false);
}

std::vector<std::int64_t> FolnerWindows::window(std::int64_t n) const {
  if (n < 1) throw InvalidArgument("Folner window index must be >= 1");
  std::vector<std::int64_t> w = rule_(n);
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  if (w.empty()) throw InvalidArgument("Folner window F_" + std::to_string(n) + " is empty");
  return w;
}

DensityEstimate density_of_flags(std::span<const std::uint8_t> flags, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw InvalidArgument("tail_fraction must lie in (0, 1]");
  const auto n_max = static_cast<std::int64_t>(flags.size());
  if (n_max < 1) throw InvalidArgument("density needs at least one window");
  DensityEstimate est;
  est.n_max = n_max;
  est.tail_fraction = tail_fraction;
  const std::int64_t first = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(tail_fraction * static_cast<double>(n_max))));

  std::int64_t count = 0;
  std::int64_t best_hi_c = -1, best_hi_n = 1, best_lo_c = -1, best_lo_n = 1;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    count += flags[static_cast<std::size_t>(n - 1)];
    if (n < first) continue;
    // Exact comparison of count/n against the running extremes.
    if (best_hi_c < 0 || count * best_hi_n > best_hi_c * n) {
      best_hi_c = count;
      best_hi_n = n;
    }
    if (best_lo_c < 0 || count * best_lo_n < best_lo_c * n) {
      best_lo_c = count;
      best_lo_n = n;
    }
  }
  est.upper_exact = Rational(best_hi_c, best_hi_n);
  est.lower_exact = Rational(best_lo_c, best_lo_n);
  est.upper_exact.canonicalize();
  est.lower_exact.canonicalize();

  if (n_max >= 8) {
    if (const std::int64_t p = tail_period(flags); p > 0) {
      std::int64_t ones = 0;
      for (std::int64_t i = n_max - p; i < n_max; ++i) ones += flags[static_cast<std::size_t>(i)];
      Rational freq(ones, p);
      freq.canonicalize();
      est.periodic = true;
      est.detected_period = p;
      est.upper_exact = freq;
      est.lower_exact = freq;
    }
  }
  est.upper = to_double(est.upper_exact);
  est.lower = to_double(est.lower_exact);
  return est;
}

DensityEstimate density(const std::function<bool(std::int64_t)>& pred, const FolnerWindows& windows,
                        std::int64_t n_max, double tail_fraction) {
  if (n_max < 10) throw InvalidArgument("density: n_max must be at least 10");
  if (windows.is_canonical()) {
    std::vector<std::uint8_t> flags(static_cast<std::size_t>(n_max));
    for (std::int64_t i = 0; i < n_max; ++i) flags[static_cast<std::size_t>(i)] = pred(i) ? 1 : 0;
    return density_of_flags(flags, tail_fraction);
  }
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw InvalidArgument("tail_fraction must lie in (0, 1]");
  DensityEstimate est;
  est.n_max = n_max;
  est.tail_fraction = tail_fraction;
  const std::int64_t first = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(tail_fraction * static_cast<double>(n_max))));
  bool have = false;
  for (std::int64_t n = first; n <= n_max; ++n) {
    const auto w = windows.window(n);
    std::int64_t c = 0;
    for (auto s : w) c += pred(s) ? 1 : 0;
    Rational r(c, static_cast<long>(w.size()));
    r.canonicalize();
    if (!have || r > est.upper_exact) est.upper_exact = r;
    if (!have || r < est.lower_exact) est.lower_exact = r;
    have = true;
  }
  est.upper = to_double(est.upper_exact);
  est.lower = to_double(est.lower_exact);
  return est;
}

double temperedness_constant(const FolnerWindows& windows, std::int64_t n_max) {
  if (n_max < 2) throw InvalidArgument("temperedness_constant: n_max must be at least 2");
  double worst = 0.0;
  std::vector<std::vector<std::int64_t>> negated;
  bool all_intervals = true;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const auto fn = windows.window(n);
    if (n > 1) {
      std::size_t size = 0;
      if (all_intervals && contiguous(fn)) {
        // Every (-F_k) + F_n is an interval; merge them.
        std::vector<std::pair<std::int64_t, std::int64_t>> pieces;
        for (const auto& neg : negated) pieces.emplace_back(neg.front() + fn.front(), neg.back() + fn.back());
        std::sort(pieces.begin(), pieces.end());
        std::int64_t cur_lo = pieces[0].first, cur_hi = pieces[0].second;
        for (std::size_t i = 1; i < pieces.size(); ++i) {
          if (pieces[i].first > cur_hi + 1) {
            size += static_cast<std::size_t>(cur_hi - cur_lo + 1);
            cur_lo = pieces[i].first;
          }
          cur_hi = std::max(cur_hi, pieces[i].second);
        }
        size += static_cast<std::size_t>(cur_hi - cur_lo + 1);
      } else {
        size = minkowski_union(negated, fn).size();
      }
      worst = std::max(worst, static_cast<double>(size) / static_cast<double>(fn.size()));
    }
    std::vector<std::int64_t> neg(fn.rbegin(), fn.rend());
    for (auto& v : neg) v = -v;
    all_intervals = all_intervals && contiguous(fn);
    negated.push_back(std::move(neg));
  }
  return worst;
}

std::vector<std::uint8_t> orbit_indicator(const PointRep& p, const CylinderUnion& set, std::int64_t first,
                                          std::size_t count) {
  std::vector<std::uint8_t> flags(count, 0);
  if (count == 0 || set.has_no_patterns()) return flags;
  if (set.length() == 0) {
    std::fill(flags.begin(), flags.end(), 1);
    return flags;
  }
  const std::int64_t lo = set.lo() + first;
  const std::vector<Symbol> seq = p.window(lo, set.hi() + first + static_cast<std::int64_t>(count) - 1);

  constexpr std::size_t kKernelPatternLimit = 32;
  if (set.patterns().size() <= kKernelPatternLimit) {
    bool accumulate = false;
    std::vector<kernels::Probe> probes;
    for (const Pattern& pattern : set.patterns()) {
      probes.clear();
      for (std::size_t j = 0; j < pattern.size(); ++j) {
        if (pattern[j] != ~SymbolMask{0}) probes.push_back({static_cast<std::uint32_t>(j), pattern[j]});
      }
      kernels::match_probes(seq, probes, flags, accumulate);
      accumulate = true;
    }
    return flags;
  }
  for (std::size_t s = 0; s < count; ++s) flags[s] = set.contains(p, first + static_cast<std::int64_t>(s)) ? 1 : 0;
  return flags;
}

std::optional<std::int64_t> first_entry_time(const PointRep& p, const CylinderUnion& set,
                                             std::int64_t entry_horizon) {
  if (entry_horizon < 0) throw InvalidArgument("entry horizon must be >= 0");
  constexpr std::int64_t kChunk = 4096;
  for (std::int64_t first = 0; first <= entry_horizon; first += kChunk) {
    const auto count = static_cast<std::size_t>(std::min(kChunk, entry_horizon - first + 1));
    const auto flags = orbit_indicator(p, set, first, count);
    for (std::size_t i = 0; i < count; ++i) {
      if (flags[i] != 0) return first + static_cast<std::int64_t>(i);
    }
  }
  return std::nullopt;
}

std::optional<EntrySample> sample_entry(const MarkovMeasure& m, const CylinderUnion& set, std::int64_t lo,
                                        std::int64_t hi, std::int64_t entry_horizon, std::uint64_t seed) {
  const PointRep z = sample_point(m, lo, hi, seed);
  const auto e = first_entry_time(z, set, entry_horizon);
  if (!e) return std::nullopt;
  return EntrySample{z.shifted(*e), *e};
}

Rational birkhoff_average(const PointRep& p, const CylinderUnion& set, const FolnerWindows& windows, std::int64_t n) {
  std::int64_t hits = 0, size = 0;
  if (windows.is_canonical()) {
    if (n < 1) throw InvalidArgument("Folner window index must be >= 1");
    const auto flags = orbit_indicator(p, set, 0, static_cast<std::size_t>(n));
    hits = static_cast<std::int64_t>(kernels::count_ones(flags));
    size = n;
  } else {
    const auto w = windows.window(n);
    for (auto s : w) hits += set.contains(p, s) ? 1 : 0;
    size = static_cast<std::int64_t>(w.size());
  }
  Rational r(hits, size);
  r.canonicalize();
  return r;
}

}  // namespace seqent
