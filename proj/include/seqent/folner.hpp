#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <optional>

#include "seqent/cylinder.hpp"
#include "seqent/measure.hpp"
#include "seqent/point.hpp"
#include "seqent/rational.hpp"

namespace seqent {

/// A rule n -> F_n of finite averaging windows in Z, for n >= 1.
class FolnerWindows {
 public:
  using Rule = std::function<std::vector<std::int64_t>(std::int64_t)>;

  /// F_n = {0, ..., n-1}.
  static FolnerWindows canonical();
  static FolnerWindows from_rule(std::string name, Rule rule);

  bool is_canonical() const noexcept { return canonical_; }
  const std::string& name() const noexcept { return name_; }
  /// Sorted, duplicate-free F_n. Throws InvalidArgument for an empty window or n < 1.
  std::vector<std::int64_t> window(std::int64_t n) const;

 private:
  FolnerWindows(std::string name, Rule rule, bool canonical)
      : name_(std::move(name)), rule_(std::move(rule)), canonical_(canonical) {}

  std::string name_;
  Rule rule_;
  bool canonical_;
};

/// Tail extremes of |S cap F_n| / |F_n| over n in [ceil(tail_fraction n_max), n_max].
struct DensityEstimate {
  double lower = 0.0;
  double upper = 0.0;
  Rational lower_exact;
  Rational upper_exact;
  std::int64_t n_max = 0;
  double tail_fraction = 0.5;
  /// The indicator was detected to be periodic on the tail; lower = upper = its frequency.
  bool periodic = false;
  std::int64_t detected_period = 0;
};

inline constexpr double kDefaultTailFraction = 0.5;
inline constexpr std::int64_t kDefaultDensityHorizon = 100000;

/// Density of a 0/1 indicator sequence over the canonical windows, n_max = flags.size().
DensityEstimate density_of_flags(std::span<const std::uint8_t> flags, double tail_fraction = kDefaultTailFraction);

/// Density of {n : pred(n)} along the windows.
DensityEstimate density(const std::function<bool(std::int64_t)>& pred, const FolnerWindows& windows,
                        std::int64_t n_max, double tail_fraction = kDefaultTailFraction);

/// max over 1 < n <= n_max of |U_{k<n} (-F_k) + F_n| / |F_n|.
double temperedness_constant(const FolnerWindows& windows, std::int64_t n_max);

/// flags[s] = 1 iff T^{first + s} p lies in `set`, for s in [0, count).
/// Pattern matching runs through the runtime-selected kernels.
std::vector<std::uint8_t> orbit_indicator(const PointRep& p, const CylinderUnion& set, std::int64_t first,
                                          std::size_t count);

struct EntrySample {
  PointRep point;
  std::int64_t entry = 0;
};

/// First s in [0, entry_horizon] with T^s p in `set`, or nullopt.
std::optional<std::int64_t> first_entry_time(const PointRep& p, const CylinderUnion& set, std::int64_t entry_horizon);

/// Samples z on [lo, hi] and returns T^e z for its first entry time e into `set`.
/// The caller picks [lo, hi] wide enough for the entry scan and later use of the point.
std::optional<EntrySample> sample_entry(const MarkovMeasure& m, const CylinderUnion& set, std::int64_t lo,
                                        std::int64_t hi, std::int64_t entry_horizon, std::uint64_t seed);

/// (1/|F_n|) sum_{s in F_n} 1_set(T^s p), exactly.
Rational birkhoff_average(const PointRep& p, const CylinderUnion& set, const FolnerWindows& windows, std::int64_t n);

}  // namespace seqent
