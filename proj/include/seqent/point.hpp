#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "seqent/sft.hpp"

namespace seqent {

/// ... left_period left_period core right_period right_period ...
///
/// `core` occupies coordinates [anchor, anchor + |core|). The left period fills
/// the coordinates before the core (its last letter sits at anchor - 1) and the
/// right period fills the coordinates after it. Freshly built points have
/// anchor 0; shifting moves the anchor.
struct EventuallyPeriodic {
  Word left_period;
  Word core;
  Word right_period;
  std::int64_t anchor = 0;
};

/// A finite window [lo, lo + |symbols|) of a sampled point. Reading outside the
/// window is an error. The symbol buffer is shared between shifted copies.
struct SampledWindow {
  std::int64_t lo = 0;
  std::shared_ptr<const std::vector<Symbol>> symbols;
  std::uint64_t seed = 0;

  std::int64_t hi() const noexcept { return lo + static_cast<std::int64_t>(symbols->size()) - 1; }
};

/// A point of a subshift that supports exact coordinate evaluation.
///
/// The shift acts by (T^k x)_n = x_{n+k}.
class PointRep {
 public:
  static PointRep eventually_periodic(const Sft& sft, Word left_period, Word core, Word right_period);
  /// The bi-infinite periodic point with x_n = period[n mod |period|].
  static PointRep periodic(const Sft& sft, Word period);
  static PointRep sampled(const Sft& sft, std::int64_t lo, std::vector<Symbol> symbols, std::uint64_t seed);

  Symbol at(std::int64_t n) const;
  bool evaluable(std::int64_t lo, std::int64_t hi) const noexcept;
  /// Inclusive evaluable range, or nullopt when every coordinate is evaluable.
  std::optional<std::pair<std::int64_t, std::int64_t>> evaluable_range() const noexcept;

  /// Writes x_lo, ..., x_{lo+|out|-1}.
  void fill(std::int64_t lo, std::span<Symbol> out) const;
  std::vector<Symbol> window(std::int64_t lo, std::int64_t hi) const;

  PointRep shifted(std::int64_t k) const;

  bool is_eventually_periodic() const noexcept { return std::holds_alternative<EventuallyPeriodic>(rep_); }
  const std::variant<EventuallyPeriodic, SampledWindow>& rep() const noexcept { return rep_; }

  std::string describe() const;

 private:
  explicit PointRep(std::variant<EventuallyPeriodic, SampledWindow> rep) : rep_(std::move(rep)) {}

  std::variant<EventuallyPeriodic, SampledWindow> rep_;
};

/// d(x, y) = 2^{-min{|n| : x_n != y_n}}; flagged `truncated` when no disagreement
/// is found within the horizon, in which case `value` is the bound 2^{-horizon-1}.
struct Distance {
  double value = 0.0;
  bool truncated = false;
};

/// Exact equality test for two eventually periodic points; nullopt if either is sampled.
std::optional<bool> exactly_equal(const PointRep& x, const PointRep& y);

/// Equal eventually periodic points are at distance exactly 0.
Distance metric_distance(const PointRep& x, const PointRep& y, std::int64_t horizon);

/// True if x and y agree on every coordinate of [lo, hi].
bool agree_on(const PointRep& x, const PointRep& y, std::int64_t lo, std::int64_t hi);

}  // namespace seqent
