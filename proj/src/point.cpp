#include "seqent/point.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "seqent/error.hpp"

namespace seqent {
namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

void check_letters(const Sft& sft, const Word& w, const char* what) {
  for (Symbol s : w) {
    if (s >= sft.alphabet_size()) {
      throw InvalidArgument(std::string("PointRep: letter out of alphabet in ") + what);
    }
  }
}

void check_transition(const Sft& sft, Symbol a, Symbol b, const char* where) {
  if (!sft.allowed(a, b)) {
    throw InvalidArgument(std::string("PointRep: forbidden transition ") + std::to_string(a) + "->" +
                          std::to_string(b) + " at " + where);
  }
}

Symbol evaluate(const EventuallyPeriodic& p, std::int64_t n) {
  const std::int64_t m = n - p.anchor;
  const auto core_len = static_cast<std::int64_t>(p.core.size());
  if (m >= 0 && m < core_len) return p.core[static_cast<std::size_t>(m)];
  if (m >= core_len) {
    return p.right_period[static_cast<std::size_t>((m - core_len) % static_cast<std::int64_t>(p.right_period.size()))];
  }
  return p.left_period[static_cast<std::size_t>(floor_mod(m, static_cast<std::int64_t>(p.left_period.size())))];
}

}  // namespace

PointRep PointRep::eventually_periodic(const Sft& sft, Word left_period, Word core, Word right_period) {
  if (left_period.empty() || right_period.empty()) {
    throw InvalidArgument("PointRep: periods must be nonempty words");
  }
  check_letters(sft, left_period, "left period");
  check_letters(sft, core, "core");
  check_letters(sft, right_period, "right period");
  if (!sft.admissible(left_period)) throw InvalidArgument("PointRep: left period is not admissible");
  if (!sft.admissible(core)) throw InvalidArgument("PointRep: core is not admissible");
  if (!sft.admissible(right_period)) throw InvalidArgument("PointRep: right period is not admissible");
  check_transition(sft, left_period.back(), left_period.front(), "left period wrap-around");
  check_transition(sft, right_period.back(), right_period.front(), "right period wrap-around");
  if (core.empty()) {
    check_transition(sft, left_period.back(), right_period.front(), "left/right junction");
  } else {
    check_transition(sft, left_period.back(), core.front(), "left/core junction");
    check_transition(sft, core.back(), right_period.front(), "core/right junction");
  }
  return PointRep(EventuallyPeriodic{std::move(left_period), std::move(core), std::move(right_period), 0});
}

PointRep PointRep::periodic(const Sft& sft, Word period) {
  Word copy = period;
  return eventually_periodic(sft, std::move(copy), {}, std::move(period));
}

PointRep PointRep::sampled(const Sft& sft, std::int64_t lo, std::vector<Symbol> symbols, std::uint64_t seed) {
  if (symbols.empty()) throw InvalidArgument("PointRep: sampled window must be nonempty");
  check_letters(sft, symbols, "sampled window");
  if (!sft.admissible(symbols)) throw InvalidArgument("PointRep: sampled window is not admissible");
  return PointRep(SampledWindow{lo, std::make_shared<const std::vector<Symbol>>(std::move(symbols)), seed});
}

Symbol PointRep::at(std::int64_t n) const {
  if (const auto* ep = std::get_if<EventuallyPeriodic>(&rep_)) return evaluate(*ep, n);
  const auto& sw = std::get<SampledWindow>(rep_);
  if (n < sw.lo || n > sw.hi()) {
    throw WindowExceeded("coordinate " + std::to_string(n) + " outside sampled window [" + std::to_string(sw.lo) +
                         ", " + std::to_string(sw.hi()) + "]");
  }
  return (*sw.symbols)[static_cast<std::size_t>(n - sw.lo)];
}

bool PointRep::evaluable(std::int64_t lo, std::int64_t hi) const noexcept {
  const auto range = evaluable_range();
  if (!range || lo > hi) return true;
  return lo >= range->first && hi <= range->second;
}

std::optional<std::pair<std::int64_t, std::int64_t>> PointRep::evaluable_range() const noexcept {
  if (const auto* sw = std::get_if<SampledWindow>(&rep_)) return std::make_pair(sw->lo, sw->hi());
  return std::nullopt;
}

void PointRep::fill(std::int64_t lo, std::span<Symbol> out) const {
  if (out.empty()) return;
  const std::int64_t hi = lo + static_cast<std::int64_t>(out.size()) - 1;
  if (const auto* sw = std::get_if<SampledWindow>(&rep_)) {
    if (lo < sw->lo || hi > sw->hi()) {
      throw WindowExceeded("range [" + std::to_string(lo) + ", " + std::to_string(hi) + "] outside sampled window [" +
                           std::to_string(sw->lo) + ", " + std::to_string(sw->hi()) + "]");
    }
    const auto* src = sw->symbols->data() + (lo - sw->lo);
    std::copy(src, src + out.size(), out.begin());
    return;
  }
  const auto& ep = std::get<EventuallyPeriodic>(rep_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = evaluate(ep, lo + static_cast<std::int64_t>(i));
}

std::vector<Symbol> PointRep::window(std::int64_t lo, std::int64_t hi) const {
  if (hi < lo) return {};
  std::vector<Symbol> out(static_cast<std::size_t>(hi - lo + 1));
  fill(lo, out);
  return out;
}

PointRep PointRep::shifted(std::int64_t k) const {
  if (const auto* ep = std::get_if<EventuallyPeriodic>(&rep_)) {
    EventuallyPeriodic copy = *ep;
    copy.anchor -= k;
    return PointRep(std::move(copy));
  }
  SampledWindow copy = std::get<SampledWindow>(rep_);
  copy.lo -= k;
  return PointRep(std::move(copy));
}

std::string PointRep::describe() const {
  std::ostringstream out;
  if (const auto* ep = std::get_if<EventuallyPeriodic>(&rep_)) {
    out << "(" << format_word(ep->left_period) << ")^inf." << format_word(ep->core) << ".(" << format_word(ep->right_period)
        << ")^inf@" << ep->anchor;
  } else {
    const auto& sw = std::get<SampledWindow>(rep_);
    out << "sample[seed=" << sw.seed << ",lo=" << sw.lo << ",hi=" << sw.hi() << "]";
  }
  return out.str();
}

std::optional<bool> exactly_equal(const PointRep& x, const PointRep& y) {
  const auto* a = std::get_if<EventuallyPeriodic>(&x.rep());
  const auto* b = std::get_if<EventuallyPeriodic>(&y.rep());
  if (a == nullptr || b == nullptr) return std::nullopt;
  // Past both cores each point is periodic, so agreement over one common period settles the tails.
  const auto left = std::lcm(static_cast<std::int64_t>(a->left_period.size()), static_cast<std::int64_t>(b->left_period.size()));
  const auto right =
      std::lcm(static_cast<std::int64_t>(a->right_period.size()), static_cast<std::int64_t>(b->right_period.size()));
  const std::int64_t lo = std::min(a->anchor, b->anchor) - left;
  const std::int64_t hi = std::max(a->anchor + static_cast<std::int64_t>(a->core.size()),
                                   b->anchor + static_cast<std::int64_t>(b->core.size())) + right;
  return agree_on(x, y, lo, hi);
}

Distance metric_distance(const PointRep& x, const PointRep& y, std::int64_t horizon) {
  if (horizon < 0) throw InvalidArgument("metric_distance: horizon must be nonnegative");
  if (exactly_equal(x, y).value_or(false)) return {0.0, false};
  for (std::int64_t n = 0; n <= horizon; ++n) {
    if (x.at(n) != y.at(n) || x.at(-n) != y.at(-n)) return {std::ldexp(1.0, static_cast<int>(-n)), false};
  }
  return {std::ldexp(1.0, static_cast<int>(-horizon - 1)), true};
}

bool agree_on(const PointRep& x, const PointRep& y, std::int64_t lo, std::int64_t hi) {
  for (std::int64_t n = lo; n <= hi; ++n) {
    if (x.at(n) != y.at(n)) return false;
  }
  return true;
}

}  // namespace seqent
