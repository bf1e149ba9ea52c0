#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seqent/rational.hpp"

namespace seqent {

enum class Classification { positive, negative, inconclusive };

inline const char* to_string(Classification c) noexcept {
  switch (c) {
    case Classification::positive:
      return "positive";
    case Classification::negative:
      return "negative";
    case Classification::inconclusive:
      return "inconclusive";
  }
  return "?";
}

/// One piece of evidence: the points involved, the shifts used and the density seen.
struct Witness {
  std::string label;
  std::vector<std::string> points;
  std::vector<std::int64_t> shifts;
  double density = 0.0;
  /// The exact value the empirical density estimates, when one is known.
  std::optional<Rational> target;
};

struct Verdict {
  Classification classification = Classification::negative;
  double eps_certified = 0.0;
  std::vector<Witness> witnesses;
  /// Parameter snapshot; ordered so that reports are reproducible.
  std::map<std::string, std::string> params;
  std::string note;

  bool positive() const noexcept { return classification == Classification::positive; }
  /// Positive verdicts carry eps > 0 and at least one witness.
  bool well_formed() const noexcept {
    return classification != Classification::positive || (eps_certified > 0.0 && !witnesses.empty());
  }
};

inline const std::vector<double>& default_eps_grid() {
  static const std::vector<double> grid{0.5, 0.2, 0.1, 0.05, 0.02};
  return grid;
}

/// Largest grid value e with value - tol > e, or 0 when none qualifies.
inline double certify_on_grid(double value, double tol, const std::vector<double>& grid) {
  double best = 0.0;
  for (double e : grid) {
    if (value - tol > e && e > best) best = e;
  }
  return best;
}

}  // namespace seqent
