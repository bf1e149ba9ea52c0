#pragma once

#include <cstdint>

#include "seqent/cylinder.hpp"
#include "seqent/point.hpp"
#include "seqent/rational.hpp"
#include "seqent/sft.hpp"

namespace seqent {

/// Unique probability vector pi with pi P = pi, by exact elimination.
/// Throws InvalidArgument if P is not row-stochastic or its positive-transition
/// graph is not irreducible.
RationalVector stationary_vector(const RationalMatrix& transition);

/// A stationary Markov measure on a subshift of finite type.
///
/// The stationary vector is always computed, never supplied. Irreducibility of
/// the positive-transition graph makes the shift ergodic for this measure.
class MarkovMeasure {
 public:
  MarkovMeasure(Sft sft, RationalMatrix transition);

  /// The support subshift is read off from the positive entries of P.
  static MarkovMeasure from_transition(RationalMatrix transition);

  const Sft& sft() const noexcept { return sft_; }
  const RationalMatrix& transition() const noexcept { return transition_; }
  const RationalVector& stationary() const noexcept { return stationary_; }
  int alphabet_size() const noexcept { return sft_.alphabet_size(); }

 private:
  Sft sft_;
  RationalMatrix transition_;
  RationalVector stationary_;
};

/// Exact measure of a union of disjoint rectangles; additive over patterns.
Rational measure_of(const MarkovMeasure& m, const CylinderUnion& s);

/// Exact measure of the intersection of T^{-shift} set over all constraints.
///
/// Works directly on the merged coordinate masks, bridging gaps with powers of
/// P, and never calls resolve_constraints. The two routes are oracles for each other.
Rational measure_of_constraints(const MarkovMeasure& m, const ShiftedConstraintSet& c);

/// ||1_A - 1_B||^2 = mu(A) + mu(B) - 2 mu(A cap B) in L^2(mu).
Rational l2_distance_sq(const MarkovMeasure& m, const ShiftedConstraintSet& a, const ShiftedConstraintSet& b);

/// A sampled window on [lo, hi]: x_lo ~ pi, then forward along the rows of P.
/// Depends only on (seed, lo, hi).
PointRep sample_point(const MarkovMeasure& m, std::int64_t lo, std::int64_t hi, std::uint64_t seed);

}  // namespace seqent
