#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seqent/cylinder.hpp"
#include "seqent/entropy.hpp"
#include "seqent/folner.hpp"
#include "seqent/independence.hpp"
#include "seqent/measure.hpp"
#include "seqent/panel.hpp"
#include "seqent/verdict.hpp"

namespace seqent {

/// Smallest N such that any N sets of measure >= a contain two that intersect in
/// positive measure: floor(1/a) + 1. Throws InvalidArgument unless 0 < a <= 1.
std::int64_t pigeonhole_bound(const Rational& a);

struct RAPair {
  std::int64_t s = 0;
  std::int64_t t = 0;
  Rational intersection_measure;
};

/// All 0 <= s < t <= bound with mu(T^{-s} a cap T^{-t} a) > 0, sorted by (s, t).
/// Throws Degenerate when mu(a) = 0.
std::vector<RAPair> ra_search(const MarkovMeasure& m, const CylinderUnion& a, std::int64_t bound);

/// The default grid continued down to 0.0001: neighbourhood intersections at
/// depth >= 1 have measures below the coarse grid's floor of 0.02.
const std::vector<double>& fine_eps_grid();

struct WitnessParams {
  /// eps_grid, tol (capped at eps / 2), horizon, entry_horizon, seed and
  /// tail_fraction are used; attempts is not.
  SearchParams search = [] {
    SearchParams p;
    p.eps_grid = fine_eps_grid();
    p.horizon = 100000;
    return p;
  }();
  std::int64_t ra_bound = 8;
};

/// p = T^{s+e} z and q = T^{t+e} z, where e is the first entry time of a sampled z
/// into T^{-s} a cap T^{-t} a and (s, t) is the first pair in R_a, in either
/// orientation, with mu(T^{-s} ux cap T^{-t} uy) >= eps. The density of
/// {g : T^g p in ux, T^g q in uy} estimates that measure.
Verdict find_sensitivity_witnesses(const Sft& sft, const MarkovMeasure& m, const CylinderUnion& a,
                                   const CylinderUnion& ux, const CylinderUnion& uy, double eps, std::uint64_t seed,
                                   const WitnessParams& params);

/// Mean sensitivity pair test over the neighbourhood levels 0..depth.
/// Throws InvalidArgument when x and y agree on [-depth, depth].
Verdict classify_ms_pair(const Sft& sft, const MarkovMeasure& m, const PointRep& x, const PointRep& y,
                         std::int64_t depth, const std::vector<CylinderUnion>& cells, const WitnessParams& params);

struct DiamMeanEstimate {
  /// Tail max of the window averages of diam(T^s a).
  double tail_max = 0.0;
  /// For canonical windows on an irreducible subshift the sequence diam(T^s a) is
  /// eventually periodic and its Cesaro limit is known exactly.
  bool exact = false;
  Rational exact_value;

  double value() const { return exact ? to_double(exact_value) : tail_max; }
};

DiamMeanEstimate diam_mean_profile(const Sft& sft, const MarkovMeasure& m, const CylinderUnion& a,
                                   const FolnerWindows& windows, std::int64_t n_max,
                                   double tail_fraction = kDefaultTailFraction);

/// The set of s >= 0 with a cap T^{-s} ux and a cap T^{-s} uy both nonempty.
/// Exact and periodic past a burn-in on irreducible subshifts.
DensityEstimate diam_witness_density(const Sft& sft, const CylinderUnion& a, const CylinderUnion& ux,
                                     const CylinderUnion& uy, std::int64_t n_max);

struct DiamParams {
  std::vector<double> eps_grid = default_eps_grid();
  /// Used only when the subshift is reducible and no exact period is available.
  std::int64_t n_max = 4096;
};

/// Diam-mean sensitivity pair test over the neighbourhood levels 0..depth.
Verdict classify_diam_pair(const Sft& sft, const MarkovMeasure& m, const PointRep& x, const PointRep& y,
                           std::int64_t depth, const std::vector<CylinderUnion>& cells, const DiamParams& params);

struct CrosscheckConfig {
  std::int64_t depth = 1;
  std::size_t cell_length = 2;
  InParams in;
  WitnessParams ms;
  DiamParams diam;
  std::int64_t separation_horizon = 64;
};

struct CrosscheckRow {
  std::string system;
  std::string pair;
  Verdict in;
  Verdict ms;
  Verdict diam;
  /// Separation count growth of the deepest neighbourhood of x.
  bool kushnirenko = false;
  std::int64_t count_half = 0;
  std::int64_t count_full = 0;
  bool in_equals_ms = false;
  bool in_implies_diam = false;
  bool in_implies_kushnirenko = false;
  bool agree() const noexcept { return in_equals_ms && in_implies_diam && in_implies_kushnirenko; }
};

struct SystemDiamRow {
  std::string system;
  /// min over cells of the diam-mean profile, certified on the eps grid.
  double eps_certified = 0.0;
  bool system_positive = false;
  bool some_pair_positive = false;
  bool agree() const noexcept { return system_positive == some_pair_positive; }
};

struct CrosscheckReport {
  std::vector<CrosscheckRow> rows;
  std::vector<SystemDiamRow> systems;
  std::size_t disagreements() const noexcept;
};

CrosscheckReport equivalence_crosscheck(const std::vector<PanelSystem>& panel, const CrosscheckConfig& config);

/// Finite probability space with positive weights summing to 1 and subsets of it.
struct FiniteFamily {
  std::vector<Rational> weights;
  std::vector<std::vector<bool>> sets;
};

bool family_has_overlap(const FiniteFamily& f);

/// pigeonhole_bound(a) - 1 disjoint sets of measure a, on a uniform space; needs 1/a integral.
FiniteFamily explicit_disjoint_family(const Rational& a);

/// Every trial draws pigeonhole_bound(a) random sets of measure >= a on a random
/// weighted space and finds two that overlap.
bool pigeonhole_oracle(std::int64_t trials, std::size_t space_size, const Rational& a, std::uint64_t seed);

}  // namespace seqent
