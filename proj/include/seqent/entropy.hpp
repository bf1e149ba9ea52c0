#pragma once

#include <cstdint>
#include <vector>

#include "seqent/cylinder.hpp"
#include "seqent/folner.hpp"
#include "seqent/measure.hpp"
#include "seqent/verdict.hpp"

namespace seqent {

/// A finite partition of the subshift into cylinder unions. Entropies are in nats.
class Partition;
using SequenceS = std::vector<std::int64_t>;
inline constexpr int kDefaultJoinCap = 14;
Partition join_under_sequence(const MarkovMeasure& m, const Partition& p, const SequenceS& s, int join_cap);

class Partition {
 public:
  /// Checks exact pairwise disjointness, nonempty atoms and total measure 1.
  static Partition make(const MarkovMeasure& m, std::vector<CylinderUnion> atoms);
  /// {[a]_0 : a in the alphabet}.
  static Partition generators(const MarkovMeasure& m);
  /// {b, b^c}.
  static Partition two_set(const MarkovMeasure& m, const CylinderUnion& b);

  const std::vector<CylinderUnion>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

 private:
  friend Partition join_under_sequence(const MarkovMeasure&, const Partition&, const SequenceS&, int);
  explicit Partition(std::vector<CylinderUnion> atoms) : atoms_(std::move(atoms)) {}
  std::vector<CylinderUnion> atoms_;
};

/// Checks that s is strictly increasing and nonnegative.
void validate_sequence(const SequenceS& s);

/// H = -sum mu(A) log mu(A), grouping atoms of equal exact measure.
double shannon_entropy(const MarkovMeasure& m, const Partition& p);

/// The nonempty atoms of T^{-s_0}P v ... v T^{-s_{n-1}}P.
/// Throws CapExceeded when |s| > join_cap or the join has more than 2^join_cap atoms.
Partition join_under_sequence(const MarkovMeasure& m, const Partition& p, const SequenceS& s,
                              int join_cap = kDefaultJoinCap);

struct EntropyRow {
  std::int64_t n = 0;
  double h = 0.0;
  double h_per_n = 0.0;
};

struct EntropyProfile {
  std::vector<EntropyRow> rows;
  /// Atom measures were exact rationals; only the logarithms are floating point.
  bool exact_measures = true;
};

/// H_n and H_n / n for every prefix of s.
EntropyProfile sequence_entropy_profile(const MarkovMeasure& m, const Partition& p, const SequenceS& s,
                                        int join_cap = kDefaultJoinCap);

/// Size of the greedy eps-separated subset of {1_{T^{-s} base} : 0 <= s < horizon} in L^2(mu),
/// scanning s upward. Separation means distance strictly greater than eps.
std::int64_t separation_count(const MarkovMeasure& m, const CylinderUnion& base, std::int64_t horizon, double eps);

/// Tail-max estimate of d_f(x, y) for f = 1_b.
double df_estimate(const PointRep& x, const PointRep& y, const CylinderUnion& b, const FolnerWindows& windows,
                   std::int64_t n_max, double tail_fraction = kDefaultTailFraction);

/// Monte Carlo settings shared by the witness searches.
struct SearchParams {
  std::vector<double> eps_grid = default_eps_grid();
  /// Required margin between an empirical density and a certified eps.
  double tol = 0.02;
  /// Orbit length for density estimates.
  std::int64_t horizon = 10000;
  /// Longest wait for the first entry of a sampled point into a target set.
  std::int64_t entry_horizon = 10000;
  int attempts = 4;
  std::uint64_t seed = 1;
  double tail_fraction = kDefaultTailFraction;
};

/// Cylinders [w]_0 over all admissible words with 1 <= |w| <= max_len and positive measure.
std::vector<CylinderUnion> cylinder_cells(const MarkovMeasure& m, std::size_t max_len);

/// For every cell A, searches sampled p, q in A with upper density of
/// {s : T^s p in b, T^s q not in b} above eps.
Verdict ms_function_test(const MarkovMeasure& m, const CylinderUnion& b, const std::vector<CylinderUnion>& cells,
                         const SearchParams& params);

struct CrosscheckParams {
  SearchParams search;
  std::size_t cell_length = 2;
  std::int64_t separation_horizon = 64;
  /// Length of the greedy sequence and the window of candidate next times.
  std::int64_t greedy_length = 10;
  std::int64_t greedy_window = 8;
  double entropy_increment_floor = 0.01;
};

struct HmsHapReport {
  bool sensitive = false;
  bool separation_grows = false;
  std::int64_t count_half = 0;
  std::int64_t count_full = 0;
  double separation_eps = 0.0;
  bool entropy_positive = false;
  SequenceS greedy_s;
  EntropyProfile greedy_profile;
  Verdict ms;
  bool agree = false;
};

/// Mean sensitivity of 1_b against non-compactness of its orbit and positive entropy along a greedy S.
HmsHapReport crosscheck_hms_hap(const MarkovMeasure& m, const CylinderUnion& b, const CrosscheckParams& params);

/// Greedy S from 0: each next time maximizes the entropy increment of the join, earliest on ties.
SequenceS greedy_entropy_sequence(const MarkovMeasure& m, const Partition& p, std::int64_t length,
                                  std::int64_t window, int join_cap = kDefaultJoinCap);

}  // namespace seqent
