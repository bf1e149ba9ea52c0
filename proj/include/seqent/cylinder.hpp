#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seqent/point.hpp"
#include "seqent/sft.hpp"

namespace seqent {

/// [word]_start = { x : x_{start+i} = word[i] }.
///
/// A word with a forbidden transition yields an empty cylinder. The emptiness is
/// recorded, never silently normalized away.
class Cylinder {
 public:
  static Cylinder make(const Sft& sft, std::int64_t start, Word word);

  std::int64_t start() const noexcept { return start_; }
  const Word& word() const noexcept { return word_; }
  bool empty_in_sft() const noexcept { return empty_in_sft_; }

 private:
  Cylinder(std::int64_t start, Word word, bool empty) : start_(start), word_(std::move(word)), empty_in_sft_(empty) {}

  std::int64_t start_;
  Word word_;
  bool empty_in_sft_;
};

/// Per-coordinate symbol masks over the support of the owning union.
using Pattern = std::vector<SymbolMask>;

/// A finite union of cylinder-like sets over a common coordinate interval.
///
/// Patterns are pairwise disjoint rectangles: pattern p is the set of points with
/// x_{lo+i} in p[i] for every i. A union with zero-length support and one empty
/// pattern is the whole space; a union with no patterns is the empty set.
///
/// After normalize() the form is canonical whenever the set has at most
/// kCanonicalWordCap admissible words over its support: patterns are then sorted
/// explicit words and the support is the minimal interval that determines the set.
/// Larger sets keep their rectangle form and report is_canonical() == false.
class CylinderUnion {
 public:
  static constexpr std::uint64_t kCanonicalWordCap = std::uint64_t{1} << 14;

  CylinderUnion() = default;  // empty set

  static CylinderUnion whole();
  static CylinderUnion empty();
  static CylinderUnion from_cylinder(const Cylinder& c);
  /// Distinct words of equal length starting at `start`. Not normalized.
  static CylinderUnion from_words(std::int64_t start, std::vector<Word> words);
  /// Callers must pass pairwise disjoint patterns of equal length.
  static CylinderUnion from_disjoint_patterns(std::int64_t lo, std::vector<Pattern> patterns);

  std::int64_t lo() const noexcept { return lo_; }
  std::int64_t hi() const noexcept { return lo_ + static_cast<std::int64_t>(length_) - 1; }
  std::size_t length() const noexcept { return length_; }
  const std::vector<Pattern>& patterns() const noexcept { return patterns_; }
  bool is_canonical() const noexcept { return canonical_; }

  bool has_no_patterns() const noexcept { return patterns_.empty(); }
  bool is_whole_form() const noexcept { return length_ == 0 && patterns_.size() == 1; }

  /// Moves the support by `delta` coordinates.
  CylinderUnion translated(std::int64_t delta) const;
  /// T^{-k} U: the set of x with T^k x in U, i.e. the support moved by +k.
  CylinderUnion preimage(std::int64_t k) const { return translated(k); }
  /// T^{k} U: the support moved by -k.
  CylinderUnion image(std::int64_t k) const { return translated(-k); }

  /// T^{shift} p lies in this set.
  bool contains(const PointRep& p, std::int64_t shift = 0) const;

  std::string to_string() const;

  /// Structural equality. Equal sets compare equal when both forms are canonical.
  friend bool operator==(const CylinderUnion&, const CylinderUnion&) = default;

 private:
  friend CylinderUnion normalize(const CylinderUnion& u, const Sft& sft);

  std::int64_t lo_ = 0;
  std::size_t length_ = 0;
  std::vector<Pattern> patterns_;
  bool canonical_ = false;
};

CylinderUnion normalize(const CylinderUnion& u, const Sft& sft);
CylinderUnion intersect(const CylinderUnion& a, const CylinderUnion& b, const Sft& sft);
CylinderUnion unite(const CylinderUnion& a, const CylinderUnion& b, const Sft& sft);
/// Exact intersection kept in rectangle form: patterns are tightened against the
/// subshift and infeasible ones dropped, without expanding into words. The result
/// is empty exactly when it has no patterns, but is not canonical.
CylinderUnion intersect_rectangles(const CylinderUnion& a, const CylinderUnion& b, const Sft& sft);
CylinderUnion complement(const CylinderUnion& u, const Sft& sft);
CylinderUnion difference(const CylinderUnion& a, const CylinderUnion& b, const Sft& sft);

/// No point of the subshift lies in u.
bool is_empty(const CylinderUnion& u, const Sft& sft);
bool same_set(const CylinderUnion& a, const CylinderUnion& b, const Sft& sft);
bool is_subset(const CylinderUnion& a, const CylinderUnion& b, const Sft& sft);

/// Rectangle feasibility: some admissible point has x_{lo+i} in masks[i] for all i.
bool pattern_feasible(const Pattern& masks, const Sft& sft);

/// Admissible words of `u` over its own support, in lexicographic order.
std::vector<Word> enumerate_words(const CylinderUnion& u, const Sft& sft);

struct ShiftedConstraint {
  std::int64_t shift = 0;
  CylinderUnion set;
};

/// The intersection of T^{-shift} set over all entries.
using ShiftedConstraintSet = std::vector<ShiftedConstraint>;

enum class Emptiness {
  nonempty,
  /// Two constraints demand different symbols at a shared coordinate.
  contradiction,
  /// Symbol masks are compatible but no admissible word bridges them.
  forbidden_by_sft,
};

struct Resolution {
  CylinderUnion set;
  Emptiness emptiness = Emptiness::nonempty;

  bool nonempty() const noexcept { return emptiness == Emptiness::nonempty; }
};

/// Exact intersection of the shifted constraints, normalized.
Resolution resolve_constraints(const ShiftedConstraintSet& constraints, const Sft& sft);

/// Support interval of the resolved intersection (the hull of all shifted supports).
std::pair<std::int64_t, std::int64_t> constraint_span(const ShiftedConstraintSet& constraints);

struct Diameter {
  double value = 0.0;
  /// No coordinate within the horizon takes two values and the set is not a singleton.
  bool truncated = false;
};

/// Diameter under d(x, y) = 2^{-min{|n| : x_n != y_n}}. Throws Degenerate on an empty set.
Diameter diam_of_set(const CylinderUnion& s, const Sft& sft, std::int64_t horizon);

/// Symbols that some point of `s` carries at each coordinate of [lo, hi].
std::vector<SymbolMask> realizable_symbols(const CylinderUnion& s, const Sft& sft, std::int64_t lo, std::int64_t hi);

}  // namespace seqent
