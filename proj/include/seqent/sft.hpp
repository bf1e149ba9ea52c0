#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace seqent {

using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;
/// Bit b set means symbol b is permitted at a coordinate.
using SymbolMask = std::uint64_t;

inline constexpr int kMaxAlphabet = 64;

constexpr SymbolMask symbol_bit(Symbol s) noexcept { return SymbolMask{1} << s; }
constexpr bool has_symbol(SymbolMask m, Symbol s) noexcept { return (m >> s) & 1U; }
constexpr bool is_singleton(SymbolMask m) noexcept { return m != 0 && (m & (m - 1)) == 0; }

/// Parses a digit string such as "0110" into a word. Letters must be decimal digits.
Word parse_word(std::string_view digits);
std::string format_word(std::span<const Symbol> w);

/// A one-step subshift of finite type: bi-infinite sequences whose adjacent
/// symbols follow the allowed-transition matrix.
///
/// Every symbol must have at least one successor and one predecessor, so every
/// admissible finite word extends to a point of the subshift in both directions.
class Sft {
 public:
  Sft(int alphabet_size, const std::vector<std::vector<bool>>& allowed);

  static Sft full_shift(int alphabet_size);

  int alphabet_size() const noexcept { return k_; }
  SymbolMask all_symbols() const noexcept { return all_; }

  bool allowed(Symbol a, Symbol b) const noexcept { return has_symbol(succ_[a], b); }
  SymbolMask successors(Symbol a) const noexcept { return succ_[a]; }
  SymbolMask predecessors(Symbol b) const noexcept { return pred_[b]; }

  /// Symbols reachable in one step from some symbol of `from`.
  SymbolMask step_forward(SymbolMask from) const noexcept;
  SymbolMask step_backward(SymbolMask to) const noexcept;
  /// Symbols reachable in exactly `steps` steps; long gaps go through boolean matrix powers.
  SymbolMask step_forward(SymbolMask from, std::int64_t steps) const;
  SymbolMask step_backward(SymbolMask to, std::int64_t steps) const;

  bool admissible(std::span<const Symbol> w) const noexcept;
  std::vector<Word> admissible_words(std::size_t length) const;
  /// Number of admissible words of the given length, saturating at `cap`.
  std::uint64_t count_admissible_words(std::size_t length, std::uint64_t cap) const;

  std::vector<std::vector<bool>> allowed_matrix() const;

  /// True if every symbol has exactly one successor and one predecessor (a union of cycles).
  bool is_deterministic() const noexcept;

  /// The transition graph is strongly connected.
  bool is_irreducible() const noexcept { return irreducible_; }
  /// Period of an irreducible graph (gcd of cycle lengths); 0 if reducible.
  int period() const noexcept { return period_; }
  /// Cyclic class of a symbol: every edge goes from class c to class c+1 mod period.
  /// -1 for reducible graphs.
  int cyclic_class(Symbol a) const noexcept;
  SymbolMask class_mask(int c) const noexcept { return class_masks_[static_cast<std::size_t>(c)]; }
  /// Irreducible: the least n such that n or more steps from any symbol reach its
  /// entire target class. Reducible: the fixed search bound k^2 + 1.
  std::int64_t mixing_steps() const noexcept { return mixing_steps_; }

  friend bool operator==(const Sft&, const Sft&) = default;

 private:
  void compute_cyclic_structure();

  int k_ = 0;
  SymbolMask all_ = 0;
  std::vector<SymbolMask> succ_;
  std::vector<SymbolMask> pred_;
  bool irreducible_ = false;
  int period_ = 0;
  std::vector<SymbolMask> class_masks_;
  std::int64_t mixing_steps_ = 0;
};

}  // namespace seqent
