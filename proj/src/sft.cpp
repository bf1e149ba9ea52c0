#include "seqent/sft.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <numeric>

#include "seqent/error.hpp"

namespace seqent {
namespace {

using BoolMatrix = std::vector<SymbolMask>;

BoolMatrix compose(const BoolMatrix& a, const BoolMatrix& b) {
  BoolMatrix out(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    SymbolMask row = a[i];
    while (row != 0) {
      const int j = std::countr_zero(row);
      row &= row - 1;
      out[i] |= b[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

SymbolMask one_step(const BoolMatrix& m, SymbolMask from) {
  SymbolMask out = 0;
  while (from != 0) {
    const int a = std::countr_zero(from);
    from &= from - 1;
    out |= m[static_cast<std::size_t>(a)];
  }
  return out;
}

/// Image of `from` after `steps` applications of m; long runs go through repeated squaring.
SymbolMask multi_step(const BoolMatrix& m, SymbolMask from, std::int64_t steps) {
  if (steps <= 2 * static_cast<std::int64_t>(m.size())) {
    for (std::int64_t i = 0; i < steps; ++i) from = one_step(m, from);
    return from;
  }
  BoolMatrix power(m.size(), 0);
  for (std::size_t i = 0; i < power.size(); ++i) power[i] = symbol_bit(static_cast<Symbol>(i));
  BoolMatrix base = m;
  while (steps > 0) {
    if (steps & 1) power = compose(power, base);
    steps >>= 1;
    if (steps > 0) base = compose(base, base);
  }
  return one_step(power, from);
}

}  // namespace

Word parse_word(std::string_view digits) {
  Word w;
  w.reserve(digits.size());
  for (char c : digits) {
    if (c < '0' || c > '9') throw InvalidArgument("parse_word: non-digit letter in \"" + std::string(digits) + "\"");
    w.push_back(static_cast<Symbol>(c - '0'));
  }
  return w;
}

std::string format_word(std::span<const Symbol> w) {
  std::string out;
  out.reserve(w.size());
  for (Symbol s : w) {
    if (s < 10) {
      out.push_back(static_cast<char>('0' + s));
    } else {
      out += "(" + std::to_string(s) + ")";
    }
  }
  return out;
}

Sft::Sft(int alphabet_size, const std::vector<std::vector<bool>>& allowed) : k_(alphabet_size) {
  if (k_ < 1 || k_ > kMaxAlphabet) {
    throw InvalidArgument("Sft: alphabet size must lie in [1, 64], got " + std::to_string(k_));
  }
  if (allowed.size() != static_cast<std::size_t>(k_)) throw InvalidArgument("Sft: allowed matrix has wrong row count");
  all_ = k_ == 64 ? ~SymbolMask{0} : (SymbolMask{1} << k_) - 1;
  succ_.assign(static_cast<std::size_t>(k_), 0);
  pred_.assign(static_cast<std::size_t>(k_), 0);
  for (int a = 0; a < k_; ++a) {
    if (allowed[static_cast<std::size_t>(a)].size() != static_cast<std::size_t>(k_)) {
      throw InvalidArgument("Sft: allowed matrix row " + std::to_string(a) + " has wrong length");
    }
    for (int b = 0; b < k_; ++b) {
      if (allowed[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) {
        succ_[static_cast<std::size_t>(a)] |= symbol_bit(static_cast<Symbol>(b));
        pred_[static_cast<std::size_t>(b)] |= symbol_bit(static_cast<Symbol>(a));
      }
    }
  }
  for (int a = 0; a < k_; ++a) {
    if (succ_[static_cast<std::size_t>(a)] == 0) throw InvalidArgument("Sft: symbol " + std::to_string(a) + " has no successor");
    if (pred_[static_cast<std::size_t>(a)] == 0) throw InvalidArgument("Sft: symbol " + std::to_string(a) + " has no predecessor");
  }
  compute_cyclic_structure();
}

void Sft::compute_cyclic_structure() {
  const auto k = static_cast<std::size_t>(k_);
  // Breadth-first depths from symbol 0; the period is the gcd of depth defects over all edges.
  std::vector<std::int64_t> depth(k, -1);
  depth[0] = 0;
  std::vector<std::size_t> queue{0};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t a = queue[head];
    SymbolMask next = succ_[a];
    while (next != 0) {
      const auto b = static_cast<std::size_t>(std::countr_zero(next));
      next &= next - 1;
      if (depth[b] < 0) {
        depth[b] = depth[a] + 1;
        queue.push_back(b);
      }
    }
  }
  irreducible_ = queue.size() == k;
  if (irreducible_) {
    // Backward reachability of every symbol to 0 as well.
    SymbolMask seen = symbol_bit(0), frontier = seen;
    while (frontier != 0) {
      frontier = one_step(pred_, frontier) & ~seen;
      seen |= frontier;
    }
    irreducible_ = seen == all_;
  }
  class_masks_.clear();
  if (!irreducible_) {
    period_ = 0;
    mixing_steps_ = static_cast<std::int64_t>(k * k + 1);
    return;
  }
  std::int64_t g = 0;
  for (std::size_t a = 0; a < k; ++a) {
    SymbolMask next = succ_[a];
    while (next != 0) {
      const auto b = static_cast<std::size_t>(std::countr_zero(next));
      next &= next - 1;
      g = std::gcd(g, std::abs(depth[a] + 1 - depth[b]));
    }
  }
  period_ = static_cast<int>(g == 0 ? 1 : g);
  class_masks_.assign(static_cast<std::size_t>(period_), 0);
  for (std::size_t a = 0; a < k; ++a) class_masks_[static_cast<std::size_t>(depth[a] % period_)] |= symbol_bit(static_cast<Symbol>(a));
  mixing_steps_ = 0;
  for (std::size_t a = 0; a < k; ++a) {
    const auto c = static_cast<std::size_t>(depth[a] % period_);
    SymbolMask reach = symbol_bit(static_cast<Symbol>(a));
    std::int64_t n = 0;
    while (reach != class_masks_[(c + static_cast<std::size_t>(n)) % class_masks_.size()]) {
      reach = one_step(succ_, reach);
      ++n;
    }
    mixing_steps_ = std::max(mixing_steps_, n);
  }
}

int Sft::cyclic_class(Symbol a) const noexcept {
  for (std::size_t c = 0; c < class_masks_.size(); ++c) {
    if (has_symbol(class_masks_[c], a)) return static_cast<int>(c);
  }
  return -1;
}

Sft Sft::full_shift(int alphabet_size) {
  return Sft(alphabet_size, std::vector<std::vector<bool>>(static_cast<std::size_t>(alphabet_size),
                                                           std::vector<bool>(static_cast<std::size_t>(alphabet_size), true)));
}

SymbolMask Sft::step_forward(SymbolMask from) const noexcept {
  SymbolMask out = 0;
  while (from != 0) {
    const int a = std::countr_zero(from);
    from &= from - 1;
    out |= succ_[static_cast<std::size_t>(a)];
  }
  return out;
}

SymbolMask Sft::step_backward(SymbolMask to) const noexcept {
  SymbolMask out = 0;
  while (to != 0) {
    const int b = std::countr_zero(to);
    to &= to - 1;
    out |= pred_[static_cast<std::size_t>(b)];
  }
  return out;
}

SymbolMask Sft::step_forward(SymbolMask from, std::int64_t steps) const {
  if (steps < 0) throw InvalidArgument("Sft::step_forward: negative step count");
  return multi_step(succ_, from, steps);
}

SymbolMask Sft::step_backward(SymbolMask to, std::int64_t steps) const {
  if (steps < 0) throw InvalidArgument("Sft::step_backward: negative step count");
  return multi_step(pred_, to, steps);
}

bool Sft::admissible(std::span<const Symbol> w) const noexcept {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] >= k_) return false;
    if (i > 0 && !allowed(w[i - 1], w[i])) return false;
  }
  return true;
}

std::vector<Word> Sft::admissible_words(std::size_t length) const {
  std::vector<Word> out;
  if (length == 0) {
    out.emplace_back();
    return out;
  }
  Word w(length, 0);
  // Iterative depth-first enumeration in lexicographic order.
  std::vector<SymbolMask> remaining(length, 0);
  remaining[0] = all_;
  std::size_t depth = 0;
  while (true) {
    if (remaining[depth] == 0) {
      if (depth == 0) break;
      --depth;
      continue;
    }
    const int s = std::countr_zero(remaining[depth]);
    remaining[depth] &= remaining[depth] - 1;
    w[depth] = static_cast<Symbol>(s);
    if (depth + 1 == length) {
      out.push_back(w);
    } else {
      ++depth;
      remaining[depth] = succ_[static_cast<std::size_t>(s)];
    }
  }
  return out;
}

std::uint64_t Sft::count_admissible_words(std::size_t length, std::uint64_t cap) const {
  if (length == 0) return 1;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(k_), 1);
  for (std::size_t step = 1; step < length; ++step) {
    std::vector<std::uint64_t> next(static_cast<std::size_t>(k_), 0);
    for (int a = 0; a < k_; ++a) {
      for (int b = 0; b < k_; ++b) {
        if (allowed(static_cast<Symbol>(a), static_cast<Symbol>(b))) {
          next[static_cast<std::size_t>(b)] =
              std::min(cap, next[static_cast<std::size_t>(b)] + counts[static_cast<std::size_t>(a)]);
        }
      }
    }
    counts = std::move(next);
  }
  std::uint64_t total = 0;
  for (auto c : counts) total = std::min(cap, total + c);
  return total;
}

std::vector<std::vector<bool>> Sft::allowed_matrix() const {
  std::vector<std::vector<bool>> m(static_cast<std::size_t>(k_), std::vector<bool>(static_cast<std::size_t>(k_), false));
  for (int a = 0; a < k_; ++a) {
    for (int b = 0; b < k_; ++b) m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = allowed(static_cast<Symbol>(a), static_cast<Symbol>(b));
  }
  return m;
}

bool Sft::is_deterministic() const noexcept {
  for (int a = 0; a < k_; ++a) {
    if (!is_singleton(succ_[static_cast<std::size_t>(a)]) || !is_singleton(pred_[static_cast<std::size_t>(a)])) return false;
  }
  return true;
}

}  // namespace seqent
