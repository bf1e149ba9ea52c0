#include "seqent/cylinder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>

#include "seqent/error.hpp"

namespace seqent {
namespace {

constexpr SymbolMask kAny = ~SymbolMask{0};

/// Forward/backward reachability; nullopt if no admissible word matches.
std::optional<Pattern> tighten(const Pattern& masks, const Sft& sft) {
  const std::size_t n = masks.size();
  Pattern out(n);
  SymbolMask reach = sft.all_symbols();
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) reach = sft.step_forward(reach);
    reach &= masks[i];
    if (reach == 0) return std::nullopt;
    out[i] = reach;
  }
  for (std::size_t i = n; i-- > 1;) {
    out[i - 1] &= sft.step_backward(out[i]);
  }
  return out;
}

std::uint64_t count_pattern_words(const Pattern& tight, const Sft& sft, std::uint64_t cap) {
  if (tight.empty()) return 1;
  const auto k = static_cast<std::size_t>(sft.alphabet_size());
  std::vector<std::uint64_t> counts(k, 0);
  for (std::size_t s = 0; s < k; ++s) counts[s] = has_symbol(tight[0], static_cast<Symbol>(s)) ? 1 : 0;
  for (std::size_t i = 1; i < tight.size(); ++i) {
    std::vector<std::uint64_t> next(k, 0);
    for (std::size_t b = 0; b < k; ++b) {
      if (!has_symbol(tight[i], static_cast<Symbol>(b))) continue;
      SymbolMask from = sft.predecessors(static_cast<Symbol>(b)) & tight[i - 1];
      while (from != 0) {
        const auto a = static_cast<std::size_t>(std::countr_zero(from));
        from &= from - 1;
        next[b] = std::min(cap, next[b] + counts[a]);
      }
    }
    counts = std::move(next);
  }
  std::uint64_t total = 0;
  for (auto c : counts) total = std::min(cap, total + c);
  return total;
}

void append_pattern_words(const Pattern& tight, const Sft& sft, std::vector<Word>& out) {
  const std::size_t n = tight.size();
  if (n == 0) {
    out.emplace_back();
    return;
  }
  Word w(n, 0);
  std::vector<SymbolMask> remaining(n, 0);
  remaining[0] = tight[0];
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
    if (depth + 1 == n) {
      out.push_back(w);
    } else {
      ++depth;
      remaining[depth] = sft.successors(static_cast<Symbol>(s)) & tight[depth];
    }
  }
}

Pattern word_to_pattern(const Word& w) {
  Pattern p(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) p[i] = symbol_bit(w[i]);
  return p;
}

Word pattern_to_word(const Pattern& p) {
  Word w(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) w[i] = static_cast<Symbol>(std::countr_zero(p[i]));
  return w;
}

/// Drops end coordinates of a sorted explicit word list that do not influence membership.
void trim_words(std::int64_t& lo, std::size_t& len, std::vector<Word>& words, const Sft& sft) {
  bool changed = true;
  while (changed && len > 0) {
    changed = false;
    // Right end: every prefix must admit all of its admissible continuations.
    {
      bool free_end = true;
      std::size_t i = 0;
      while (i < words.size() && free_end) {
        std::size_t j = i;
        SymbolMask last = 0;
        while (j < words.size() && std::equal(words[i].begin(), words[i].end() - 1, words[j].begin())) {
          last |= symbol_bit(words[j].back());
          ++j;
        }
        const SymbolMask expected = len == 1 ? sft.all_symbols() : sft.successors(words[i][len - 2]);
        free_end = last == expected;
        i = j;
      }
      if (free_end) {
        for (auto& w : words) w.pop_back();
        words.erase(std::unique(words.begin(), words.end()), words.end());
        --len;
        changed = true;
        continue;
      }
    }
    // Left end.
    {
      std::map<Word, SymbolMask> firsts;
      for (const auto& w : words) firsts[Word(w.begin() + 1, w.end())] |= symbol_bit(w.front());
      bool free_end = true;
      for (const auto& [suffix, mask] : firsts) {
        const SymbolMask expected = suffix.empty() ? sft.all_symbols() : sft.predecessors(suffix.front());
        if (mask != expected) {
          free_end = false;
          break;
        }
      }
      if (free_end) {
        words.clear();
        for (auto& entry : firsts) words.push_back(entry.first);
        ++lo;
        --len;
        changed = true;
      }
    }
  }
}

/// A set {x_b in B} may equal {x_c in B_c} for other coordinates c. Any two such
/// coordinates are closer than mixing_steps() unless B is a union of cyclic classes,
/// in which case every coordinate works. Picks the valid c with the least (|c|, c).
void relocate_single(std::int64_t& b, SymbolMask& mask, const Sft& sft) {
  if (sft.is_irreducible() && sft.period() > 1) {
    const std::int64_t p = sft.period();
    SymbolMask moved = 0;
    bool class_union = true;
    for (int c = 0; c < p && class_union; ++c) {
      const SymbolMask cls = sft.class_mask(c);
      if ((mask & cls) == 0) continue;
      class_union = (mask & cls) == cls;
      moved |= sft.class_mask(static_cast<int>(((c - b) % p + p) % p));
    }
    if (class_union) {
      b = 0;
      mask = moved;
      return;
    }
  }
  const std::int64_t reach = sft.mixing_steps();
  auto better = [](std::int64_t c, std::int64_t than) {
    return std::abs(c) < std::abs(than) || (std::abs(c) == std::abs(than) && c < than);
  };
  std::int64_t best = b;
  SymbolMask best_mask = mask;
  for (std::int64_t c = b - reach + 1; c < b + reach; ++c) {
    if (c == b || !better(c, best)) continue;
    const std::int64_t n = std::abs(c - b);
    const SymbolMask there = c > b ? sft.step_forward(mask, n) : sft.step_backward(mask, n);
    const SymbolMask back = c > b ? sft.step_backward(there, n) : sft.step_forward(there, n);
    if (back == mask) {
      best = c;
      best_mask = there;
    }
  }
  b = best;
  mask = best_mask;
}

/// Hull-aligned pairwise intersection without any subshift reasoning.
CylinderUnion raw_intersect(const CylinderUnion& a, const CylinderUnion& b) {
  if (a.has_no_patterns() || b.has_no_patterns()) return CylinderUnion::empty();
  if (a.length() == 0) return b;
  if (b.length() == 0) return a;
  const std::int64_t lo = std::min(a.lo(), b.lo());
  const std::int64_t hi = std::max(a.hi(), b.hi());
  const auto len = static_cast<std::size_t>(hi - lo + 1);
  std::vector<Pattern> out;
  for (const auto& pa : a.patterns()) {
    for (const auto& pb : b.patterns()) {
      Pattern p(len, kAny);
      bool alive = true;
      for (std::size_t i = 0; i < pa.size(); ++i) p[static_cast<std::size_t>(a.lo() - lo) + i] &= pa[i];
      for (std::size_t i = 0; i < pb.size() && alive; ++i) {
        auto& slot = p[static_cast<std::size_t>(b.lo() - lo) + i];
        slot &= pb[i];
        alive = slot != 0;
      }
      for (std::size_t i = 0; i < pa.size() && alive; ++i) alive = p[static_cast<std::size_t>(a.lo() - lo) + i] != 0;
      if (alive) out.push_back(std::move(p));
    }
  }
  if (out.empty()) return CylinderUnion::empty();
  return CylinderUnion::from_disjoint_patterns(lo, std::move(out));
}

std::string mask_string(SymbolMask m, const std::size_t k_hint) {
  if (is_singleton(m)) return format_word(Word{static_cast<Symbol>(std::countr_zero(m))});
  if (m == kAny) return "*";
  std::string out = "{";
  for (std::size_t s = 0; s < std::min<std::size_t>(k_hint, 64); ++s) {
    if (has_symbol(m, static_cast<Symbol>(s))) out += format_word(Word{static_cast<Symbol>(s)});
  }
  return out + "}";
}

bool forward_unique(Symbol start, const Sft& sft) {
  Symbol cur = start;
  for (int step = 0; step <= sft.alphabet_size(); ++step) {
    const SymbolMask next = sft.successors(cur);
    if (!is_singleton(next)) return false;
    cur = static_cast<Symbol>(std::countr_zero(next));
  }
  return true;
}

bool backward_unique(Symbol start, const Sft& sft) {
  Symbol cur = start;
  for (int step = 0; step <= sft.alphabet_size(); ++step) {
    const SymbolMask prev = sft.predecessors(cur);
    if (!is_singleton(prev)) return false;
    cur = static_cast<Symbol>(std::countr_zero(prev));
  }
  return true;
}

}  // namespace

Cylinder Cylinder::make(const Sft& sft, std::int64_t start, Word word) {
  if (word.empty()) throw InvalidArgument("Cylinder: word must be nonempty");
  for (Symbol s : word) {
    if (s >= sft.alphabet_size()) throw InvalidArgument("Cylinder: letter outside the alphabet");
  }
  const bool empty = !sft.admissible(word);
  return Cylinder(start, std::move(word), empty);
}

CylinderUnion CylinderUnion::whole() {
  CylinderUnion u;
  u.patterns_.emplace_back();
  u.canonical_ = true;
  return u;
}

CylinderUnion CylinderUnion::empty() {
  CylinderUnion u;
  u.canonical_ = true;
  return u;
}

CylinderUnion CylinderUnion::from_cylinder(const Cylinder& c) {
  if (c.empty_in_sft()) return empty();
  return from_words(c.start(), {c.word()});
}

CylinderUnion CylinderUnion::from_words(std::int64_t start, std::vector<Word> words) {
  if (words.empty()) return empty();
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  const std::size_t len = words.front().size();
  std::vector<Pattern> patterns;
  patterns.reserve(words.size());
  for (const auto& w : words) {
    if (w.size() != len) throw InvalidArgument("CylinderUnion::from_words: words must share one length");
    patterns.push_back(word_to_pattern(w));
  }
  return from_disjoint_patterns(start, std::move(patterns));
}

CylinderUnion CylinderUnion::from_disjoint_patterns(std::int64_t lo, std::vector<Pattern> patterns) {
  CylinderUnion u;
  if (patterns.empty()) return empty();
  u.lo_ = lo;
  u.length_ = patterns.front().size();
  for (const auto& p : patterns) {
    if (p.size() != u.length_) throw InvalidArgument("CylinderUnion: patterns must share the support length");
  }
  u.patterns_ = std::move(patterns);
  if (u.length_ == 0) {
    u.patterns_.resize(1);
    u.lo_ = 0;
  }
  return u;
}

CylinderUnion CylinderUnion::translated(std::int64_t delta) const {
  CylinderUnion out = *this;
  if (length_ > 0) out.lo_ += delta;
  return out;
}

bool CylinderUnion::contains(const PointRep& p, std::int64_t shift) const {
  for (const auto& pat : patterns_) {
    bool inside = true;
    for (std::size_t i = 0; i < pat.size() && inside; ++i) {
      inside = has_symbol(pat[i], p.at(lo_ + static_cast<std::int64_t>(i) + shift));
    }
    if (inside) return true;
  }
  return false;
}

std::string CylinderUnion::to_string() const {
  if (patterns_.empty()) return "empty";
  if (length_ == 0) return "X";
  std::ostringstream out;
  out << "[" << lo_ << "," << hi() << "]{";
  for (std::size_t i = 0; i < patterns_.size(); ++i) {
    if (i > 0) out << "|";
    for (SymbolMask m : patterns_[i]) out << mask_string(m, kMaxAlphabet);
  }
  out << "}";
  return out.str();
}

CylinderUnion normalize(const CylinderUnion& u, const Sft& sft) {
  if (u.has_no_patterns()) return CylinderUnion::empty();
  std::vector<Pattern> patterns = u.patterns();
  for (auto& p : patterns) {
    for (auto& m : p) m &= sft.all_symbols();
  }
  std::int64_t lo = u.lo();
  std::size_t len = u.length();
  const auto all = sft.all_symbols();
  auto column_free = [&](std::size_t i) {
    return std::all_of(patterns.begin(), patterns.end(), [&](const Pattern& p) { return p[i] == all; });
  };
  std::size_t front = 0;
  while (front < len && column_free(front)) ++front;
  std::size_t back = len;
  while (back > front && column_free(back - 1)) --back;
  if (front > 0 || back < len) {
    for (auto& p : patterns) p = Pattern(p.begin() + static_cast<std::ptrdiff_t>(front), p.begin() + static_cast<std::ptrdiff_t>(back));
    lo += static_cast<std::int64_t>(front);
    len = back - front;
  }

  std::vector<Pattern> tight;
  tight.reserve(patterns.size());
  for (const auto& p : patterns) {
    if (auto t = tighten(p, sft)) tight.push_back(std::move(*t));
  }
  if (tight.empty()) return CylinderUnion::empty();
  if (len == 0) return CylinderUnion::whole();

  std::uint64_t total = 0;
  const std::uint64_t cap = CylinderUnion::kCanonicalWordCap;
  for (const auto& p : tight) {
    total = std::min(cap + 1, total + count_pattern_words(p, sft, cap + 1));
    if (total > cap) break;
  }

  CylinderUnion out;
  if (total <= cap) {
    std::vector<Word> words;
    words.reserve(static_cast<std::size_t>(total));
    for (const auto& p : tight) append_pattern_words(p, sft, words);
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    trim_words(lo, len, words, sft);
    if (len == 0) return CylinderUnion::whole();
    if (len == 1) {
      SymbolMask mask = 0;
      for (const auto& w : words) mask |= symbol_bit(w[0]);
      relocate_single(lo, mask, sft);
      words.clear();
      for (SymbolMask rest = mask; rest != 0; rest &= rest - 1) {
        words.push_back({static_cast<Symbol>(std::countr_zero(rest))});
      }
    }
    std::vector<Pattern> explicit_patterns;
    explicit_patterns.reserve(words.size());
    for (const auto& w : words) explicit_patterns.push_back(word_to_pattern(w));
    out = CylinderUnion::from_disjoint_patterns(lo, std::move(explicit_patterns));
    out.canonical_ = true;
  } else {
    std::sort(tight.begin(), tight.end());
    out = CylinderUnion::from_disjoint_patterns(lo, std::move(tight));
    out.canonical_ = false;
  }
  return out;
}

CylinderUnion intersect(const CylinderUnion& a, const CylinderUnion& b, const Sft& sft) {
  return normalize(raw_intersect(a, b), sft);
}

CylinderUnion intersect_rectangles(const CylinderUnion& a, const CylinderUnion& b, const Sft& sft) {
  const CylinderUnion raw = raw_intersect(a, b);
  if (raw.has_no_patterns() || raw.length() == 0) return raw;
  std::vector<Pattern> tight;
  for (const auto& p : raw.patterns()) {
    if (auto t = tighten(p, sft)) tight.push_back(std::move(*t));
  }
  if (tight.empty()) return CylinderUnion::empty();
  constexpr std::size_t kPatternLimit = 64;
  CylinderUnion out = CylinderUnion::from_disjoint_patterns(raw.lo(), std::move(tight));
  return out.patterns().size() > kPatternLimit ? normalize(out, sft) : out;
}

CylinderUnion complement(const CylinderUnion& u, const Sft& sft) {
  const CylinderUnion n = normalize(u, sft);
  if (n.has_no_patterns()) return CylinderUnion::whole();
  if (n.length() == 0) return CylinderUnion::empty();
  const std::size_t len = n.length();
  const std::uint64_t cap = CylinderUnion::kCanonicalWordCap;
  if (n.is_canonical() && sft.count_admissible_words(len, cap + 1) <= cap) {
    std::vector<Word> all = sft.admissible_words(len);
    std::vector<Word> mine;
    mine.reserve(n.patterns().size());
    for (const auto& p : n.patterns()) mine.push_back(pattern_to_word(p));
    std::vector<Word> rest;
    std::set_difference(all.begin(), all.end(), mine.begin(), mine.end(), std::back_inserter(rest));
    if (rest.empty()) return CylinderUnion::empty();
    return normalize(CylinderUnion::from_words(n.lo(), std::move(rest)), sft);
  }
  // Disjoint normal form of each rectangle's complement: split on the first coordinate that leaves the rectangle.
  CylinderUnion acc = CylinderUnion::whole();
  for (const auto& p : n.patterns()) {
    std::vector<Pattern> pieces;
    for (std::size_t j = 0; j < len; ++j) {
      const SymbolMask outside = ~p[j] & sft.all_symbols();
      if (outside == 0) continue;
      Pattern piece(len, kAny);
      for (std::size_t i = 0; i < j; ++i) piece[i] = p[i];
      piece[j] = outside;
      pieces.push_back(std::move(piece));
    }
    if (pieces.empty()) return CylinderUnion::empty();
    acc = intersect(acc, CylinderUnion::from_disjoint_patterns(n.lo(), std::move(pieces)), sft);
    if (acc.has_no_patterns()) return acc;
  }
  return acc;
}

CylinderUnion difference(const CylinderUnion& a, const CylinderUnion& b, const Sft& sft) {
  return intersect(a, complement(b, sft), sft);
}

CylinderUnion unite(const CylinderUnion& a, const CylinderUnion& b, const Sft& sft) {
  const CylinderUnion na = normalize(a, sft);
  const CylinderUnion extra = difference(b, na, sft);
  if (na.has_no_patterns()) return extra;
  if (extra.has_no_patterns()) return na;
  if (na.length() == 0) return na;
  const std::int64_t lo = std::min(na.lo(), extra.lo());
  const std::int64_t hi = std::max(na.hi(), extra.hi());
  const auto len = static_cast<std::size_t>(hi - lo + 1);
  std::vector<Pattern> patterns;
  for (const auto* part : {&na, &extra}) {
    for (const auto& p : part->patterns()) {
      Pattern padded(len, kAny);
      std::copy(p.begin(), p.end(), padded.begin() + (part->lo() - lo));
      patterns.push_back(std::move(padded));
    }
  }
  return normalize(CylinderUnion::from_disjoint_patterns(lo, std::move(patterns)), sft);
}

bool pattern_feasible(const Pattern& masks, const Sft& sft) {
  SymbolMask reach = sft.all_symbols();
  std::int64_t pending = 0;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (i > 0) ++pending;
    if ((masks[i] & sft.all_symbols()) == sft.all_symbols()) continue;
    reach = sft.step_forward(reach, pending) & masks[i];
    pending = 0;
    if (reach == 0) return false;
  }
  return true;
}

bool is_empty(const CylinderUnion& u, const Sft& sft) {
  return std::none_of(u.patterns().begin(), u.patterns().end(),
                      [&](const Pattern& p) { return pattern_feasible(p, sft); });
}

bool same_set(const CylinderUnion& a, const CylinderUnion& b, const Sft& sft) {
  const CylinderUnion na = normalize(a, sft);
  const CylinderUnion nb = normalize(b, sft);
  if (na.is_canonical() && nb.is_canonical()) return na == nb;
  return is_empty(difference(na, nb, sft), sft) && is_empty(difference(nb, na, sft), sft);
}

bool is_subset(const CylinderUnion& a, const CylinderUnion& b, const Sft& sft) {
  return is_empty(difference(a, b, sft), sft);
}

std::vector<Word> enumerate_words(const CylinderUnion& u, const Sft& sft) {
  std::vector<Word> words;
  for (const auto& p : u.patterns()) {
    Pattern masked = p;
    for (auto& m : masked) m &= sft.all_symbols();
    if (auto t = tighten(masked, sft)) append_pattern_words(*t, sft, words);
  }
  std::sort(words.begin(), words.end());
  return words;
}

std::pair<std::int64_t, std::int64_t> constraint_span(const ShiftedConstraintSet& constraints) {
  std::int64_t lo = 0;
  std::int64_t hi = -1;
  bool first = true;
  for (const auto& c : constraints) {
    if (c.set.length() == 0) continue;
    const std::int64_t a = c.set.lo() + c.shift;
    const std::int64_t b = c.set.hi() + c.shift;
    if (first) {
      lo = a;
      hi = b;
      first = false;
    } else {
      lo = std::min(lo, a);
      hi = std::max(hi, b);
    }
  }
  return {lo, hi};
}

Resolution resolve_constraints(const ShiftedConstraintSet& constraints, const Sft& sft) {
  CylinderUnion acc = CylinderUnion::whole();
  for (const auto& c : constraints) {
    const CylinderUnion shifted = c.set.preimage(c.shift);
    if (shifted.has_no_patterns()) return {CylinderUnion::empty(), Emptiness::contradiction};
    const CylinderUnion raw = raw_intersect(acc, shifted);
    if (raw.has_no_patterns()) return {CylinderUnion::empty(), Emptiness::contradiction};
    acc = normalize(raw, sft);
    if (acc.has_no_patterns()) return {CylinderUnion::empty(), Emptiness::forbidden_by_sft};
  }
  return {normalize(acc, sft), Emptiness::nonempty};
}

std::vector<SymbolMask> realizable_symbols(const CylinderUnion& s, const Sft& sft, std::int64_t lo, std::int64_t hi) {
  std::vector<SymbolMask> out(static_cast<std::size_t>(std::max<std::int64_t>(0, hi - lo + 1)), 0);
  const CylinderUnion n = normalize(s, sft);
  if (n.has_no_patterns()) return out;
  if (n.length() == 0) {
    std::fill(out.begin(), out.end(), sft.all_symbols());
    return out;
  }
  for (const auto& p : n.patterns()) {
    // Patterns from normalize() are tight: every listed symbol is realizable.
    SymbolMask right = p.back();
    std::int64_t right_at = n.hi();
    SymbolMask left = p.front();
    std::int64_t left_at = n.lo();
    for (std::int64_t c = lo; c <= hi; ++c) {
      SymbolMask m = 0;
      if (c >= n.lo() && c <= n.hi()) {
        m = p[static_cast<std::size_t>(c - n.lo())];
      } else if (c > n.hi()) {
        while (right_at < c) {
          right = sft.step_forward(right);
          ++right_at;
        }
        m = right;
      } else {
        SymbolMask back = left;
        for (std::int64_t t = left_at; t > c; --t) back = sft.step_backward(back);
        m = back;
      }
      out[static_cast<std::size_t>(c - lo)] |= m;
    }
  }
  return out;
}

Diameter diam_of_set(const CylinderUnion& s, const Sft& sft, std::int64_t horizon) {
  if (horizon < 0) throw InvalidArgument("diam_of_set: horizon must be nonnegative");
  const CylinderUnion n = normalize(s, sft);
  if (n.has_no_patterns()) throw Degenerate("diam_of_set: the set is empty");
  const auto masks = realizable_symbols(n, sft, -horizon, horizon);
  const auto at = [&](std::int64_t c) { return masks[static_cast<std::size_t>(c + horizon)]; };
  for (std::int64_t m = 0; m <= horizon; ++m) {
    if (std::popcount(at(m)) >= 2 || std::popcount(at(-m)) >= 2) {
      return {std::ldexp(1.0, static_cast<int>(-m)), false};
    }
  }
  // Every coordinate in the horizon is pinned; the set is a single point iff both tails are forced.
  const bool covers_support = n.length() == 0 || (n.lo() >= -horizon && n.hi() <= horizon);
  if (covers_support && forward_unique(static_cast<Symbol>(std::countr_zero(at(horizon))), sft) &&
      backward_unique(static_cast<Symbol>(std::countr_zero(at(-horizon))), sft)) {
    return {0.0, false};
  }
  return {std::ldexp(1.0, static_cast<int>(-horizon - 1)), true};
}

}  // namespace seqent
