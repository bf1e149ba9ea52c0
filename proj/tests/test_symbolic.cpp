#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "seqent/cylinder.hpp"
#include "seqent/error.hpp"
#include "seqent/panel.hpp"
#include "seqent/point.hpp"
#include "seqent/sft.hpp"
#include "support/oracles.hpp"

using namespace seqent;
using seqent::testing::brute_words;
using seqent::testing::random_constraints;
using seqent::testing::random_union;
using seqent::testing::words_of;

namespace {

Sft golden() { return Sft(2, {{true, true}, {true, false}}); }

CylinderUnion cyl(const Sft& sft, std::int64_t start, const char* w) {
  return CylinderUnion::from_cylinder(Cylinder::make(sft, start, parse_word(w)));
}

std::vector<Sft> panel_sfts() {
  std::vector<Sft> out;
  for (const auto& sys : acceptance_panel()) out.push_back(sys.measure.sft());
  return out;
}

}  // namespace

TEST(Sft, RejectsDeadSymbols) {
  EXPECT_THROW(Sft(2, {{true, false}, {false, false}}), InvalidArgument);
  EXPECT_THROW(Sft(0, {}), InvalidArgument);
}

TEST(Sft, GoldenMeanWordCountsAreFibonacci) {
  const Sft s = golden();
  std::uint64_t a = 2, b = 3;
  EXPECT_EQ(s.count_admissible_words(1, 1000), 2U);
  EXPECT_EQ(s.count_admissible_words(2, 1000), 3U);
  for (std::size_t n = 3; n <= 12; ++n) {
    const std::uint64_t c = a + b;
    EXPECT_EQ(s.count_admissible_words(n, 1U << 20), c);
    EXPECT_EQ(s.admissible_words(n).size(), c);
    a = b;
    b = c;
  }
}

TEST(Sft, MultiStepReachabilityMatchesIteration) {
  for (const Sft& s : panel_sfts()) {
    for (SymbolMask from = 1; from <= s.all_symbols(); ++from) {
      SymbolMask iter = from;
      for (std::int64_t steps = 1; steps <= 20; ++steps) {
        iter = s.step_forward(iter);
        EXPECT_EQ(s.step_forward(from, steps), iter);
      }
    }
  }
}

TEST(ShiftPoint, ZeroShiftIsIdentity) {
  const Sft s = Sft::full_shift(2);
  const PointRep x = PointRep::eventually_periodic(s, parse_word("01"), parse_word("110"), parse_word("1"));
  EXPECT_TRUE(agree_on(x, x.shifted(0), -20, 20));
}

TEST(ShiftPoint, FixedPointIsInvariant) {
  const Sft s = Sft::full_shift(2);
  const PointRep zero = PointRep::periodic(s, parse_word("0"));
  for (int k : {-7, -1, 1, 5, 1000}) EXPECT_TRUE(agree_on(zero, zero.shifted(k), -30, 30));
}

TEST(ShiftPoint, ShiftByOneReadsNextCoordinate) {
  const Sft s = Sft::full_shift(2);
  const PointRep x = PointRep::eventually_periodic(s, parse_word("0"), parse_word("01"), parse_word("1"));
  EXPECT_EQ(x.shifted(1).at(0), 1);
  EXPECT_EQ(x.at(0), 0);
}

TEST(ShiftPoint, ActionLawOnRandomPoints) {
  std::mt19937_64 rng(11);
  const Sft s = Sft::full_shift(3);
  std::uniform_int_distribution<int> len(1, 4);
  std::uniform_int_distribution<int> sh(-9, 9);
  for (int trial = 0; trial < 200; ++trial) {
    const PointRep x = PointRep::eventually_periodic(
        s, seqent::testing::random_word(rng, 3, static_cast<std::size_t>(len(rng))),
        seqent::testing::random_word(rng, 3, static_cast<std::size_t>(len(rng) - 1)),
        seqent::testing::random_word(rng, 3, static_cast<std::size_t>(len(rng))));
    const int a = sh(rng), b = sh(rng);
    EXPECT_TRUE(agree_on(x.shifted(a).shifted(b), x.shifted(a + b), -25, 25));
  }
}

TEST(ShiftPoint, SampledWindowRefusesOutOfRange) {
  const Sft s = Sft::full_shift(2);
  const PointRep x = PointRep::sampled(s, 0, parse_word("0110"), 1);
  EXPECT_EQ(x.shifted(2).at(0), 1);
  EXPECT_THROW((void)x.at(4), WindowExceeded);
  EXPECT_THROW((void)x.shifted(3).at(1), WindowExceeded);
  EXPECT_THROW((void)x.at(-1), WindowExceeded);
}

TEST(ShiftPoint, RejectsForbiddenJunctions) {
  const Sft s = golden();
  EXPECT_THROW(PointRep::periodic(s, parse_word("1")), InvalidArgument);
  EXPECT_THROW(PointRep::eventually_periodic(s, parse_word("0"), parse_word("01"), parse_word("10")), InvalidArgument);
  EXPECT_THROW(PointRep::sampled(s, 0, parse_word("0110"), 0), InvalidArgument);
  EXPECT_THROW(PointRep::periodic(Sft::full_shift(2), parse_word("2")), InvalidArgument);
}

TEST(PointInSet, SpecExamples) {
  const Sft s = Sft::full_shift(2);
  const PointRep zero = PointRep::periodic(s, parse_word("0"));
  EXPECT_TRUE(cyl(s, 0, "0").contains(zero));
  EXPECT_FALSE(cyl(s, 0, "1").contains(zero));
  const PointRep w = PointRep::sampled(s, 0, parse_word("0110"), 3);
  EXPECT_TRUE(cyl(s, 1, "11").contains(w, 0));
}

TEST(PointInSet, PreimageLaw) {
  std::mt19937_64 rng(5);
  const Sft s = Sft::full_shift(2);
  std::uniform_int_distribution<int> sh(-6, 6);
  for (int trial = 0; trial < 300; ++trial) {
    const PointRep p = PointRep::periodic(s, seqent::testing::random_word(rng, 2, 5));
    const CylinderUnion u = random_union(rng, s, sh(rng), 3);
    const int k = sh(rng);
    EXPECT_EQ(u.contains(p, k), u.contains(p.shifted(k), 0));
    EXPECT_EQ(u.contains(p, k), u.preimage(k).contains(p, 0));
  }
}

TEST(Cylinder, ForbiddenWordIsFlaggedNotDropped) {
  const Sft s = golden();
  const Cylinder c = Cylinder::make(s, 0, parse_word("11"));
  EXPECT_TRUE(c.empty_in_sft());
  EXPECT_EQ(c.word(), parse_word("11"));
  EXPECT_FALSE(Cylinder::make(s, 0, parse_word("101")).empty_in_sft());
  EXPECT_TRUE(is_empty(CylinderUnion::from_cylinder(c), s));
}

TEST(ResolveConstraints, IndependentCoordinatesInFullShift) {
  const Sft s = Sft::full_shift(2);
  const Resolution r = resolve_constraints({{0, cyl(s, 0, "0")}, {1, cyl(s, 0, "1")}}, s);
  ASSERT_TRUE(r.nonempty());
  EXPECT_EQ(r.set, normalize(cyl(s, 0, "01"), s));
  EXPECT_EQ(r.set.lo(), 0);
  EXPECT_EQ(r.set.patterns().size(), 1U);
}

TEST(ResolveConstraints, GoldenMeanForcedElevenIsEmpty) {
  const Sft s = golden();
  const Resolution r = resolve_constraints({{0, cyl(s, 0, "1")}, {1, cyl(s, 0, "1")}}, s);
  EXPECT_FALSE(r.nonempty());
  EXPECT_EQ(r.emptiness, Emptiness::forbidden_by_sft);
  EXPECT_TRUE(r.set.has_no_patterns());
}

TEST(ResolveConstraints, ContradictionIsDistinguished) {
  const Sft s = Sft::full_shift(2);
  const Resolution r = resolve_constraints({{0, cyl(s, 0, "0")}, {0, cyl(s, 0, "1")}}, s);
  EXPECT_EQ(r.emptiness, Emptiness::contradiction);
}

TEST(ResolveConstraints, SingleConstraintIsShiftedSet) {
  std::mt19937_64 rng(3);
  for (const Sft& s : panel_sfts()) {
    for (int trial = 0; trial < 40; ++trial) {
      const CylinderUnion u = random_union(rng, s, 0, 3);
      const int k = static_cast<int>(rng() % 9) - 4;
      const Resolution r = resolve_constraints({{k, u}}, s);
      EXPECT_TRUE(same_set(r.set, u.translated(k), s));
      EXPECT_EQ(r.nonempty(), !is_empty(u, s));
    }
  }
}

TEST(ResolveConstraints, AgreesWithBruteForceEnumeration) {
  std::mt19937_64 rng(20240601);
  for (const Sft& s : panel_sfts()) {
    for (int trial = 0; trial < 150; ++trial) {
      const ShiftedConstraintSet c = random_constraints(rng, s);
      const auto [lo, hi] = constraint_span(c);
      ASSERT_LE(hi - lo + 1, 14);
      const Resolution r = resolve_constraints(c, s);
      EXPECT_EQ(r.nonempty(), !brute_words(s, c, lo, hi).empty());
      // Canonical supports may sit outside the span (periodic systems), so compare
      // the word sets over the hull of both.
      const std::int64_t a = r.set.length() > 0 ? std::min(lo, r.set.lo()) : lo;
      const std::int64_t b = r.set.length() > 0 ? std::max(hi, r.set.hi()) : hi;
      EXPECT_EQ(words_of(s, r.set, a, b), brute_words(s, c, a, b)) << r.set.to_string();
    }
  }
}

TEST(Normalize, EqualSetsHaveEqualNormalForms) {
  std::mt19937_64 rng(77);
  for (const Sft& s : panel_sfts()) {
    for (int trial = 0; trial < 150; ++trial) {
      const CylinderUnion u = random_union(rng, s, static_cast<std::int64_t>(rng() % 5) - 2, 3);
      // The same set written out over a wider support.
      const std::int64_t lo = u.lo() - 2, hi = u.hi() + 2;
      const auto words = words_of(s, u, lo, hi);
      const CylinderUnion wide = CylinderUnion::from_words(lo, {words.begin(), words.end()});
      const CylinderUnion a = normalize(u, s), b = normalize(wide, s);
      EXPECT_TRUE(a.is_canonical());
      EXPECT_EQ(a, b) << a.to_string() << " vs " << b.to_string();
    }
  }
}

TEST(Normalize, WholeAndEmptyForms) {
  const Sft s = golden();
  EXPECT_TRUE(normalize(cyl(s, 3, "0").translated(0), s) != CylinderUnion::whole());
  const CylinderUnion both = CylinderUnion::from_words(4, {parse_word("0"), parse_word("1")});
  EXPECT_EQ(normalize(both, s), normalize(CylinderUnion::whole(), s));
  EXPECT_EQ(normalize(cyl(s, 0, "11"), s), normalize(CylinderUnion::empty(), s));
}

TEST(SetAlgebra, OperationsMatchWordSets) {
  std::mt19937_64 rng(99);
  for (const Sft& s : panel_sfts()) {
    for (int trial = 0; trial < 100; ++trial) {
      const CylinderUnion a = random_union(rng, s, static_cast<std::int64_t>(rng() % 3), 3);
      const CylinderUnion b = random_union(rng, s, static_cast<std::int64_t>(rng() % 4) - 1, 2);
      const std::int64_t lo = -2, hi = 6;
      const auto wa = words_of(s, a, lo, hi), wb = words_of(s, b, lo, hi);
      const auto all = words_of(s, CylinderUnion::whole(), lo, hi);
      std::set<Word> inter, uni, comp, diff;
      for (const Word& w : all) {
        const bool in_a = wa.count(w) > 0, in_b = wb.count(w) > 0;
        if (in_a && in_b) inter.insert(w);
        if (in_a || in_b) uni.insert(w);
        if (!in_a) comp.insert(w);
        if (in_a && !in_b) diff.insert(w);
      }
      EXPECT_EQ(words_of(s, intersect(a, b, s), lo, hi), inter);
      EXPECT_EQ(words_of(s, unite(a, b, s), lo, hi), uni);
      EXPECT_EQ(words_of(s, complement(a, s), lo, hi), comp);
      EXPECT_EQ(words_of(s, difference(a, b, s), lo, hi), diff);
      EXPECT_EQ(is_subset(a, b, s), diff.empty());
      EXPECT_EQ(is_empty(a, s), wa.empty());
    }
  }
}

TEST(SetAlgebra, LargeComplementKeepsRectangleForm) {
  const Sft s = Sft::full_shift(2);
  const CylinderUnion u = cyl(s, 0, "0110100110010110");
  const CylinderUnion c = complement(u, s);
  EXPECT_FALSE(c.is_canonical());
  EXPECT_TRUE(is_empty(intersect(c, u, s), s));
  EXPECT_TRUE(same_set(unite(c, u, s), CylinderUnion::whole(), s));
  const PointRep zero = PointRep::periodic(s, parse_word("0"));
  EXPECT_TRUE(c.contains(zero));
}

TEST(MetricDistance, SpecExamples) {
  const Sft s = Sft::full_shift(2);
  const PointRep x = PointRep::periodic(s, parse_word("01"));
  EXPECT_EQ(metric_distance(x, x, 10).value, 0.0);
  EXPECT_FALSE(metric_distance(x, x, 10).truncated);
  EXPECT_EQ(metric_distance(x, x.shifted(2), 10).value, 0.0);
  const PointRep zero = PointRep::periodic(s, parse_word("0"));
  const PointRep one = PointRep::periodic(s, parse_word("1"));
  EXPECT_EQ(metric_distance(zero, one, 10).value, 1.0);
  // Agree on -2..2, differ at coordinate 3.
  const PointRep y = PointRep::eventually_periodic(s, parse_word("0"), parse_word("000001"), parse_word("0"))
                         .shifted(-(-2));
  const PointRep y3 = PointRep::eventually_periodic(s, parse_word("0"), parse_word("1"), parse_word("0")).shifted(-3);
  EXPECT_EQ(y3.at(3), 1);
  EXPECT_EQ(metric_distance(zero, y3, 10).value, 0.125);
  EXPECT_EQ(y.at(3), 1);
  EXPECT_EQ(metric_distance(zero, y, 10).value, 0.125);
}

TEST(MetricDistance, SampledPointsTruncate) {
  const Sft s = Sft::full_shift(2);
  const PointRep a = PointRep::sampled(s, -10, Word(21, 0), 1);
  const PointRep b = PointRep::sampled(s, -10, Word(21, 0), 2);
  const Distance d = metric_distance(a, b, 5);
  EXPECT_TRUE(d.truncated);
  EXPECT_EQ(d.value, std::ldexp(1.0, -6));
}

TEST(MetricDistance, IsSymmetricAndSatisfiesTriangleInequality) {
  std::mt19937_64 rng(8);
  const Sft s = Sft::full_shift(2);
  std::vector<PointRep> pts;
  for (int i = 0; i < 14; ++i) {
    pts.push_back(PointRep::eventually_periodic(s, seqent::testing::random_word(rng, 2, 1 + rng() % 3),
                                                seqent::testing::random_word(rng, 2, rng() % 4),
                                                seqent::testing::random_word(rng, 2, 1 + rng() % 3))
                      .shifted(static_cast<std::int64_t>(rng() % 5) - 2));
  }
  pts.push_back(pts[0]);
  for (const auto& x : pts) {
    for (const auto& y : pts) {
      const double dxy = metric_distance(x, y, 12).value;
      EXPECT_EQ(dxy, metric_distance(y, x, 12).value);
      for (const auto& z : pts) {
        EXPECT_LE(dxy, metric_distance(x, z, 12).value + metric_distance(z, y, 12).value);
      }
    }
  }
}

TEST(Diameter, SpecExamples) {
  const Sft s = Sft::full_shift(2);
  EXPECT_EQ(diam_of_set(CylinderUnion::whole(), s, 8).value, 1.0);
  const Diameter d0 = diam_of_set(cyl(s, 0, "0"), s, 8);
  EXPECT_EQ(d0.value, 0.5);
  EXPECT_FALSE(d0.truncated);
  const int h = 5;
  const CylinderUnion deep = CylinderUnion::from_words(-h, {Word(2 * h + 1, 0)});
  const Diameter dd = diam_of_set(deep, s, h);
  EXPECT_TRUE(dd.truncated);
  EXPECT_EQ(dd.value, std::ldexp(1.0, -h - 1));
  EXPECT_THROW(diam_of_set(CylinderUnion::empty(), s, 4), Degenerate);
}

TEST(Diameter, SingletonInDeterministicSystemIsZero) {
  const Sft s = four_cycle_measure().sft();
  const Diameter d = diam_of_set(cyl(s, 0, "2"), s, 10);
  EXPECT_EQ(d.value, 0.0);
  EXPECT_FALSE(d.truncated);
  EXPECT_EQ(diam_of_set(CylinderUnion::whole(), s, 3).value, 1.0);
}

TEST(Diameter, MatchesPairwiseDistanceOracle) {
  // In the golden-mean shift the diameter of a cylinder union is the largest
  // distance between two points that extend its words.
  std::mt19937_64 rng(31);
  const Sft s = golden();
  for (int trial = 0; trial < 40; ++trial) {
    const CylinderUnion u = random_union(rng, s, static_cast<std::int64_t>(rng() % 5) - 2, 3);
    if (is_empty(u, s)) continue;
    const int h = 4;
    const auto words = words_of(s, u, -h - 1, h + 1);
    int best = h + 2;
    for (const Word& a : words) {
      for (const Word& b : words) {
        for (int n = 0; n <= h + 1; ++n) {
          if (a[static_cast<std::size_t>(h + 1 + n)] != b[static_cast<std::size_t>(h + 1 + n)] ||
              a[static_cast<std::size_t>(h + 1 - n)] != b[static_cast<std::size_t>(h + 1 - n)]) {
            best = std::min(best, n);
            break;
          }
        }
      }
    }
    const Diameter d = diam_of_set(u, s, h);
    if (best <= h) {
      EXPECT_FALSE(d.truncated);
      EXPECT_EQ(d.value, std::ldexp(1.0, -best));
    } else {
      EXPECT_TRUE(d.truncated || d.value == 0.0);
    }
  }
}

TEST(Sft, CyclicStructure) {
  const Sft four = four_cycle_measure().sft();
  EXPECT_TRUE(four.is_irreducible());
  EXPECT_EQ(four.period(), 4);
  const Sft g = golden();
  EXPECT_EQ(g.period(), 1);
  EXPECT_EQ(g.mixing_steps(), 2);
  EXPECT_EQ(Sft::full_shift(3).mixing_steps(), 1);
  const Sft bip(4, {{false, false, true, true}, {false, false, true, true}, {true, true, false, false}, {true, true, false, false}});
  EXPECT_EQ(bip.period(), 2);
  EXPECT_EQ(bip.cyclic_class(0), bip.cyclic_class(1));
  EXPECT_NE(bip.cyclic_class(0), bip.cyclic_class(2));
  const Sft two_loops(2, {{true, false}, {false, true}});
  EXPECT_FALSE(two_loops.is_irreducible());
  EXPECT_EQ(two_loops.period(), 0);
}

TEST(Normalize, PeriodicSystemsPlaceSingleCoordinateSetsAtOrigin) {
  const Sft s = four_cycle_measure().sft();
  const CylinderUnion a = normalize(cyl(s, 1, "0"), s);
  const CylinderUnion b = normalize(cyl(s, -1, "2"), s);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.lo(), 0);
  EXPECT_EQ(a, normalize(cyl(s, 0, "3"), s));
  EXPECT_EQ(a, normalize(cyl(s, 41, "012301"), s));
  const Sft bip(4, {{false, false, true, true}, {false, false, true, true}, {true, true, false, false}, {true, true, false, false}});
  const CylinderUnion cls = CylinderUnion::from_words(7, {parse_word("0"), parse_word("1")});
  EXPECT_EQ(normalize(cls, bip), normalize(CylinderUnion::from_words(0, {parse_word("2"), parse_word("3")}), bip));
}
