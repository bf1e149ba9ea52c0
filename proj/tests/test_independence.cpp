#include <gtest/gtest.h>

#include <map>
#include <random>

#include "seqent/error.hpp"
#include "seqent/independence.hpp"
#include "seqent/panel.hpp"
#include "support/oracles.hpp"

using namespace seqent;

namespace {

CylinderUnion cyl(const Sft& sft, std::int64_t start, const char* w) {
  return CylinderUnion::from_cylinder(Cylinder::make(sft, start, parse_word(w)));
}

using Ints = std::vector<std::int64_t>;

/// Every sigma checked by enumerating admissible words over the hull of all constraints.
bool brute_independent(const Sft& sft, const CylinderUnion& a1, const CylinderUnion& a2, const Ints& i_set,
                       const EMap& e) {
  if (i_set.empty()) return true;
  const std::size_t n = i_set.size();
  for (std::uint64_t sigma = 0; sigma < (std::uint64_t{1} << n); ++sigma) {
    ShiftedConstraintSet c;
    for (std::size_t j = 0; j < n; ++j) {
      c.push_back({0, e.at(i_set[j])});
      c.push_back({i_set[j], ((sigma >> j) & 1U) ? a2 : a1});
    }
    std::int64_t lo = 0, hi = 0;
    bool first = true;
    bool any_empty = false;
    for (const auto& [shift, set] : c) {
      if (set.has_no_patterns()) any_empty = true;
      if (set.length() == 0) continue;
      lo = first ? set.lo() + shift : std::min(lo, set.lo() + shift);
      hi = first ? set.hi() + shift : std::max(hi, set.hi() + shift);
      first = false;
    }
    if (any_empty) return false;
    if (first) continue;
    if (seqent::testing::brute_words(sft, c, lo - 1, hi + 1).empty()) return false;
  }
  return true;
}

/// Largest independent subset by plain enumeration of all subsets; smallest lexicographic on ties.
Ints brute_max_subset(const Sft& sft, const CylinderUnion& a1, const CylinderUnion& a2, const Ints& f,
                      const EMap& e) {
  Ints best;
  bool found = false;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << f.size()); ++mask) {
    Ints s;
    for (std::size_t j = 0; j < f.size(); ++j) {
      if ((mask >> j) & 1U) s.push_back(f[j]);
    }
    if (found && s.size() < best.size()) continue;
    if (!is_independence_set(sft, a1, a2, s, e, 64)) continue;
    if (!found || s.size() > best.size() || s < best) best = s;
    found = true;
  }
  return best;
}

Ints range(std::int64_t n) {
  Ints f;
  for (std::int64_t i = 0; i < n; ++i) f.push_back(i);
  return f;
}

/// A TableE whose sets each miss a random cylinder of measure <= 1/64.
EMap random_table(std::mt19937_64& rng, const MarkovMeasure& m) {
  const Sft& sft = m.sft();
  auto hole = [&] {
    std::uniform_int_distribution<int> start(-2, 8);
    for (int tries = 0;; ++tries) {
      const Word w = seqent::testing::random_word(rng, sft.alphabet_size(), 6);
      auto c = CylinderUnion::from_words(start(rng), {w});
      if (measure_of(m, normalize(c, sft)) <= Rational(1, 64) || tries > 50) return complement(c, sft);
    }
  };
  std::map<std::int64_t, CylinderUnion> overrides;
  std::uniform_int_distribution<int> shift(0, 23);
  for (int i = 0; i < 3; ++i) overrides[shift(rng)] = hole();
  return EMap::table(hole(), std::move(overrides));
}

}  // namespace

TEST(IsIndependenceSet, SpecExamples) {
  const Sft full = Sft::full_shift(2);
  EXPECT_TRUE(is_independence_set(full, cyl(full, 0, "0"), cyl(full, 0, "1"), Ints{0, 1, 2}, EMap::whole()));
  const auto g = golden_mean_measure();
  const Sft& gm = g.sft();
  EXPECT_FALSE(is_independence_set(gm, cyl(gm, 0, "0"), cyl(gm, 0, "1"), Ints{0, 1}, EMap::whole()));
  EXPECT_TRUE(is_independence_set(gm, cyl(gm, 0, "0"), cyl(gm, 0, "1"), Ints{0, 2}, EMap::whole()));
  EXPECT_TRUE(is_independence_set(gm, cyl(gm, 0, "0"), cyl(gm, 0, "1"), Ints{}, EMap::whole()));
  EXPECT_FALSE(is_independence_set(full, CylinderUnion::empty(), cyl(full, 0, "1"), Ints{3}, EMap::whole()));
}

TEST(IsIndependenceSet, ConstantEIsNotShifted) {
  const Sft full = Sft::full_shift(2);
  // E = {x_5 = 1}: with A = [0]_0 chosen at s = 5 the intersection is empty.
  const EMap e = EMap::constant(cyl(full, 5, "1"));
  EXPECT_FALSE(is_independence_set(full, cyl(full, 0, "0"), cyl(full, 0, "1"), Ints{5}, e));
  EXPECT_TRUE(is_independence_set(full, cyl(full, 0, "0"), cyl(full, 0, "1"), Ints{0, 4, 6}, e));
}

TEST(IsIndependenceSet, RefusesBeyondSigmaCap) {
  const Sft full = Sft::full_shift(2);
  EXPECT_THROW(is_independence_set(full, cyl(full, 0, "0"), cyl(full, 0, "1"), range(21), EMap::whole()),
               CapExceeded);
  EXPECT_TRUE(is_independence_set(full, cyl(full, 0, "0"), cyl(full, 0, "1"), range(20), EMap::whole()));
}

TEST(IsIndependenceSet, AgreesWithBruteForceOnRandomInstances) {
  std::mt19937_64 rng(4242);
  const std::vector<MarkovMeasure> systems{bernoulli_half(), golden_mean_measure(), four_cycle_measure()};
  std::uniform_int_distribution<int> coin(0, 1);
  int positives = 0, total = 0;
  for (const auto& m : systems) {
    const Sft& sft = m.sft();
    for (int trial = 0; trial < 60; ++trial) {
      const auto a1 = seqent::testing::random_union(rng, sft, -1, 2, 2);
      const auto a2 = seqent::testing::random_union(rng, sft, 0, 2, 2);
      Ints i_set;
      for (std::int64_t s = 0; s < 7; ++s) {
        if (coin(rng)) i_set.push_back(s);
      }
      const EMap e = coin(rng) ? EMap::whole() : EMap::constant(complement(cyl(sft, coin(rng) * 2, "01"), sft));
      const bool got = is_independence_set(sft, a1, a2, i_set, e);
      EXPECT_EQ(got, brute_independent(sft, a1, a2, i_set, e)) << a1.to_string() << " " << a2.to_string();
      positives += got;
      ++total;
    }
  }
  EXPECT_GT(positives, total / 10);
  EXPECT_LT(positives, total);
}

TEST(IsIndependenceSet, FailureIsHereditary) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> coin(0, 1);
  const std::vector<MarkovMeasure> systems{bernoulli_half(), golden_mean_measure(), four_cycle_measure()};
  for (const auto& m : systems) {
    const Sft& sft = m.sft();
    for (int trial = 0; trial < 40; ++trial) {
      const auto a1 = seqent::testing::random_union(rng, sft, 0, 1, 2);
      const auto a2 = seqent::testing::random_union(rng, sft, 0, 2, 2);
      Ints i_set;
      for (std::int64_t s = 0; s < 6; ++s) {
        if (coin(rng)) i_set.push_back(s);
      }
      if (is_independence_set(sft, a1, a2, i_set, EMap::whole())) continue;
      for (int extra = 0; extra < 5; ++extra) {
        Ints bigger = i_set;
        bigger.push_back(6 + extra);
        bigger.push_back(std::uniform_int_distribution<int>(0, 5)(rng));
        EXPECT_FALSE(is_independence_set(sft, a1, a2, bigger, EMap::whole()));
      }
    }
  }
}

TEST(MaxIndependenceSubset, SpecExamples) {
  const Sft full = Sft::full_shift(2);
  const auto r = max_independence_subset(full, cyl(full, 0, "0"), cyl(full, 0, "1"), range(6), EMap::whole());
  EXPECT_EQ(r.best_i, range(6));
  EXPECT_EQ(r.ratio, 1);
  EXPECT_TRUE(r.exhaustive);

  const auto g = golden_mean_measure();
  const Sft& gm = g.sft();
  const auto rg = max_independence_subset(gm, cyl(gm, 0, "0"), cyl(gm, 0, "1"), range(6), EMap::whole());
  EXPECT_EQ(rg.best_i, (Ints{0, 2, 4}));
  EXPECT_EQ(rg.ratio, Rational(1, 2));

  for (const auto& m : {bernoulli_half(), golden_mean_measure(), four_cycle_measure()}) {
    const auto re = max_independence_subset(m.sft(), CylinderUnion::empty(), cyl(m.sft(), 0, "1"), range(5),
                                            EMap::whole());
    EXPECT_TRUE(re.best_i.empty());
    EXPECT_EQ(re.ratio, 0);
  }
}

TEST(MaxIndependenceSubset, GoldenMeanCeilingLaw) {
  const auto g = golden_mean_measure();
  const Sft& gm = g.sft();
  for (std::int64_t n = 1; n <= 12; ++n) {
    const auto r = max_independence_subset(gm, cyl(gm, 0, "0"), cyl(gm, 0, "1"), range(n), EMap::whole());
    EXPECT_EQ(static_cast<std::int64_t>(r.best_i.size()), (n + 1) / 2) << n;
  }
}

TEST(MaxIndependenceSubset, MatchesPlainEnumeration) {
  std::mt19937_64 rng(555);
  const std::vector<MarkovMeasure> systems{bernoulli_half(), golden_mean_measure(), four_cycle_measure()};
  for (const auto& m : systems) {
    const Sft& sft = m.sft();
    for (int trial = 0; trial < 6; ++trial) {
      const auto a1 = seqent::testing::random_union(rng, sft, 0, 2, 2);
      const auto a2 = seqent::testing::random_union(rng, sft, -1, 2, 2);
      const EMap e = trial % 2 ? EMap::whole() : EMap::constant(complement(cyl(sft, 3, "00"), sft));
      const Ints f = range(trial < 3 ? 8 : 12);
      const auto r = max_independence_subset(sft, a1, a2, f, e);
      EXPECT_EQ(r.best_i, brute_max_subset(sft, a1, a2, f, e));
    }
  }
}

TEST(MaxIndependenceSubset, TableMapsMatchPlainEnumeration) {
  std::mt19937_64 rng(1234);
  const std::vector<MarkovMeasure> systems{bernoulli_half(), golden_mean_measure(), four_cycle_measure()};
  for (const auto& m : systems) {
    const Sft& sft = m.sft();
    for (int trial = 0; trial < 4; ++trial) {
      const auto a1 = seqent::testing::random_union(rng, sft, 0, 1, 2);
      const auto a2 = seqent::testing::random_union(rng, sft, 0, 2, 2);
      std::map<std::int64_t, CylinderUnion> overrides;
      overrides[trial + 1] = complement(cyl(sft, trial, "00"), sft);
      overrides[5] = cyl(sft, 2, trial % 2 ? "0" : "1");
      const EMap e = EMap::table(complement(cyl(sft, 1, "10"), sft), overrides);
      const Ints f = range(9);
      EXPECT_EQ(max_independence_subset(sft, a1, a2, f, e).best_i, brute_max_subset(sft, a1, a2, f, e));
    }
  }
}

TEST(MaxIndependenceSubset, GreedyBeyondCap) {
  const auto g = golden_mean_measure();
  const Sft& gm = g.sft();
  const auto r = max_independence_subset(gm, cyl(gm, 0, "0"), cyl(gm, 0, "1"), range(30), EMap::whole());
  EXPECT_FALSE(r.exhaustive);
  EXPECT_EQ(r.best_i.size(), 15u);
}

TEST(MaxIndependenceSubset, ShrinkingEDoesNotEnlargeResult) {
  std::mt19937_64 rng(8);
  const std::vector<MarkovMeasure> systems{bernoulli_half(), golden_mean_measure()};
  for (const auto& m : systems) {
    const Sft& sft = m.sft();
    const auto a1 = cyl(sft, 0, "0"), a2 = cyl(sft, 0, "1");
    for (int trial = 0; trial < 5; ++trial) {
      const EMap big = random_table(rng, m);
      const auto& t = std::get<TableE>(big.rep());
      std::map<std::int64_t, CylinderUnion> smaller = t.overrides;
      smaller[trial] = intersect(big.at(trial), complement(cyl(sft, trial, "1"), sft), sft);
      const EMap small = EMap::table(t.default_set, smaller);
      const auto rb = max_independence_subset(sft, a1, a2, range(10), big);
      const auto rs = max_independence_subset(sft, a1, a2, range(10), small);
      EXPECT_LE(rs.best_i.size(), rb.best_i.size());
      const auto rx = max_independence_subset(sft, a1, a2, range(10), EMap::whole());
      EXPECT_LE(rb.best_i.size(), rx.best_i.size());
    }
  }
}

TEST(IndependenceDensityProfile, SpecExamples) {
  const auto b = bernoulli_half();
  const EMap whole[] = {EMap::whole()};
  const Ints ns{4, 8, 12, 16, 20};
  for (const auto& r : independence_density_profile(b.sft(), b, cyl(b.sft(), 0, "0"), cyl(b.sft(), 0, "1"), ns, whole)) {
    EXPECT_EQ(r.ratio, 1);
  }
  const auto g = golden_mean_measure();
  Ints gns;
  for (std::int64_t n = 1; n <= 12; ++n) gns.push_back(n);
  const auto gr = independence_density_profile(g.sft(), g, cyl(g.sft(), 0, "0"), cyl(g.sft(), 0, "1"), gns, whole);
  for (std::size_t i = 0; i < gns.size(); ++i) {
    Rational want((gns[i] + 1) / 2, gns[i]);
    want.canonicalize();
    EXPECT_EQ(gr[i].ratio, want);
  }

  const auto c = four_cycle_measure();
  const auto cr = independence_density_profile(c.sft(), c, cyl(c.sft(), 0, "0"), cyl(c.sft(), 0, "2"),
                                               Ints{2, 4, 8, 12}, whole);
  for (const auto& r : cr) EXPECT_EQ(r.best_i.size(), 1u);
}

TEST(IndependenceDensityProfile, TakesWorstMapOfFamily) {
  const auto b = bernoulli_half();
  const Sft& sft = b.sft();
  const EMap family[] = {EMap::whole(), bad_constant_e(b, 0, 1, cyl(sft, 0, "0"), cyl(sft, 0, "1"))};
  const auto r = independence_density_profile(sft, b, cyl(sft, 0, "0"), cyl(sft, 0, "1"), Ints{6}, family);
  EXPECT_EQ(r[0].ratio, Rational(5, 6));
  EXPECT_EQ(r[0].e_map, family[1].describe());
}

TEST(BadConstantE, SpecExamples) {
  const auto b = bernoulli_half();
  const Sft& sft = b.sft();
  const auto whole_e = bad_constant_e(b, 0, 3, CylinderUnion::whole(), CylinderUnion::whole());
  EXPECT_TRUE(is_empty(whole_e.at(0), sft));
  EXPECT_EQ(whole_e.min_measure(b), 0);
  EXPECT_EQ(bad_constant_e(b, 0, 1, cyl(sft, 0, "0"), cyl(sft, 0, "1")).min_measure(b), Rational(3, 4));
  const auto g = golden_mean_measure();
  const auto gx = bad_constant_e(g, 0, 1, cyl(g.sft(), 0, "1"), cyl(g.sft(), 0, "1"));
  EXPECT_TRUE(same_set(gx.at(7), CylinderUnion::whole(), g.sft()));
  EXPECT_EQ(gx.min_measure(g), 1);
}

TEST(BadConstantE, MeasureIsOneMinusConstraintMeasure) {
  std::mt19937_64 rng(17);
  for (const auto& m : {bernoulli_half(), golden_mean_measure(), four_cycle_measure()}) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto ux = seqent::testing::random_union(rng, m.sft(), -1, 3, 2);
      const auto uy = seqent::testing::random_union(rng, m.sft(), 0, 2, 2);
      const std::int64_t s = trial % 4, t = (trial * 3) % 5;
      EXPECT_EQ(bad_constant_e(m, s, t, ux, uy).min_measure(m),
                1 - measure_of_constraints(m, {{s, ux}, {t, uy}}));
    }
  }
}

TEST(ClassifyInPair, SpecExamples) {
  const auto b = bernoulli_half();
  const Sft& full = b.sft();
  const auto zeros = PointRep::periodic(full, parse_word("0"));
  const auto ones = PointRep::periodic(full, parse_word("1"));
  InParams p;
  p.n_list = {6, 12};
  const auto v = classify_in_pair(full, b, zeros, ones, 3, p);
  EXPECT_EQ(v.classification, Classification::positive);
  EXPECT_GT(v.eps_certified, 0.0);
  EXPECT_TRUE(v.well_formed());
  EXPECT_EQ(v.witnesses.size(), 4u);

  const auto c = four_cycle_measure();
  const auto x = PointRep::periodic(c.sft(), parse_word("0123"));
  for (const char* other : {"1230", "2301", "3012"}) {
    const auto y = PointRep::periodic(c.sft(), parse_word(other));
    EXPECT_EQ(classify_in_pair(c.sft(), c, x, y, 1, InParams{}).classification, Classification::negative);
  }
  EXPECT_THROW(classify_in_pair(full, b, zeros, zeros, 2, p), InvalidArgument);
}

TEST(ClassifyInPair, GoldenMeanGeneratorPairIsPositive) {
  const auto g = golden_mean_measure();
  const auto x = PointRep::periodic(g.sft(), parse_word("0"));
  const auto y = PointRep::eventually_periodic(g.sft(), parse_word("0"), parse_word("1"), parse_word("0"));
  const auto v = classify_in_pair(g.sft(), g, x, y, 1, InParams{});
  EXPECT_EQ(v.classification, Classification::positive);
}

TEST(ClassifyInPair, FailingExtraRemovesTheEpsItQualifiesFor) {
  const auto b = bernoulli_half();
  const Sft& sft = b.sft();
  const auto zeros = PointRep::periodic(sft, parse_word("0"));
  const auto ones = PointRep::periodic(sft, parse_word("1"));
  InParams p;
  p.n_list = {6};
  const auto plain = classify_in_pair(sft, b, zeros, ones, 0, p);
  ASSERT_EQ(plain.classification, Classification::positive);
  EXPECT_EQ(plain.eps_certified, 0.5);

  // E(i) = {x_i != 0} blocks every i, so no nonempty I is independent. Each
  // E(i) has measure 1/2, so only eps = 0.5 admits this map.
  std::map<std::int64_t, CylinderUnion> overrides;
  for (std::int64_t i = 0; i < 6; ++i) overrides[i] = cyl(sft, i, "1");
  p.extras = {EMap::table(CylinderUnion::whole(), overrides)};
  const auto v = classify_in_pair(sft, b, zeros, ones, 0, p);
  EXPECT_EQ(v.classification, Classification::positive);
  EXPECT_EQ(v.eps_certified, 0.2);

  // A passing extra leaves the verdict and its witness untouched.
  p.extras = {EMap::table(CylinderUnion::whole(), {})};
  const auto same = classify_in_pair(sft, b, zeros, ones, 0, p);
  EXPECT_EQ(same.eps_certified, plain.eps_certified);
  ASSERT_EQ(same.witnesses.size(), plain.witnesses.size());
  EXPECT_EQ(same.witnesses[0].label, plain.witnesses[0].label);
}

TEST(EMap, ValidityUsesExactDecimals) {
  const auto b = bernoulli_half();
  const Sft& sft = b.sft();
  // Measure exactly 3/4: valid for eps = 0.25, not below.
  const EMap e = bad_constant_e(b, 0, 1, cyl(sft, 0, "0"), cyl(sft, 0, "1"));
  EXPECT_TRUE(e.valid_for(b, 0.25));
  EXPECT_FALSE(e.valid_for(b, 0.2));
  EXPECT_EQ(decimal_rational(0.02), Rational(1, 50));
  EXPECT_EQ(decimal_rational(-1.5e-3), Rational(-3, 2000));
}
