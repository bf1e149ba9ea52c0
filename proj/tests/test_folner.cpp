#include <gtest/gtest.h>

#include <random>
#include <set>

#include "seqent/error.hpp"
#include "seqent/folner.hpp"
#include "seqent/kernels.hpp"
#include "seqent/panel.hpp"

using namespace seqent;

namespace {

CylinderUnion cyl(const Sft& sft, std::int64_t start, const char* w) {
  return CylinderUnion::from_cylinder(Cylinder::make(sft, start, parse_word(w)));
}

/// |U_{k<n} (-F_k) + F_n| by explicit sets.
double tempered_oracle(const FolnerWindows& w, std::int64_t n_max) {
  double worst = 0;
  for (std::int64_t n = 2; n <= n_max; ++n) {
    std::set<std::int64_t> u;
    const auto fn = w.window(n);
    for (std::int64_t k = 1; k < n; ++k) {
      for (auto a : w.window(k)) {
        for (auto b : fn) u.insert(b - a);
      }
    }
    worst = std::max(worst, static_cast<double>(u.size()) / static_cast<double>(fn.size()));
  }
  return worst;
}

}  // namespace

TEST(Density, SpecExamples) {
  const auto w = FolnerWindows::canonical();
  const DensityEstimate all = density([](std::int64_t) { return true; }, w, 1000);
  EXPECT_EQ(all.upper_exact, 1);
  EXPECT_EQ(all.lower_exact, 1);
  const DensityEstimate evens = density([](std::int64_t n) { return n % 2 == 0; }, w, 1000);
  EXPECT_TRUE(evens.periodic);
  EXPECT_EQ(evens.upper_exact, Rational(1, 2));
  EXPECT_EQ(evens.lower_exact, Rational(1, 2));
  const DensityEstimate quarter = density([](std::int64_t n) { return n % 4 == 0; }, w, 1001);
  EXPECT_EQ(quarter.upper_exact, Rational(1, 4));
  EXPECT_EQ(quarter.lower_exact, Rational(1, 4));
  EXPECT_EQ(quarter.detected_period, 4);
}

TEST(Density, EventuallyPeriodicTakesExactPath) {
  const auto w = FolnerWindows::canonical();
  // A transient of 300 ones, then period 3 with one hit.
  const DensityEstimate d = density([](std::int64_t n) { return n < 300 || n % 3 == 1; }, w, 2000);
  EXPECT_TRUE(d.periodic);
  EXPECT_EQ(d.upper_exact, Rational(1, 3));
}

TEST(Density, TailExtremesWithoutPeriod) {
  // Indicator of the blocks [4^j, 2 * 4^j): oscillating averages.
  auto pred = [](std::int64_t n) {
    for (std::int64_t b = 1; b <= n; b *= 4) {
      if (n >= b && n < 2 * b) return true;
    }
    return false;
  };
  const DensityEstimate d = density(pred, FolnerWindows::canonical(), 5000);
  EXPECT_FALSE(d.periodic);
  EXPECT_LT(d.lower, d.upper);
  std::int64_t c = 0;
  Rational hi = 0, lo = 1;
  for (std::int64_t n = 1; n <= 5000; ++n) {
    c += pred(n - 1);
    if (n >= 2500) {
      Rational r(c, n);
      r.canonicalize();
      hi = std::max(hi, r);
      lo = std::min(lo, r);
    }
  }
  EXPECT_EQ(d.upper_exact, hi);
  EXPECT_EQ(d.lower_exact, lo);
}

TEST(Density, ComplementIdentityAndSubadditivity) {
  std::mt19937_64 rng(17);
  const auto w = FolnerWindows::canonical();
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::uint8_t> s(5000), t(5000);
    const double ps = 0.2 + 0.6 * static_cast<double>(trial) / 20.0;
    std::bernoulli_distribution ds(ps), dt(0.3);
    for (auto& x : s) x = ds(rng);
    for (auto& x : t) x = dt(rng);
    auto in_s = [&](std::int64_t n) { return s[static_cast<std::size_t>(n)] != 0; };
    auto in_t = [&](std::int64_t n) { return t[static_cast<std::size_t>(n)] != 0; };
    const auto ds_est = density(in_s, w, 5000);
    const auto dc_est = density([&](std::int64_t n) { return !in_s(n); }, w, 5000);
    EXPECT_EQ(ds_est.upper_exact, 1 - dc_est.lower_exact);
    const auto du = density([&](std::int64_t n) { return in_s(n) || in_t(n); }, w, 5000);
    EXPECT_LE(du.upper_exact, ds_est.upper_exact + density(in_t, w, 5000).upper_exact);
  }
}

TEST(Density, NonCanonicalWindows) {
  const auto shifted = FolnerWindows::from_rule("shifted", [](std::int64_t n) {
    std::vector<std::int64_t> v;
    for (std::int64_t i = 0; i < n; ++i) v.push_back(1000 + i);
    return v;
  });
  const DensityEstimate d = density([](std::int64_t n) { return n % 2 == 0; }, shifted, 100);
  // Windows start at the even number 1000: odd sizes carry one extra hit.
  EXPECT_EQ(d.upper_exact, Rational(26, 51));
  EXPECT_EQ(d.lower_exact, Rational(1, 2));
  EXPECT_THROW(density([](std::int64_t) { return true; }, shifted, 5), InvalidArgument);
}

TEST(Temperedness, CanonicalWindowsStayBelowTwo) {
  const auto w = FolnerWindows::canonical();
  const double c = temperedness_constant(w, 100);
  EXPECT_LE(c, 2.0);
  EXPECT_DOUBLE_EQ(c, tempered_oracle(w, 100));
  EXPECT_DOUBLE_EQ(c, 198.0 / 100.0);
}

TEST(Temperedness, SingletonWindowsGiveOne) {
  const auto w = FolnerWindows::from_rule("zero", [](std::int64_t) { return std::vector<std::int64_t>{0}; });
  EXPECT_DOUBLE_EQ(temperedness_constant(w, 50), 1.0);
}

TEST(Temperedness, LacunaryWindowsGrow) {
  const auto w = FolnerWindows::from_rule("lacunary", [](std::int64_t n) {
    std::vector<std::int64_t> v;
    for (std::int64_t i = 0; i < n; ++i) v.push_back(n * n + i);
    return v;
  });
  const double c10 = temperedness_constant(w, 10), c30 = temperedness_constant(w, 30);
  EXPECT_DOUBLE_EQ(c10, tempered_oracle(w, 10));
  EXPECT_DOUBLE_EQ(c30, tempered_oracle(w, 30));
  EXPECT_GT(c30, c10);
  EXPECT_GT(c30, 2.0);
}

TEST(BirkhoffAverage, SpecExamples) {
  const Sft s = Sft::full_shift(2);
  const auto w = FolnerWindows::canonical();
  const PointRep zero = PointRep::periodic(s, parse_word("0"));
  for (int n : {1, 7, 64}) {
    EXPECT_EQ(birkhoff_average(zero, cyl(s, 0, "0"), w, n), 1);
    EXPECT_EQ(birkhoff_average(zero, cyl(s, 0, "1"), w, n), 0);
  }
  const PointRep alt = PointRep::periodic(s, parse_word("01"));
  for (int n : {2, 10, 1000}) EXPECT_EQ(birkhoff_average(alt, cyl(s, 0, "0"), w, n), Rational(1, 2));
}

TEST(BirkhoffAverage, SampledWindowMustCoverOrbit) {
  const MarkovMeasure b = bernoulli_half();
  const PointRep p = sample_point(b, 0, 99, 1);
  const auto w = FolnerWindows::canonical();
  EXPECT_NO_THROW(birkhoff_average(p, cyl(b.sft(), 0, "01"), w, 99));
  EXPECT_THROW(birkhoff_average(p, cyl(b.sft(), 0, "01"), w, 100), WindowExceeded);
}

TEST(OrbitIndicator, KernelFamiliesAgree) {
  std::mt19937_64 rng(9);
  const MarkovMeasure g = golden_mean_measure();
  const PointRep p = sample_point(g, -50, 5000, 77);
  const kernels::Isa best = kernels::best_available();
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Word> words;
    for (int i = 0; i < 1 + static_cast<int>(rng() % 40); ++i) {
      Word w(1 + rng() % 5);
      for (auto& x : w) x = static_cast<Symbol>(rng() & 1U);
      words.push_back(w);
      words.back().resize(words.front().size());
    }
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    const CylinderUnion u = CylinderUnion::from_words(static_cast<std::int64_t>(rng() % 7) - 3, words);
    kernels::set_active(kernels::Isa::scalar);
    const auto scalar = orbit_indicator(p, u, 0, 4000);
    kernels::set_active(best);
    const auto fast = orbit_indicator(p, u, 0, 4000);
    ASSERT_EQ(scalar, fast);
    for (std::size_t s = 0; s < 4000; s += 97) EXPECT_EQ(scalar[s], u.contains(p, static_cast<std::int64_t>(s)) ? 1 : 0);
  }
}

TEST(BirkhoffAverage, ErgodicTheoremOnPanel) {
  const auto w = FolnerWindows::canonical();
  const std::int64_t n = 100000;
  for (const auto& sys : acceptance_panel()) {
    const MarkovMeasure& m = sys.measure;
    std::vector<PointRep> points;
    for (std::uint64_t seed = 0; seed < 20; ++seed) points.push_back(sample_point(m, 0, n + 3, 1000 + seed));
    for (std::size_t len = 1; len <= 3; ++len) {
      for (const Word& word : m.sft().admissible_words(len)) {
        const CylinderUnion c = CylinderUnion::from_words(0, {word});
        const double mu = to_double(measure_of(m, c));
        int good = 0;
        for (const auto& p : points) good += std::abs(to_double(birkhoff_average(p, c, w, n)) - mu) <= 0.02;
        EXPECT_GE(good, 19) << sys.id << " " << format_word(word);
      }
    }
  }
}
