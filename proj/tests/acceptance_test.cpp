// One test per acceptance criterion; each prints its PASS/FAIL line.

#include <gtest/gtest.h>

#include <iostream>
#include <memory>

#include "seqent/acceptance.hpp"

namespace {

seqent::AcceptanceSuite& suite() {
  static seqent::AcceptanceSuite s(SEQENT_CONFIG_DIR);
  return s;
}

void check(int id) {
  const seqent::CriterionResult r = suite().run(id);
  std::cout << r.line() << std::endl;
  EXPECT_TRUE(r.pass) << r.detail;
}

}  // namespace

TEST(Acceptance, Criterion01ExactMeasureEngine) { check(1); }
TEST(Acceptance, Criterion02EntropyExactness) { check(2); }
TEST(Acceptance, Criterion03GoldenMeanIndependenceLaw) { check(3); }
TEST(Acceptance, Criterion04SeparationCounts) { check(4); }
TEST(Acceptance, Criterion05WitnessConstruction) { check(5); }
TEST(Acceptance, Criterion06InAndMsAgreeOnPanel) { check(6); }
TEST(Acceptance, Criterion07ConstantEReduction) { check(7); }
TEST(Acceptance, Criterion08PigeonholeLemma) { check(8); }
TEST(Acceptance, Criterion09MsImpliesDiam) { check(9); }
TEST(Acceptance, Criterion10Determinism) { check(10); }
