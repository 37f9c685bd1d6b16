// Acceptance suite: the nine criteria at their stated tolerances.
#include <iostream>

#include <gtest/gtest.h>

#include "kepler_arcs/acceptance.hpp"

namespace {

kepler_arcs::AcceptanceSuite& suite() {
  static kepler_arcs::AcceptanceSuite s;
  return s;
}

void check(int id) {
  const auto r = suite().run(id);
  std::cout << r.line() << std::endl;
  EXPECT_TRUE(r.passed) << r.detail;
}

}  // namespace

TEST(Acceptance, EnumerationExactness) { check(1); }
TEST(Acceptance, DynamicsConsistency) { check(2); }
TEST(Acceptance, ClassificationReproduction) { check(3); }
TEST(Acceptance, ThreeWayAgreement) { check(4); }
TEST(Acceptance, ConjugateEqualsAntipodal) { check(5); }
TEST(Acceptance, MorseIndexTheorem) { check(6); }
TEST(Acceptance, BifurcationConvergence) { check(7); }
TEST(Acceptance, ClosedEllipseNonMinimality) { check(8); }
TEST(Acceptance, VariationalCalculus) { check(9); }

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  return RUN_ALL_TESTS();
}
