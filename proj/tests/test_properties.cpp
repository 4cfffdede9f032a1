#include <gtest/gtest.h>

#include "properties.hpp"

namespace {

const std::vector<props::Outcome>& outcomes() {
  static const std::vector<props::Outcome> all = props::run_all(500);
  return all;
}

void check(const std::string& name) {
  for (const props::Outcome& o : outcomes()) {
    if (o.name != name) continue;
    EXPECT_GE(o.cases, 500u);
    EXPECT_EQ(o.failures, 0u) << "worst " << o.worst << " first " << o.first_failure;
    return;
  }
  FAIL() << "no outcome named " << name;
}

}  // namespace

TEST(Properties, SelfConsistency) { check("self-consistency"); }
TEST(Properties, Herglotz) { check("herglotz"); }
TEST(Properties, ConjugateSymmetry) { check("conjugate symmetry"); }
TEST(Properties, DerivativeIdentity) { check("m/m' identity"); }
TEST(Properties, KernelSymmetry) { check("kernel symmetry"); }
TEST(Properties, CovariancePsd) { check("covariance PSD"); }
TEST(Properties, Determinism) { check("determinism"); }
