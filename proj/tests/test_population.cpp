#include <gtest/gtest.h>

#include <algorithm>

#include "mplss/error.hpp"
#include "mplss/population.hpp"

using namespace mplss;

TEST(Population, SortsDescendingAndMergesDuplicates) {
  PopulationSpectrum s({{1.0, 0.25}, {15.0, 0.5}, {1.0, 0.25}}, 10.0);
  ASSERT_EQ(s.atoms().size(), 2u);
  EXPECT_EQ(s.atoms()[0].value, 15.0);
  EXPECT_DOUBLE_EQ(s.atoms()[1].weight, 0.5);
  EXPECT_EQ(s.largest(), 15.0);
  EXPECT_EQ(s.smallest(), 1.0);
}

TEST(Population, RejectsBadWeights) {
  EXPECT_THROW(PopulationSpectrum({{1.0, 0.5}, {2.0, 0.4}}, 10.0), DomainError);
  EXPECT_THROW(PopulationSpectrum({{1.0, 1.5}, {2.0, -0.5}}, 10.0), DomainError);
  EXPECT_THROW(PopulationSpectrum({}, 10.0), DomainError);
}

TEST(Population, EnforcesTauRange) {
  EXPECT_THROW(PopulationSpectrum({{1e-5, 1.0}}, 10.0), DomainError);
  EXPECT_THROW(PopulationSpectrum({{2e4, 1.0}}, 10.0), DomainError);
  EXPECT_NO_THROW(PopulationSpectrum({{1e-5, 1.0}}, 10.0, 1e-6));
}

TEST(Population, RejectsNonPositivePhi) {
  EXPECT_THROW(PopulationSpectrum::identity(0.0), DomainError);
  EXPECT_THROW(PopulationSpectrum::identity(-1.0), DomainError);
}

TEST(Population, IdentityAndMoments) {
  const auto s = PopulationSpectrum::identity(4.0);
  EXPECT_TRUE(s.is_identity());
  EXPECT_DOUBLE_EQ(s.sqrt_phi(), 2.0);
  EXPECT_DOUBLE_EQ(s.moment(3), 1.0);
  const auto t = PopulationSpectrum::parse("0.5:1,0.5:15", 100.0);
  EXPECT_FALSE(t.is_identity());
  EXPECT_DOUBLE_EQ(t.moment(1), 8.0);
  EXPECT_DOUBLE_EQ(t.moment(2), 113.0);
}

TEST(Population, ParseRoundTrip) {
  const auto s = PopulationSpectrum::parse(" 0.25:3 , 0.75:1.5", 7.0);
  const auto t = PopulationSpectrum::parse(s.to_string(), 7.0);
  ASSERT_EQ(s.atoms().size(), t.atoms().size());
  for (std::size_t i = 0; i < s.atoms().size(); ++i) {
    EXPECT_EQ(s.atoms()[i].value, t.atoms()[i].value);
    EXPECT_EQ(s.atoms()[i].weight, t.atoms()[i].weight);
  }
}

TEST(Population, ParseRenormalizesSmallDrift) {
  const auto s = PopulationSpectrum::parse("0.3333333333:1,0.6666666667:2", 5.0);
  double total = 0.0;
  for (const Atom& a : s.atoms()) total += a.weight;
  EXPECT_NEAR(total, 1.0, 1e-15);
  EXPECT_THROW(PopulationSpectrum::parse("0.3:1,0.6:2", 5.0), DomainError);
}

TEST(Population, ParseReportsColumn) {
  try {
    PopulationSpectrum::parse("0.5:1,0.5:abc", 100.0);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.column(), 11u);
  }
  EXPECT_THROW(PopulationSpectrum::parse("0.5-1", 100.0), ParseError);
  EXPECT_THROW(PopulationSpectrum::parse("", 100.0), ParseError);
}

TEST(Population, ExpandHasExactLength) {
  const auto s = PopulationSpectrum::parse("0.5:1,0.5:15", 100.0);
  for (std::size_t p : {1u, 7u, 100u, 10001u}) {
    const auto d = s.expand(p);
    EXPECT_EQ(d.size(), p);
  }
  const auto d = s.expand(10);
  EXPECT_EQ(std::count(d.begin(), d.end(), 15.0), 5);
}

TEST(Population, FromDiagonal) {
  const std::vector<double> diag{2.0, 1.0, 2.0, 1.0};
  const auto s = PopulationSpectrum::from_diagonal(diag, 3.0);
  ASSERT_EQ(s.atoms().size(), 2u);
  EXPECT_DOUBLE_EQ(s.atoms()[0].weight, 0.5);
}
