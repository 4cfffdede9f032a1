#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "json.hpp"
#include "mplss/error.hpp"
#include "mplss/simulation.hpp"

using namespace mplss;

namespace {

EnsembleConfig small_cfg(std::uint64_t seed = 1) {
  EnsembleConfig cfg;
  cfg.n = 40;
  cfg.phi = 20.0;
  cfg.seed = seed;
  cfg.reps = 120;
  return cfg;
}

}  // namespace

TEST(EntryDistribution, Kappa4AndStandardization) {
  EXPECT_EQ(kappa4_of(EntryDistribution::gaussian()), 0.0);
  EXPECT_EQ(kappa4_of(EntryDistribution::twopoint_neg()), -1.5);
  EXPECT_EQ(kappa4_of(EntryDistribution::twopoint_pos()), 2.0);
  for (const auto& d : {EntryDistribution::twopoint_neg(), EntryDistribution::twopoint_pos(),
                        EntryDistribution::custom(0.2)}) {
    const double q = 1.0 - d.p_plus;
    EXPECT_NEAR(d.p_plus * d.v_plus + q * d.v_minus, 0.0, 1e-14);
    EXPECT_NEAR(d.p_plus * d.v_plus * d.v_plus + q * d.v_minus * d.v_minus, 1.0, 1e-14);
    const double k4 = d.p_plus * std::pow(d.v_plus, 4) + q * std::pow(d.v_minus, 4) - 3.0;
    EXPECT_NEAR(kappa4_of(d), k4, 1e-12);
  }
  // Symmetric two-point law is the minimum kappa4 = -2.
  EXPECT_NEAR(kappa4_of(EntryDistribution::custom(0.5)), -2.0, 1e-14);
  EXPECT_THROW(EntryDistribution::custom(0.5, 1.0, -0.5), DomainError);
  EXPECT_THROW(EntryDistribution::custom(1.0), DomainError);
}

TEST(EntryDistribution, ParseNames) {
  EXPECT_EQ(EntryDistribution::parse("twopoint_pos").tag, DistTag::twopoint_pos);
  EXPECT_EQ(EntryDistribution::parse("custom:0.25").p_plus, 0.25);
  EXPECT_EQ(EntryDistribution::parse(EntryDistribution::twopoint_neg().name()).tag,
            DistTag::twopoint_neg);
  EXPECT_THROW(EntryDistribution::parse("laplace"), ParseError);
  EXPECT_THROW(EntryDistribution::parse("custom:x"), ParseError);
}

TEST(SplitMix, StreamsAreDeterministicAndDistinct) {
  SplitMix64 a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  for (int i = 0; i < 10; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
    EXPECT_NE(x, d());
  }
}

TEST(Sampling, DeterministicPerReplicate) {
  const EnsembleConfig cfg = small_cfg(99);
  const Eigen::MatrixXd A = sample_matrix(cfg, 5);
  EXPECT_EQ(A.rows(), 800);
  EXPECT_EQ(A.cols(), 40);
  EXPECT_TRUE(A.isApprox(sample_matrix(cfg, 5), 0.0));
  EXPECT_FALSE(A.isApprox(sample_matrix(cfg, 6)));
}

TEST(Sampling, EntryMomentsMatchLaw) {
  for (const auto& d : {EntryDistribution::gaussian(), EntryDistribution::twopoint_neg(),
                        EntryDistribution::twopoint_pos()}) {
    EnsembleConfig cfg;
    cfg.n = 100;
    cfg.phi = 100.0;  // p n = 1e6
    cfg.dist = d;
    cfg.seed = 2024;
    const Eigen::MatrixXd X = sample_matrix(cfg, 0);
    const double scale = std::pow(static_cast<double>(X.size()), 0.25);
    const Eigen::ArrayXd y = X.array().reshaped() * scale;
    const double N = static_cast<double>(y.size());
    const double mean = y.mean();
    const double var = (y - mean).square().sum() / (N - 1);
    const double m4 = y.pow(4).mean();
    EXPECT_NEAR(mean, 0.0, 5.0 / std::sqrt(N)) << d.name();
    EXPECT_NEAR(var, 1.0, 5.0 * std::sqrt((m4 - 1.0) / N)) << d.name();
    EXPECT_NEAR(m4 - 3.0, kappa4_of(d), 0.05) << d.name();
  }
}

TEST(Sampling, StreamingMatchesDenseGram) {
  EnsembleConfig cfg = small_cfg(3);
  cfg.dist = EntryDistribution::twopoint_pos();
  const auto sigma = AlternativeSpec::cluster(0.5, 1.0).diagonal(cfg.p());
  cfg = cfg.with_sigma(sigma);
  const auto a = sample_eigenvalues(cfg, 2);
  const auto b = gram_eigenvalues(sample_matrix(cfg, 2), sigma);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-10 * b.back());
}

TEST(Alternatives, Diagonals) {
  const auto c = AlternativeSpec::cluster(0.25, 0.5).diagonal(10);
  EXPECT_EQ(std::count(c.begin(), c.end(), 1.5), 3);  // round(2.5) = 3
  const auto s = AlternativeSpec::spiked(2, 4.0).diagonal(10);
  EXPECT_EQ(s[0], 5.0);
  EXPECT_EQ(s[1], 5.0);
  EXPECT_EQ(s[2], 1.0);
  EXPECT_THROW(AlternativeSpec::cluster(0.5, -0.1), DomainError);
}

TEST(Config, Validation) {
  EnsembleConfig cfg = small_cfg();
  cfg.phi = 0.6;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = small_cfg();
  cfg.max_entries = 100;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = small_cfg();
  cfg.sigma = {1.0, 2.0};
  EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(Parallel, MatchesSerialAndRethrowsLowestIndex) {
  std::vector<int> out(100, 0);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], static_cast<int>(i * i));
  try {
    parallel_for(50, 3, [](std::size_t i) {
      if (i == 7 || i == 30) throw DomainError("fail " + std::to_string(i));
    });
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("fail 7"), std::string::npos);
  }
  EXPECT_EQ(resolve_threads(3), 3u);
  EXPECT_GE(resolve_threads(0), 1u);
}

TEST(Parallel, SimulationIsThreadCountInvariant) {
  const EnsembleConfig cfg = small_cfg(17);
  const std::vector<StatKind> kinds{StatKind::t1g, StatKind::t3l};
  SimulationOptions one;
  one.threads = 1;
  SimulationOptions four;
  four.threads = 4;
  const auto a = simulate_statistics(cfg, kinds, one);
  const auto b = simulate_statistics(cfg, kinds, four);
  EXPECT_EQ(a.raw, b.raw);
  EXPECT_EQ(a.z, b.z);
}

TEST(KsUtilities, KnownValues) {
  EXPECT_NEAR(ks_normal({0.0}), 0.5, 1e-15);
  EXPECT_NEAR(ks_two_sample({1, 2, 3}, {1, 2, 3}), 0.0, 0.0);
  EXPECT_NEAR(ks_two_sample({1, 2}, {3, 4}), 1.0, 0.0);
  // Ties across samples are resolved jointly.
  EXPECT_NEAR(ks_two_sample({1, 1, 2, 2}, {1, 2}), 0.0, 1e-15);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-12);
  EXPECT_THROW(ks_normal({}), DomainError);
}

TEST(Roc, TrivialCurves) {
  const std::vector<double> lo{0.1, 0.2, 0.3}, hi{1.0, 2.0};
  EXPECT_NEAR(roc_curve(lo, hi).auc, 1.0, 1e-15);
  EXPECT_NEAR(roc_curve(hi, lo).auc, 0.0, 1e-15);
  const std::vector<double> mixed{0.1, 0.5};
  const std::vector<double> mixed2{0.1, 0.5};
  EXPECT_NEAR(roc_curve(mixed, mixed2).auc, 0.5, 1e-15);
  const auto c = roc_curve(lo, hi);
  EXPECT_EQ(c.fpr.front(), 0.0);
  EXPECT_EQ(c.tpr.back(), 1.0);
  EXPECT_THROW(roc_curve(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0}), DomainError);
  EXPECT_THROW(roc_curve(std::vector<double>{}, hi), DomainError);
}

TEST(Experiments, PowerAtZeroEpsilonIsSize) {
  const EnsembleConfig cfg = small_cfg(5);
  SimulationOptions opt;
  const std::vector<StatKind> kinds{StatKind::t1g};
  const std::vector<double> eps{0.0};
  const auto p = power_experiment(cfg, AlternativeSpec::cluster(0.5, 0.0), eps, kinds, opt);
  const auto t = simulate_statistics(cfg, kinds, opt);
  std::size_t rej = 0;
  for (double z : t.z[0]) rej += std::abs(z) > critical_value(0.05);
  ASSERT_EQ(p.points.size(), 1u);
  EXPECT_DOUBLE_EQ(p.points[0].power, static_cast<double>(rej) / cfg.reps);
  const double pw = p.points[0].power;
  EXPECT_NEAR(p.points[0].std_error, std::sqrt(pw * (1 - pw) / cfg.reps), 1e-15);
}

TEST(Experiments, EcdfDeterministicAndSerialized) {
  const EnsembleConfig cfg = small_cfg(8);
  SimulationOptions opt;
  const std::vector<StatKind> kinds{StatKind::t2g, StatKind::t1l};
  const auto a = ecdf_experiment(cfg, kinds, opt, EntryDistribution::twopoint_neg());
  const auto b = ecdf_experiment(cfg, kinds, opt, EntryDistribution::twopoint_neg());
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  const auto j = to_json(a);
  EXPECT_EQ(j["experiment"], "ecdf");
  ASSERT_EQ(j["results"].size(), 2u);
  EXPECT_EQ(j["results"][0]["kind"], "t2g");
  EXPECT_EQ(j["results"][0]["reps"], 120);
  EXPECT_TRUE(j["results"][1]["ks_two_sample"].is_number());
  std::ostringstream csv;
  write_csv(csv, a);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "kind,rep,raw,z");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 240u);
  EnsembleConfig few = cfg;
  few.reps = 99;
  EXPECT_THROW(ecdf_experiment(few, kinds, opt), DomainError);
}

TEST(Experiments, RocSeparatesStrongAlternative) {
  EnsembleConfig null_cfg = small_cfg(12);
  null_cfg.reps = 60;
  const auto alt = null_cfg.with_sigma(AlternativeSpec::cluster(0.5, 1.0).diagonal(null_cfg.p()));
  SimulationOptions opt;
  const std::vector<StatKind> kinds{StatKind::t1g};
  const auto r = roc_experiment(null_cfg, alt, kinds, opt);
  EXPECT_GT(r.kinds[0].curve.auc, 0.99);
  const auto j = to_json(r);
  EXPECT_EQ(j["experiment"], "roc");
  EnsembleConfig other = alt;
  other.reps = 61;
  EXPECT_THROW(roc_experiment(null_cfg, other, kinds, opt), DomainError);
}
