#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mplss/population.hpp"
#include "mplss/statistics.hpp"

namespace mplss {

enum class DistTag { gaussian, twopoint_neg, twopoint_pos, custom };

// Standardized entry law (mean 0, variance 1) before the (pn)^{-1/4} scaling.
// Two-point laws put mass p_plus at v_plus and 1 - p_plus at v_minus.
struct EntryDistribution {
  DistTag tag = DistTag::gaussian;
  double p_plus = 0.0;
  double v_plus = 0.0;
  double v_minus = 0.0;

  static EntryDistribution gaussian();
  static EntryDistribution twopoint_neg();  // (1/3) at sqrt 2, (2/3) at -1/sqrt 2
  static EntryDistribution twopoint_pos();  // kappa4 = 2
  // Solves the mean-0 / variance-1 equations for p_plus in (0, 1).
  static EntryDistribution custom(double p_plus);
  // Checks an explicit triple; throws DomainError unless it is standardized.
  static EntryDistribution custom(double p_plus, double v_plus, double v_minus);
  // "gaussian", "twopoint_neg", "twopoint_pos" or "custom:<p_plus>".
  static EntryDistribution parse(std::string_view s);

  std::string name() const;
};

double kappa4_of(const EntryDistribution& d);

// SplitMix64 stream keyed by (seed, stream index). Distinct indices give
// independent, reproducible substreams.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  SplitMix64(std::uint64_t seed, std::uint64_t stream);
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

 private:
  std::uint64_t state_;
};

struct AlternativeSpec {
  enum class Kind { cluster, spiked };
  Kind kind = Kind::cluster;
  double epsilon = 0.0;
  double a = 0.5;      // cluster weight at 1 + epsilon
  std::size_t r = 1;   // number of spikes

  static AlternativeSpec cluster(double a, double epsilon);
  static AlternativeSpec spiked(std::size_t r, double epsilon);
  std::vector<double> diagonal(std::size_t p) const;
};

struct EnsembleConfig {
  std::size_t n = 200;
  double phi = 50.0;
  std::vector<double> sigma;  // diagonal of Sigma; empty means identity
  EntryDistribution dist{};
  std::uint64_t seed = 0;
  std::size_t reps = 500;
  std::size_t max_entries = std::size_t{1} << 31;  // guard on p n

  std::size_t p() const;
  void validate() const;
  EnsembleConfig with_sigma(std::vector<double> s) const;
  EnsembleConfig with_population(const PopulationSpectrum& spec) const;
};

// p x n matrix for one replicate; entry (i, j) is draw i n + j of the stream.
Eigen::MatrixXd sample_matrix(const EnsembleConfig& cfg, std::size_t rep);
// Eigenvalues of X^T Sigma X for the same replicate, accumulated over row
// blocks without storing X.
std::vector<double> sample_eigenvalues(const EnsembleConfig& cfg, std::size_t rep);

// 0 means: MPLSS_THREADS if set, else the available parallelism.
unsigned resolve_threads(unsigned requested);
// Runs fn(i) for i in [0, count). The first failing index (lowest) rethrows.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

double normal_cdf(double z);
// Sup distance between the ECDF of xs and the standard normal CDF.
double ks_normal(std::vector<double> xs);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct SimulationOptions {
  StatParams params{};
  // kappa4 for global standardization; defaults to the exact value of the law.
  std::optional<double> kappa4;
  double alpha = 0.05;
  unsigned threads = 0;
};

// raw[k][rep] and z[k][rep] for each requested kind k.
struct ReplicateTable {
  std::vector<StatKind> kinds;
  std::vector<std::vector<double>> raw;
  std::vector<std::vector<double>> z;
  double kappa4_used = 0.0;
  std::size_t reps() const { return raw.empty() ? 0 : raw.front().size(); }
};

// Statistics are standardized with the null (Sigma = I) calibration of (n, phi).
ReplicateTable simulate_statistics(const EnsembleConfig& cfg, std::span<const StatKind> kinds,
                                   const SimulationOptions& opt);

struct EcdfKindResult {
  StatKind kind;
  std::vector<double> z;    // replicate order
  std::vector<double> raw;  // replicate order
  std::vector<double> z_sorted;
  double ks = 0.0;
  std::optional<double> ks_two_sample;  // against the comparison law
};

struct EcdfResult {
  EnsembleConfig cfg;
  std::optional<EntryDistribution> compare;
  std::vector<EcdfKindResult> kinds;
};

// reps >= 100. With compare set, the same configuration is rerun under that
// law and the two-sample KS between standardized values is recorded.
EcdfResult ecdf_experiment(const EnsembleConfig& cfg, std::span<const StatKind> kinds,
                           const SimulationOptions& opt,
                           std::optional<EntryDistribution> compare = std::nullopt);

struct PowerPoint {
  StatKind kind;
  double epsilon;
  double power;
  double std_error;
};

struct PowerResult {
  EnsembleConfig cfg;
  AlternativeSpec alternative;
  std::vector<double> epsilons;
  std::vector<PowerPoint> points;
};

// Rejection rates across the epsilon sweep. Every epsilon reuses the same
// replicate streams so the curves differ only through Sigma.
PowerResult power_experiment(const EnsembleConfig& cfg, const AlternativeSpec& alt,
                             std::span<const double> epsilons, std::span<const StatKind> kinds,
                             const SimulationOptions& opt);

struct RocCurve {
  std::vector<double> fpr;
  std::vector<double> tpr;
  double auc = 0.0;
};

// Sweeps the threshold over pooled scores (positives are the alternative).
// Throws DomainError when every score is equal or a class is empty.
RocCurve roc_curve(std::span<const double> null_scores, std::span<const double> alt_scores);

struct RocKindResult {
  StatKind kind;
  RocCurve curve;
};

struct RocResult {
  EnsembleConfig null_cfg;
  EnsembleConfig alt_cfg;
  std::vector<RocKindResult> kinds;
};

// Scores are |z|. Both configs must have the same reps.
RocResult roc_experiment(const EnsembleConfig& null_cfg, const EnsembleConfig& alt_cfg,
                         std::span<const StatKind> kinds, const SimulationOptions& opt);

nlohmann::json to_json(const EcdfResult& r);
nlohmann::json to_json(const PowerResult& r);
nlohmann::json to_json(const RocResult& r);
void write_csv(std::ostream& os, const EcdfResult& r);
void write_csv(std::ostream& os, const PowerResult& r);
void write_csv(std::ostream& os, const RocResult& r);

}  // namespace mplss
