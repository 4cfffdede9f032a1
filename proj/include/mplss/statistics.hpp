#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mplss/clt.hpp"
#include "mplss/support.hpp"
#include "mplss/test_function.hpp"

namespace mplss {

enum class StatKind { t1g, t2g, t3g, t4g, t1l, t2l, t3l, t4l };

inline constexpr std::array<StatKind, 8> kAllStats{StatKind::t1g, StatKind::t2g, StatKind::t3g,
                                                   StatKind::t4g, StatKind::t1l, StatKind::t2l,
                                                   StatKind::t3l, StatKind::t4l};

std::string_view to_string(StatKind k);
StatKind stat_kind_from_string(std::string_view s);
bool is_local(StatKind k);

// How local statistics are centered and scaled.
//   theorem: mean and covariance of the local limit evaluated at the actual
//            eta0 (edge point-mass term plus the bulk b1 integral).
//   edge_asymptotic: the eta0 -> 0 edge constants g(0)/4 and the edge kernel.
enum class LocalRoute { theorem, edge_asymptotic };

struct StatParams {
  double c = 3.0;                    // shift of h1, h2 for the global statistics
  double t = 3.0;                    // T3g uses c = t + 1/t
  std::optional<double> eta0;        // local scale, default n^{-1/4}
  Mollifier local_cutoff{1.0, 4.0};  // T1l, T2l, T4l
  // T3l shift and cutoff keep (u + c) inside the log domain on the window.
  double local_log_c = 3.0 + 1.0 / 3.0;
  Mollifier local_log_cutoff{1.0, 2.0};
  LocalRoute local_route = LocalRoute::theorem;
  bool t4g_literal = false;  // literal printed constants instead of the delta method

  double eta0_for(std::size_t n) const;
};

// Test function behind a local statistic (k = 1, 2, 3).
TestFunctionSpec local_test_function(int k, const StatParams& params, double gamma_plus,
                                     double eta0);

// Eigenvalues of X^T diag(sigma) X in ascending order (n x n Gram matrix).
std::vector<double> gram_eigenvalues(const Eigen::MatrixXd& X, std::span<const double> sigma);
std::vector<double> gram_eigenvalues(const Eigen::MatrixXd& X);

// Raw statistic. Summation runs over the sorted eigenvalues so the result is
// invariant under permutations of the input.
double stat_raw(std::span<const double> eigs, StatKind kind, const StatParams& params, double phi,
                const SupportInfo& null_support);

struct TestReport {
  StatKind kind;
  double raw;
  double centering;
  double scale;
  double z_value;
  double p_value;
  bool reject;
  double alpha;
  std::optional<double> kappa4_used;
};

nlohmann::json to_json(const TestReport& r);

// Null (Sigma = I) constants for one (n, phi, params) configuration.
// Global constants depend on kappa4 and are completed in standardize().
class NullCalibration {
 public:
  NullCalibration(std::size_t n, double phi, StatParams params = {});

  std::size_t n() const { return n_; }
  double phi() const { return phi_; }
  const StatParams& params() const { return params_; }
  const SupportInfo& support() const { return support_; }
  double eta0() const { return eta0_; }

  // Integrals of the local test functions against the null law (k = 1..3).
  double local_centering(int k) const { return ml_[k - 1]; }
  const GaussianLimit& local_limit() const { return local_; }
  double log_centering() const { return log_integral_; }

 private:
  std::size_t n_;
  double phi_;
  StatParams params_;
  SupportInfo support_;
  double eta0_;
  std::array<double, 3> ml_{};
  GaussianLimit local_;
  double log_integral_ = 0.0;  // int log(x - phi^{1/2} - phi^{-1/2} + t + 1/t) d rho_0
};

// Standardized report. Global kinds require kappa4 (> -2); local kinds ignore
// it and record none.
TestReport standardize(StatKind kind, double raw, const NullCalibration& cal,
                       std::optional<double> kappa4, double alpha = 0.05);

// Raw statistic plus standardization in one call.
TestReport run_test(std::span<const double> eigs, StatKind kind, const NullCalibration& cal,
                    std::optional<double> kappa4, double alpha = 0.05);

double p_value(double z);
double critical_value(double alpha);
bool decide(const TestReport& report, double alpha);

}  // namespace mplss
