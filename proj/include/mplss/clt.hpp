#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "json.hpp"
#include "mplss/population.hpp"
#include "mplss/stieltjes.hpp"
#include "mplss/support.hpp"
#include "mplss/test_function.hpp"

namespace mplss {

enum class Regime { global, local_bulk, local_edge };
std::string_view to_string(Regime r);

struct GaussianLimit {
  std::vector<double> means;
  std::vector<char> mean_defined;  // 0 where the edge mean g(0)/4 is undefined
  Eigen::MatrixXd cov;
  double kappa4 = 0.0;
  Regime regime = Regime::global;
  std::size_t nodes = 0;  // quadrature resolution at convergence
};

nlohmann::json to_json(const GaussianLimit& g);

// Boundary limits of m, b1 = m''/(2m') - m'/m and b2 = kappa4 (m^2 m''/(2m'^2) - m)
// from above (plus) and below (minus) the real axis.
struct BoundaryValues {
  double x;
  cplx m_plus, m_minus;
  cplx b1_plus, b1_minus;
  cplx b2_plus, b2_minus;
};

// Throws SingularityError at the edges where m' blows up.
BoundaryValues boundary_values(double x, const PopulationSpectrum& spec, const SupportInfo& sup,
                               double kappa4, const BoundaryOptions& opt = {});

// Four-sign combinations of the kernels on the real axis.
double kernel_alpha(double x1, double x2, const PopulationSpectrum& spec, const SupportInfo& sup,
                    double kappa4);
// Throws SingularityError for x1 == x2.
double kernel_beta(double x1, double x2, const PopulationSpectrum& spec, const SupportInfo& sup);

// Kernels at complex spectral parameters off the real axis.
cplx kernel_alpha_hat(cplx z1, cplx z2, const PopulationSpectrum& spec, double kappa4);
// Uses the second-order Taylor limit when z1 and z2 nearly coincide.
cplx kernel_beta_hat(cplx z1, cplx z2, const PopulationSpectrum& spec);
// Limiting Cov(Tr R(z1), Tr R(z2)) of the n x n resolvent, without conjugation.
cplx resolvent_covariance(cplx z1, cplx z2, const PopulationSpectrum& spec, double kappa4);

struct LimitOptions {
  std::size_t min_nodes = 128;
  std::size_t max_nodes = 8192;
  // Change between successive doublings relative to 1 + max |entry|. Bump
  // cutoffs have Fourier coefficients decaying like exp(-c sqrt(k)), so
  // mollified functions converge more slowly than analytic ones.
  double tol = 5e-6;
};

// Mean vector and covariance of the global linear-statistic limit for general
// diagonal Sigma, evaluated on the real axis.
GaussianLimit global_limit(std::span<const TestFunctionSpec> tfs, const PopulationSpectrum& spec,
                           double kappa4, const LimitOptions& opt = {});

// Same integrals with kappa4 absent: the local limit at finite eta0 for test
// functions concentrated near an edge (regime local-edge) or in the bulk.
GaussianLimit local_limit(std::span<const TestFunctionSpec> tfs, const PopulationSpectrum& spec,
                          const LimitOptions& opt = {});

enum class IdentityRoute { automatic, closed_form, contour };

struct IdentityLimit {
  double mean;
  double variance;
  bool closed_form;
};

// Sigma = I. f is evaluated on the image phi^{1/2} + phi^{-1/2} + xi + 1/xi of
// the unit circle. Named functions (linear, quadratic, log with center
// phi^{1/2} + phi^{-1/2} - c, eta0 = 1 and no active cutoff on [c-2, c+2])
// return closed forms under the automatic route.
IdentityLimit global_limit_identity(const TestFunctionSpec& tf, double phi, double kappa4,
                                    IdentityRoute route = IdentityRoute::automatic);
double global_covariance_identity(const TestFunctionSpec& f, const TestFunctionSpec& g,
                                  double phi, double kappa4);

enum class EdgeSide { left, right };

struct LocalKernelOptions {
  std::size_t nodes = 128;
  std::size_t max_nodes = 4096;
  double tol = 1e-7;
};

// Asymptotic local kernels; gs act on the rescaled variable via g().
GaussianLimit local_limit_bulk(std::span<const TestFunctionSpec> gs,
                               const LocalKernelOptions& opt = {});
GaussianLimit local_limit_edge(std::span<const TestFunctionSpec> gs, EdgeSide side,
                               const LocalKernelOptions& opt = {});

}  // namespace mplss
