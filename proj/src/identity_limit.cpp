// Sigma = I limits as contour integrals over |xi| = 1 with integrand
// f(phi^{1/2} + phi^{-1/2} + xi + 1/xi). The r -> 1 limits are taken by
// evaluating at r = 1 + delta for three deltas and eliminating the linear and
// quadratic terms in delta.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "mplss/clt.hpp"
#include "mplss/error.hpp"

namespace mplss {

namespace {

constexpr double kDeltas[3] = {1e-2, 5e-3, 2.5e-3};

// Trapezoid nodes on the circle; the kernels have poles at distance ~delta.
std::size_t nodes_for(double delta) {
  return static_cast<std::size_t>(std::ceil(40.0 / delta / 64.0)) * 64;
}

std::vector<double> circle_values(const TestFunctionSpec& tf, double phi, std::size_t n) {
  const double e0 = std::sqrt(phi) + 1.0 / std::sqrt(phi);
  std::vector<double> F(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    F[j] = tf(e0 + 2.0 * std::cos(th));
    if (!std::isfinite(F[j])) throw DomainError("test function is not finite on the contour image");
  }
  return F;
}

double richardson(const double v[3]) {
  const double r1 = 2.0 * v[1] - v[0];
  const double r2 = 2.0 * v[2] - v[1];
  return (4.0 * r2 - r1) / 3.0;
}

// -1/(2 pi i) oint F (1/xi - (1/2)/(xi + 1/r) - (1/2)/(xi - 1/r)) dxi.
double contour_mean_beta(const TestFunctionSpec& tf, double phi) {
  double v[3];
  for (int k = 0; k < 3; ++k) {
    const double r = 1.0 + kDeltas[k];
    const std::size_t n = nodes_for(kDeltas[k]);
    const std::vector<double> F = circle_values(tf, phi, n);
    cplx s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const cplx xi = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
      const cplx ker = 1.0 / xi - 0.5 / (xi + 1.0 / r) - 0.5 / (xi - 1.0 / r);
      s += F[j] * ker * xi;  // dxi = i xi dtheta; the i cancels against 1/(2 pi i)
    }
    v[k] = -(s / static_cast<double>(n)).real();
  }
  return richardson(v);
}

// Coefficient a_k = (1/2 pi) int F(theta) e^{-ik theta} dtheta, exact for the
// trapezoid rule on band-limited F.
double fourier_coefficient(const std::vector<double>& F, int k) {
  const std::size_t n = F.size();
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    s += F[j] * std::cos(2.0 * std::numbers::pi * k * static_cast<double>(j) / static_cast<double>(n));
  }
  return s / static_cast<double>(n);
}

// -1/(2 pi^2) oint oint F(xi1) G(xi2) / (xi1 - rho xi2)^2 dxi1 dxi2, rho = 1 + delta.
double contour_covariance_beta(const TestFunctionSpec& f, const TestFunctionSpec& g, double phi) {
  double v[3];
  for (int k = 0; k < 3; ++k) {
    const double rho = 1.0 + kDeltas[k];
    const std::size_t n = nodes_for(kDeltas[k]);
    const std::vector<double> F = circle_values(f, phi, n);
    const std::vector<double> G = circle_values(g, phi, n);
    // xi1 xi2 / (xi1 - rho xi2)^2 depends on theta1 - theta2 only.
    std::vector<cplx> ker(n);
    for (std::size_t d = 0; d < n; ++d) {
      const cplx e = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(d) / static_cast<double>(n));
      ker[d] = e / ((e - rho) * (e - rho));
    }
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double row = 0.0;
      for (std::size_t l = 0; l <= j; ++l) row += G[l] * ker[j - l].real();
      for (std::size_t l = j + 1; l < n; ++l) row += G[l] * ker[j + n - l].real();
      s += F[j] * row;
    }
    const double dth = 2.0 * std::numbers::pi / static_cast<double>(n);
    // (i dtheta)^2 = -dtheta^2.
    v[k] = s * dth * dth / (2.0 * std::numbers::pi * std::numbers::pi);
  }
  return richardson(v);
}

struct Named {
  enum { none, linear, quadratic, log } kind = none;
  double shift = 0.0;  // argument of h at xi + 1/xi = 0
};

Named classify(const TestFunctionSpec& tf, double phi) {
  Named out;
  if (tf.eta0() != 1.0) return out;
  const double d = std::sqrt(phi) + 1.0 / std::sqrt(phi) - tf.center();
  // The cutoff must be identically one on the image [d-2, d+2].
  const double reach = std::max(std::abs(d - 2.0), std::abs(d + 2.0));
  if (!tf.cutoff().is_none() && reach > tf.cutoff().b) return out;
  switch (tf.base()) {
    case BaseKind::linear: out.kind = Named::linear; out.shift = d; break;
    case BaseKind::quadratic: out.kind = Named::quadratic; out.shift = d; break;
    case BaseKind::log:
      if (d + tf.shape() > 2.0) {
        out.kind = Named::log;
        out.shift = d + tf.shape();
      }
      break;
    default: break;
  }
  return out;
}

}  // namespace

IdentityLimit global_limit_identity(const TestFunctionSpec& tf, double phi, double kappa4,
                                    IdentityRoute route) {
  if (!(phi > 0.0)) throw DomainError("phi must be positive");
  const Named named = classify(tf, phi);
  if (route == IdentityRoute::closed_form && named.kind == Named::none) {
    throw DomainError("no closed form for this test function");
  }
  if (route != IdentityRoute::contour && named.kind != Named::none) {
    const double s = tf.factor();
    const double c = named.shift;
    switch (named.kind) {
      case Named::linear: return {0.0, s * s * (2.0 + kappa4), true};
      case Named::quadratic:
        return {s * (1.0 + kappa4), s * s * (4.0 + 4.0 * c * c * (kappa4 + 2.0)), true};
      case Named::log: {
        const double t = 0.5 * (c + std::sqrt(c * c - 4.0));
        const double mean = 0.5 * std::log(1.0 - 1.0 / (t * t)) - kappa4 / (2.0 * t * t);
        const double var = 2.0 * (std::log(t) - std::log(t - 1.0 / t)) + kappa4 / (t * t);
        return {s * mean, s * s * var, true};
      }
      default: break;
    }
  }
  // kappa4 parts are exact trapezoid sums: a_2 for the mean, a_1^2 for the variance.
  const std::vector<double> F = circle_values(tf, phi, 4096);
  const double a1 = fourier_coefficient(F, 1);
  const double a2 = fourier_coefficient(F, 2);
  const double mean = contour_mean_beta(tf, phi) + kappa4 * a2;
  const double var = contour_covariance_beta(tf, tf, phi) + kappa4 * a1 * a1;
  return {mean, var, false};
}

double global_covariance_identity(const TestFunctionSpec& f, const TestFunctionSpec& g,
                                  double phi, double kappa4) {
  const std::vector<double> F = circle_values(f, phi, 4096);
  const std::vector<double> G = circle_values(g, phi, 4096);
  return contour_covariance_beta(f, g, phi) +
         kappa4 * fourier_coefficient(F, 1) * fourier_coefficient(G, 1);
}

}  // namespace mplss
