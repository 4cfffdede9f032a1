// Real-axis evaluation of the linear-statistic limits.
//
// With x = c - h cos(theta) on the support, the mean is
//   (1/pi) int f Im(b1 + b2)(x + i0) dx + (f(gamma_-) + f(gamma_+)) / 4,
// the edge term being the point-mass part of b1 at the square-root edges. The
// beta covariance is integrated by parts twice into
//   (1/pi^2) int int f'(x1) g'(x2) log|(m1 - conj m2) / (m1 - m2)| dx1 dx2,
// whose log singularity is split off in theta as
//   log|2 sin((t1+t2)/2)| - log|2 sin((t1-t2)/2)| = sum_k (2/k) sin(k t1) sin(k t2),
// leaving a smooth remainder. Midpoint nodes in theta then converge spectrally.

#include <cmath>
#include <numbers>

#include "mplss/clt.hpp"
#include "mplss/error.hpp"

namespace mplss {

namespace {

struct ThetaGrid {
  std::size_t n = 0;
  std::vector<double> theta, x, jac;
  std::vector<cplx> m, m1, m2;
};

ThetaGrid build_grid(const PopulationSpectrum& spec, const SupportInfo& sup, std::size_t n) {
  ThetaGrid g;
  g.n = n;
  const double dth = std::numbers::pi / static_cast<double>(n);
  const double cen = sup.center(), hw = sup.half_width();
  g.theta.resize(n);
  g.x.resize(n);
  g.jac.resize(n);
  g.m.resize(n);
  g.m1.resize(n);
  g.m2.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double th = (static_cast<double>(j) + 0.5) * dth;
    g.theta[j] = th;
    g.x[j] = cen - hw * std::cos(th);
    g.jac[j] = hw * std::sin(th) * dth;
    const RealAxisValue v = boundary_m(g.x[j], spec, sup);
    g.m[j] = v.m;
    g.m1[j] = v.m1;
    g.m2[j] = v.m2;
  }
  return g;
}

struct Moments {
  Eigen::VectorXd means;
  Eigen::MatrixXd cov;
};

Moments evaluate(const ThetaGrid& g, std::span<const TestFunctionSpec> tfs,
                 const PopulationSpectrum& spec, const SupportInfo& sup, bool with_kappa,
                 double kappa4) {
  const std::size_t n = g.n, k = tfs.size();
  const double pi = std::numbers::pi;
  Moments out{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k)),
              Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k))};

  Eigen::MatrixXd A(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    const TestFunctionSpec& tf = tfs[i];
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double x = g.x[j];
      const bool active = x >= tf.lower() && x <= tf.upper();
      A(i, j) = active ? tf.derivative(x) * g.jac[j] : 0.0;
      if (!active) continue;
      const double fx = tf(x);
      if (fx == 0.0) continue;
      const cplx m = g.m[j], m1 = g.m1[j], m2 = g.m2[j];
      cplx b = m2 / (2.0 * m1) - m1 / m;
      if (with_kappa) b += kappa4 * (m * m * m2 / (2.0 * m1 * m1) - m);
      mean += fx * b.imag() * g.jac[j];
    }
    out.means(i) = mean / pi + 0.25 * (tf(sup.gamma_minus) + tf(sup.gamma_plus));
  }

  // Smooth remainder S of the log kernel, applied to every A row.
  Eigen::MatrixXd SA = Eigen::MatrixXd::Zero(k, n);
  std::vector<double> sh(n), ch(n);
  for (std::size_t j = 0; j < n; ++j) {
    sh[j] = std::sin(0.5 * g.theta[j]);
    ch[j] = std::cos(0.5 * g.theta[j]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const cplx mj = g.m[j];
    const double diag = std::log(2.0 * mj.imag()) - std::log(std::abs(g.m1[j]) * g.jac[j] * n / pi) -
                        std::log(2.0 * std::sin(g.theta[j]));
    for (std::size_t i = 0; i < k; ++i) SA(i, j) += diag * A(i, j);
    for (std::size_t l = j + 1; l < n; ++l) {
      const cplx ml = g.m[l];
      const double sd = sh[j] * ch[l] - ch[j] * sh[l];
      const double ss = sh[j] * ch[l] + ch[j] * sh[l];
      const double num = std::norm(mj - std::conj(ml)) * sd * sd;
      const double den = std::norm(mj - ml) * ss * ss;
      const double s = 0.5 * std::log(num / den);
      for (std::size_t i = 0; i < k; ++i) {
        SA(i, j) += s * A(i, l);
        SA(i, l) += s * A(i, j);
      }
    }
  }

  // Sine coefficients of each A row for the analytic singular part.
  Eigen::MatrixXd sine = Eigen::MatrixXd::Zero(k, n);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx step = std::polar(1.0, g.theta[j]);
    cplx e = step;
    for (std::size_t q = 1; q < n; ++q) {
      if (q % 64 == 0) e = std::polar(1.0, static_cast<double>(q) * g.theta[j]);
      for (std::size_t i = 0; i < k; ++i) sine(i, q) += A(i, j) * e.imag();
      e *= step;
    }
  }

  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t r = i; r < k; ++r) {
      double v = A.row(i).dot(SA.row(r));
      for (std::size_t q = 1; q < n; ++q) v += 2.0 / static_cast<double>(q) * sine(i, q) * sine(r, q);
      out.cov(i, r) = v / (pi * pi);
    }
  }

  if (with_kappa && kappa4 != 0.0) {
    for (const Atom& a : spec.atoms()) {
      const double s = a.value / spec.sqrt_phi();
      Eigen::VectorXd ig = Eigen::VectorXd::Zero(k);
      for (std::size_t j = 0; j < n; ++j) {
        const double im = (1.0 / (1.0 + s * g.m[j])).imag();
        for (std::size_t i = 0; i < k; ++i) ig(i) += A(i, j) * im;
      }
      const double pref = kappa4 * spec.phi() * a.weight / (pi * pi);
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t r = i; r < k; ++r) out.cov(i, r) += pref * ig(i) * ig(r);
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t r = 0; r < i; ++r) out.cov(i, r) = out.cov(r, i);
  }
  return out;
}

GaussianLimit converge(std::span<const TestFunctionSpec> tfs, const PopulationSpectrum& spec,
                       bool with_kappa, double kappa4, const LimitOptions& opt) {
  if (tfs.empty()) throw DomainError("no test functions given");
  const SupportInfo sup = support(spec);
  std::size_t n = std::max<std::size_t>(opt.min_nodes, 8);
  Moments prev = evaluate(build_grid(spec, sup, n), tfs, spec, sup, with_kappa, kappa4);
  for (;;) {
    n *= 2;
    if (n > opt.max_nodes) {
      throw ConvergenceError("limit quadrature did not converge within the node budget");
    }
    Moments cur = evaluate(build_grid(spec, sup, n), tfs, spec, sup, with_kappa, kappa4);
    const double scale = 1.0 + std::max(cur.means.cwiseAbs().maxCoeff(), cur.cov.cwiseAbs().maxCoeff());
    const double diff = std::max((cur.means - prev.means).cwiseAbs().maxCoeff(),
                                 (cur.cov - prev.cov).cwiseAbs().maxCoeff());
    if (diff <= opt.tol * scale) {
      GaussianLimit G;
      G.means.assign(cur.means.data(), cur.means.data() + cur.means.size());
      G.mean_defined.assign(tfs.size(), 1);
      G.cov = cur.cov;
      G.kappa4 = kappa4;
      G.nodes = n;
      return G;
    }
    prev = std::move(cur);
  }
}

}  // namespace

GaussianLimit global_limit(std::span<const TestFunctionSpec> tfs, const PopulationSpectrum& spec,
                           double kappa4, const LimitOptions& opt) {
  GaussianLimit G = converge(tfs, spec, true, kappa4, opt);
  G.regime = Regime::global;
  return G;
}

GaussianLimit local_limit(std::span<const TestFunctionSpec> tfs, const PopulationSpectrum& spec,
                          const LimitOptions& opt) {
  GaussianLimit G = converge(tfs, spec, false, 0.0, opt);
  const SupportInfo sup = support(spec);
  bool edge = true;
  for (const TestFunctionSpec& tf : tfs) {
    const double tol = 1e-9 * (1.0 + std::abs(tf.center()));
    edge = edge && (std::abs(tf.center() - sup.gamma_plus) <= tol ||
                    std::abs(tf.center() - sup.gamma_minus) <= tol);
  }
  G.regime = edge ? Regime::local_edge : Regime::local_bulk;
  return G;
}

}  // namespace mplss
