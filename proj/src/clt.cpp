#include "mplss/clt.hpp"

#include <cmath>

#include "mplss/error.hpp"

namespace mplss {

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::global: return "global";
    case Regime::local_bulk: return "local-bulk";
    case Regime::local_edge: return "local-edge";
  }
  return "global";
}

nlohmann::json to_json(const GaussianLimit& g) {
  nlohmann::json means = nlohmann::json::array();
  for (std::size_t i = 0; i < g.means.size(); ++i) {
    if (i < g.mean_defined.size() && !g.mean_defined[i]) {
      means.push_back(nullptr);
    } else {
      means.push_back(g.means[i]);
    }
  }
  nlohmann::json cov = nlohmann::json::array();
  for (Eigen::Index i = 0; i < g.cov.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < g.cov.cols(); ++j) row.push_back(g.cov(i, j));
    cov.push_back(row);
  }
  return {{"means", means}, {"cov", cov}, {"regime", std::string(to_string(g.regime))},
          {"kappa4", g.kappa4}};
}

namespace {

RealAxisValue regular_boundary(double x, const PopulationSpectrum& spec, const SupportInfo& sup,
                               const BoundaryOptions& opt = {}) {
  RealAxisValue v = boundary_m(x, spec, sup, opt);
  if (!std::isfinite(std::abs(v.m1)) || !std::isfinite(std::abs(v.m2))) {
    throw SingularityError("boundary derivatives diverge at a support edge");
  }
  return v;
}

// d/dz G_i(m(z)) with G_i(u) = 1 / (1 + phi^{-1/2} sigma_i u).
cplx dG(const Atom& a, const PopulationSpectrum& spec, cplx m, cplx m1) {
  const double s = a.value / spec.sqrt_phi();
  const cplx q = 1.0 + s * m;
  return -s * m1 / (q * q);
}

}  // namespace

BoundaryValues boundary_values(double x, const PopulationSpectrum& spec, const SupportInfo& sup,
                               double kappa4, const BoundaryOptions& opt) {
  const RealAxisValue v = regular_boundary(x, spec, sup, opt);
  BoundaryValues b;
  b.x = x;
  b.m_plus = v.m;
  b.b1_plus = v.m2 / (2.0 * v.m1) - v.m1 / v.m;
  b.b2_plus = kappa4 * (v.m * v.m * v.m2 / (2.0 * v.m1 * v.m1) - v.m);
  b.m_minus = std::conj(b.m_plus);
  b.b1_minus = std::conj(b.b1_plus);
  b.b2_minus = std::conj(b.b2_plus);
  return b;
}

double kernel_alpha(double x1, double x2, const PopulationSpectrum& spec, const SupportInfo& sup,
                    double kappa4) {
  if (kappa4 == 0.0) return 0.0;
  const RealAxisValue v1 = regular_boundary(x1, spec, sup);
  const RealAxisValue v2 = regular_boundary(x2, spec, sup);
  // Sum over sign pairs of G(m^a) G(m^b) collapses to -4 Im G(x1) Im G(x2).
  double s = 0.0;
  for (const Atom& a : spec.atoms()) {
    s += a.weight * dG(a, spec, v1.m, v1.m1).imag() * dG(a, spec, v2.m, v2.m1).imag();
  }
  return -4.0 * kappa4 * spec.phi() * s;
}

double kernel_beta(double x1, double x2, const PopulationSpectrum& spec, const SupportInfo& sup) {
  if (x1 == x2) throw SingularityError("beta kernel is singular at coincident points");
  const RealAxisValue v1 = regular_boundary(x1, spec, sup);
  const RealAxisValue v2 = regular_boundary(x2, spec, sup);
  auto P = [](cplx a, cplx a1, cplx b, cplx b1) {
    const cplx d = a - b;
    return a1 * b1 / (d * d);
  };
  // The -1/(x1-x2)^2 terms cancel across the four sign pairs.
  const cplx pp = P(v1.m, v1.m1, v2.m, v2.m1);
  const cplx pm = P(v1.m, v1.m1, std::conj(v2.m), std::conj(v2.m1));
  return 4.0 * (pp - pm).real();
}

cplx kernel_alpha_hat(cplx z1, cplx z2, const PopulationSpectrum& spec, double kappa4) {
  if (kappa4 == 0.0) return 0.0;
  const StieltjesValue s1 = solve_m(z1, spec);
  const StieltjesValue s2 = solve_m(z2, spec);
  cplx s = 0.0;
  for (const Atom& a : spec.atoms()) {
    s += a.weight * dG(a, spec, s1.m, s1.m1) * dG(a, spec, s2.m, s2.m1);
  }
  return kappa4 * spec.phi() * s;
}

cplx kernel_beta_hat(cplx z1, cplx z2, const PopulationSpectrum& spec) {
  const double im = std::min(std::abs(z1.imag()), std::abs(z2.imag()));
  const bool same_side = (z1.imag() > 0.0) == (z2.imag() > 0.0);
  if (same_side && std::abs(z1 - z2) <= 1e-4 * std::max(im, 1e-12)) {
    // Symmetric expansion about the midpoint; the first-order term vanishes.
    const StieltjesValue s = solve_m(0.5 * (z1 + z2), spec);
    const cplx r = s.m2 / s.m1;
    return 2.0 * (s.m3 / (6.0 * s.m1) - 0.25 * r * r);
  }
  if (z1 == z2) throw SingularityError("beta kernel requested at identical points");
  const StieltjesValue s1 = solve_m(z1, spec);
  const StieltjesValue s2 = solve_m(z2, spec);
  const cplx dm = s1.m - s2.m;
  const cplx dz = z1 - z2;
  return 2.0 * (s1.m1 * s2.m1 / (dm * dm) - 1.0 / (dz * dz));
}

cplx resolvent_covariance(cplx z1, cplx z2, const PopulationSpectrum& spec, double kappa4) {
  return kernel_alpha_hat(z1, z2, spec, kappa4) + kernel_beta_hat(z1, z2, spec);
}

}  // namespace mplss
