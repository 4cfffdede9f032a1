#include "mplss/stieltjes.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

#include "mplss/error.hpp"
#include "mplss/master_function.hpp"

namespace mplss {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Rounding floor of |f(m) - z| given the magnitudes of the summed terms.
double residual_floor(cplx m, const PopulationSpectrum& spec) {
  double s = 1.0 / std::abs(m);
  for (const Atom& a : spec.atoms()) {
    s += a.weight * a.value * spec.sqrt_phi() / std::abs(1.0 + a.value / spec.sqrt_phi() * m);
  }
  return 16.0 * kEps * s;
}

// Damped Newton on f(m) = target with backtracking on |f(m) - target|.
// With require_upper, every accepted iterate keeps Im m > 0.
bool newton(cplx target, cplx& m, const PopulationSpectrum& spec, const SolverOptions& opt,
            bool require_upper) {
  const double tol_abs = opt.tolerance * std::abs(target);
  auto v = master_values(m, spec);
  double gn = std::abs(v.f - target);
  for (int it = 0; it < opt.max_newton; ++it) {
    if (!std::isfinite(gn)) return false;
    if (gn <= std::max(tol_abs, residual_floor(m, spec))) return true;
    const cplx step = -(v.f - target) / v.d1;
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k, lambda *= 0.5) {
      const cplx mn = m + lambda * step;
      if (require_upper && !(mn.imag() > 0.0)) continue;
      auto vn = master_values(mn, spec);
      const double gnn = std::abs(vn.f - target);
      if (gnn < gn) {
        const bool stalled = std::abs(mn - m) <= 4.0 * kEps * std::abs(mn);
        m = mn;
        v = vn;
        gn = gnn;
        accepted = true;
        if (stalled) return gn <= 1e3 * std::max(tol_abs, residual_floor(m, spec));
        break;
      }
    }
    if (!accepted) return gn <= 1e3 * std::max(tol_abs, residual_floor(m, spec));
  }
  return gn <= std::max(tol_abs, residual_floor(m, spec));
}

// Plain Newton steps past the stopping tolerance while the residual keeps
// falling; brings m to rounding accuracy for kernels that difference it.
void polish(cplx target, cplx& m, const PopulationSpectrum& spec) {
  auto v = master_values(m, spec);
  double gn = std::abs(v.f - target);
  for (int it = 0; it < 4 && gn > 0.0; ++it) {
    const cplx mn = m - (v.f - target) / v.d1;
    if (!(mn.imag() > 0.0)) return;
    const auto vn = master_values(mn, spec);
    const double gnn = std::abs(vn.f - target);
    if (!(gnn < gn)) return;
    m = mn;
    v = vn;
    gn = gnn;
  }
}

// m <- (1 - w) m + w / (-z + F(m)), F(m) = f(m) + 1/m. Maps the upper
// half-plane into itself for Im z > 0.
void fixed_point(cplx z, cplx& m, const PopulationSpectrum& spec, const SolverOptions& opt) {
  for (int it = 0; it < opt.max_fixed_point; ++it) {
    cplx F = 0.0;
    for (const Atom& a : spec.atoms()) {
      F += a.weight * a.value * spec.sqrt_phi() / (1.0 + a.value / spec.sqrt_phi() * m);
    }
    const cplx next = (1.0 - opt.damping) * m + opt.damping / (-z + F);
    const bool done = std::abs(next - m) <= 1e-14 * std::abs(next);
    m = next;
    if (done) return;
  }
}

StieltjesValue solve_upper(cplx z, const PopulationSpectrum& spec, const SolverOptions& opt) {
  const double x = z.real();
  const double eta_target = z.imag();
  const double reach = spec.sqrt_phi() * spec.largest() + 3.0 * spec.largest() + 1.0;
  double eta = std::max(eta_target, 4.0 * (reach + std::abs(x)));
  cplx m = -1.0 / cplx(x, eta);
  for (;;) {
    const cplx zk(x, eta);
    if (!newton(zk, m, spec, opt, true)) {
      fixed_point(zk, m, spec, opt);
      if (!(m.imag() > 0.0)) throw BranchError("fixed-point iterate left the upper half-plane");
      if (!newton(zk, m, spec, opt, true)) {
        throw ConvergenceError("Stieltjes solver did not converge; point too close to the "
                               "support for the requested Im z");
      }
    }
    if (eta == eta_target) break;
    eta = std::max(eta_target, 0.5 * eta);
  }
  if (!(m.imag() > 0.0)) throw BranchError("Stieltjes root is not in the upper half-plane");
  polish(z, m, spec);
  return stieltjes_from_root(z, m, spec);
}

}  // namespace

StieltjesValue stieltjes_from_root(cplx z, cplx m, const PopulationSpectrum& spec) {
  auto v = master_values(m, spec);
  StieltjesValue r;
  r.z = z;
  r.m = m;
  r.m1 = 1.0 / v.d1;
  const cplx d1_3 = v.d1 * v.d1 * v.d1;
  r.m2 = -v.d2 / d1_3;
  r.m3 = -v.d3 / (d1_3 * v.d1) + 3.0 * v.d2 * v.d2 / (d1_3 * v.d1 * v.d1);
  r.residual = std::abs(v.f - z) / std::max(std::abs(z), std::numeric_limits<double>::min());
  return r;
}

StieltjesValue solve_m(cplx z, const PopulationSpectrum& spec, const SolverOptions& opt) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError("spectral parameter is not finite");
  }
  if (z.imag() == 0.0) {
    throw DomainError("solve_m needs Im z != 0; use boundary_m on the real axis");
  }
  if (z.imag() < 0.0) {
    StieltjesValue r = solve_upper(std::conj(z), spec, opt);
    return {z, std::conj(r.m), std::conj(r.m1), std::conj(r.m2), std::conj(r.m3), r.residual};
  }
  return solve_upper(z, spec, opt);
}

StieltjesValue solve_m_seeded(cplx z, cplx seed, const PopulationSpectrum& spec,
                              const SolverOptions& opt) {
  if (z.imag() > 0.0 && seed.imag() > 0.0) {
    cplx m = seed;
    if (newton(z, m, spec, opt, true) && m.imag() > 0.0) {
      polish(z, m, spec);
      return stieltjes_from_root(z, m, spec);
    }
  }
  return solve_m(z, spec, opt);
}

cplx companion_transform(const StieltjesValue& v, const PopulationSpectrum& spec) {
  const double phi = spec.phi();
  return (v.m + (1.0 - phi) / v.z) / phi;
}

cplx companion_transform(cplx z, const PopulationSpectrum& spec, const SolverOptions& opt) {
  return companion_transform(solve_m(z, spec, opt), spec);
}

namespace {

double real_root(const PopulationSpectrum& spec, double x, double lo, double hi) {
  auto g = [&](double m) { return master_values(m, spec).f - x; };
  std::uintmax_t iters = 400;
  auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi,
                                                  boost::math::tools::eps_tolerance<double>(53), iters);
  return 0.5 * (a + b);
}

RealAxisValue from_real_root(double x, double m, const PopulationSpectrum& spec) {
  StieltjesValue s = stieltjes_from_root(cplx(x, 0.0), cplx(m, 0.0), spec);
  return {x, cplx(m, 0.0), cplx(s.m1.real(), 0.0), cplx(s.m2.real(), 0.0),
          cplx(s.m3.real(), 0.0), false, true, 0.0, false};
}

}  // namespace

RealAxisValue boundary_m(double x, const PopulationSpectrum& spec, const SupportInfo& sup,
                         const BoundaryOptions& opt) {
  if (!std::isfinite(x)) throw DomainError("boundary_m argument is not finite");
  const double inf = std::numeric_limits<double>::infinity();
  if (x == sup.gamma_plus || (x == sup.gamma_minus && std::isfinite(sup.x2))) {
    const double m = x == sup.gamma_plus ? sup.x1 : sup.x2;
    return {x, cplx(m, 0.0), cplx(inf, 0.0), cplx(inf, 0.0), cplx(inf, 0.0), false, true, 0.0,
            false};
  }
  if (x > sup.gamma_plus) {
    // f increases from gamma_plus at x1 to +inf at 0-.
    double hi = 0.5 * sup.x1;
    while (master_values(hi, spec).f < x) hi *= 0.5;
    return from_real_root(x, real_root(spec, x, sup.x1, hi), spec);
  }
  if (x < sup.gamma_minus) {
    // f increases from -inf at 0+ to gamma_minus at x2.
    double lo = std::isfinite(sup.x2) ? 0.5 * sup.x2 : 1.0;
    while (master_values(lo, spec).f > x) lo *= 0.5;
    double hi = sup.x2;
    if (!std::isfinite(hi)) {
      hi = 2.0 * lo;
      while (master_values(hi, spec).f < x) hi *= 2.0;
    }
    return from_real_root(x, real_root(spec, x, lo, hi), spec);
  }

  const double scale = sup.width();
  StieltjesValue lv[3];
  lv[0] = solve_m(cplx(x, opt.eta_levels[0] * scale), spec, opt.solver);
  for (int k = 1; k < 3; ++k) {
    lv[k] = solve_m_seeded(cplx(x, opt.eta_levels[k] * scale), lv[k - 1].m, spec, opt.solver);
  }
  // Linear extrapolation to eta = 0 from consecutive levels.
  auto extrap = [&](int i, int j) {
    const double ei = opt.eta_levels[i], ej = opt.eta_levels[j];
    return (ei * lv[j].m - ej * lv[i].m) / (ei - ej);
  };
  const cplx r1 = extrap(0, 1);
  const cplx r2 = extrap(1, 2);
  RealAxisValue out{};
  out.x = x;
  out.in_bulk = true;
  out.richardson_gap = std::abs(r2 - r1) / std::abs(r2);

  cplx m = r2.imag() > 0.0 ? r2 : cplx(r2.real(), lv[2].m.imag());
  SolverOptions polish = opt.solver;
  polish.tolerance = std::min(polish.tolerance, 1e-13);
  if (newton(cplx(x, 0.0), m, spec, polish, true) && m.imag() > 0.0) {
    out.polished = true;
  } else {
    m = r2;
    out.polished = false;
    out.flagged = out.richardson_gap > opt.disagreement_tol;
  }
  StieltjesValue s = stieltjes_from_root(cplx(x, 0.0), m, spec);
  out.m = s.m;
  out.m1 = s.m1;
  out.m2 = s.m2;
  out.m3 = s.m3;
  return out;
}

}  // namespace mplss
