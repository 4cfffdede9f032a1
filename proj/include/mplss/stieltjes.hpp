#pragma once

#include <array>
#include <complex>
#include <optional>

#include "mplss/population.hpp"
#include "mplss/support.hpp"

namespace mplss {

using cplx = std::complex<double>;

// m(z) and its derivatives. m3 is the third derivative, used by kernel
// Taylor expansions on the diagonal.
struct StieltjesValue {
  cplx z;
  cplx m;
  cplx m1;
  cplx m2;
  cplx m3;
  double residual;  // |f(m) - z| / |z|
};

struct SolverOptions {
  double tolerance = 1e-12;
  int max_newton = 80;
  int max_fixed_point = 5000;
  double damping = 0.5;
};

// Solves z = f(m) on the branch Im m > 0 by continuation in Im z from a far
// point (seed -1/z), Newton at every level and a damped fixed-point fallback.
// Im z < 0 is answered by conjugation; Im z == 0 throws DomainError.
StieltjesValue solve_m(cplx z, const PopulationSpectrum& spec, const SolverOptions& opt = {});

// Newton from a caller-supplied seed; falls back to solve_m if the iterate
// fails to converge or leaves the upper half-plane.
StieltjesValue solve_m_seeded(cplx z, cplx seed, const PopulationSpectrum& spec,
                              const SolverOptions& opt = {});

// Derivatives of m from the inverse-function rule at a known root m of z = f(m).
StieltjesValue stieltjes_from_root(cplx z, cplx m, const PopulationSpectrum& spec);

// Stieltjes transform of the p x p companion matrix.
cplx companion_transform(const StieltjesValue& v, const PopulationSpectrum& spec);
cplx companion_transform(cplx z, const PopulationSpectrum& spec, const SolverOptions& opt = {});

struct BoundaryOptions {
  // Multiples of gamma_plus - gamma_minus.
  std::array<double, 3> eta_levels{1e-2, 5e-3, 2.5e-3};
  // Relative gap between the two Richardson extrapolants above which the
  // value is flagged when the real-axis polish also fails.
  double disagreement_tol = 1e-3;
  SolverOptions solver{};
};

// Limit m(x + i0) with derivatives. Outside the support the value is real.
struct RealAxisValue {
  double x;
  cplx m;
  cplx m1;
  cplx m2;
  cplx m3;
  bool in_bulk;
  bool polished;           // Newton on f(m) = x converged on the real axis
  double richardson_gap;   // |R(eta_2, eta_3) - R(eta_1, eta_2)| / |m|, bulk only
  bool flagged;            // extrapolation disagreement and no polish
};

RealAxisValue boundary_m(double x, const PopulationSpectrum& spec, const SupportInfo& sup,
                         const BoundaryOptions& opt = {});

}  // namespace mplss
