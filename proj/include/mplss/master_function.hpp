#pragma once

#include <complex>

#include "mplss/population.hpp"

namespace mplss {

// f(x) = -1/x + phi^{1/2} sum_i w_i sigma_i / (1 + phi^{-1/2} sigma_i x), the
// inverse of the Stieltjes transform (z = f(m)), and its first derivatives.
template <class T>
struct MasterValues {
  T f, d1, d2, d3;
};

template <class T>
MasterValues<T> master_values(T x, const PopulationSpectrum& spec) {
  const T inv = T(1) / x;
  const T inv2 = inv * inv;
  MasterValues<T> r{-inv, inv2, T(-2) * inv2 * inv, T(6) * inv2 * inv2};
  for (const Atom& a : spec.atoms()) {
    const double s = a.value / spec.sqrt_phi();
    const T g = T(1) / (T(1) + s * x);
    const T g2 = g * g;
    const double ws2 = a.weight * a.value * a.value;
    r.f += (a.weight * a.value * spec.sqrt_phi()) * g;
    r.d1 -= ws2 * g2;
    r.d2 += (2.0 * ws2 * s) * g2 * g;
    r.d3 -= (6.0 * ws2 * s * s) * g2 * g2;
  }
  return r;
}

// Real-axis evaluation with pole checks. Throw PoleProximityError when x lies
// within 1e-14 * max(1, |pole|) of 0 or of some -1/s_i.
double master_f(double x, const PopulationSpectrum& spec);
double master_f_d1(double x, const PopulationSpectrum& spec);
double master_f_d2(double x, const PopulationSpectrum& spec);
double master_f_d3(double x, const PopulationSpectrum& spec);
MasterValues<double> master_checked(double x, const PopulationSpectrum& spec);

}  // namespace mplss
