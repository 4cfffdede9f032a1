#pragma once

// Test-side reference computations, written independently of the library
// code paths they check.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Sigma = I: m solves (z/sqrt(phi)) m^2 + (z + 1/sqrt(phi) - sqrt(phi)) m + 1 = 0.
// Returns the root with Im m > 0 for Im z > 0.
inline cplx mp_m(cplx z, double phi) {
  const double s = std::sqrt(phi);
  const cplx a = z / s;
  const cplx b = z + 1.0 / s - s;
  const cplx disc = std::sqrt(b * b - 4.0 * a);
  const cplx r1 = (-b + disc) / (2.0 * a);
  const cplx r2 = (-b - disc) / (2.0 * a);
  return r1.imag() > r2.imag() ? r1 : r2;
}

inline double mp_gamma_minus(double phi) { return std::sqrt(phi) + 1.0 / std::sqrt(phi) - 2.0; }
inline double mp_gamma_plus(double phi) { return std::sqrt(phi) + 1.0 / std::sqrt(phi) + 2.0; }

// (sqrt(phi) / 2 pi) sqrt((x - g-)(g+ - x)) / x on the support.
inline double mp_density(double x, double phi) {
  const double gm = mp_gamma_minus(phi), gp = mp_gamma_plus(phi);
  if (x <= gm || x >= gp) return 0.0;
  return std::sqrt(phi) / (2.0 * std::numbers::pi) * std::sqrt((x - gm) * (gp - x)) / x;
}

// Plain bisection; f(lo) and f(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// f'(x) for atoms (w_i, sigma_i): 1/x^2 - sum w_i sigma_i^2 / (1 + s_i x)^2, s = sigma/sqrt(phi).
inline double master_d1(double x, const std::vector<std::pair<double, double>>& atoms, double phi) {
  double s = 1.0 / (x * x);
  for (auto [w, sig] : atoms) {
    const double u = 1.0 + sig / std::sqrt(phi) * x;
    s -= w * sig * sig / (u * u);
  }
  return s;
}

inline double master_f(double x, const std::vector<std::pair<double, double>>& atoms, double phi) {
  double s = -1.0 / x;
  for (auto [w, sig] : atoms) s += std::sqrt(phi) * w * sig / (1.0 + sig / std::sqrt(phi) * x);
  return s;
}

// (1/n) sum 1/(lambda - z).
inline cplx resolvent_trace(const std::vector<double>& eigs, cplx z) {
  cplx s = 0.0;
  for (double l : eigs) s += 1.0 / (l - z);
  return s;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace oracle
