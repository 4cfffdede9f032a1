#pragma once

#include "mplss/population.hpp"

namespace mplss {

// Critical points of the master function and the support [gamma_minus,
// gamma_plus] of the limiting law. For phi == 1 the left critical point sits at
// +infinity and gamma_minus = 0 (hard edge).
struct SupportInfo {
  double x1;
  double x2;
  double gamma_minus;
  double gamma_plus;

  double center() const { return 0.5 * (gamma_minus + gamma_plus); }
  double half_width() const { return 0.5 * (gamma_plus - gamma_minus); }
  double width() const { return gamma_plus - gamma_minus; }
  bool contains(double x) const { return x > gamma_minus && x < gamma_plus; }
};

// Throws UnsupportedRegimeError for phi < 1 and ConvergenceError if a
// critical point cannot be bracketed.
SupportInfo support(const PopulationSpectrum& spec);

}  // namespace mplss
