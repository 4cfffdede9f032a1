#include "mplss/support.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

#include "format.hpp"
#include "mplss/error.hpp"
#include "mplss/master_function.hpp"

namespace mplss {

namespace {

double critical_point(const PopulationSpectrum& spec, double lo, double hi) {
  auto fp = [&spec](double x) { return master_values(x, spec).d1; };
  std::uintmax_t iters = 400;
  auto [a, b] = boost::math::tools::toms748_solve(fp, lo, hi,
                                                  boost::math::tools::eps_tolerance<double>(53), iters);
  double x = 0.5 * (a + b);
  // One Newton step on f' tightens the last ulps; keep it only if it stays in the bracket.
  auto v = master_values(x, spec);
  if (v.d2 != 0.0) {
    double xn = x - v.d1 / v.d2;
    if (xn > lo && xn < hi && std::abs(master_values(xn, spec).d1) <= std::abs(v.d1)) x = xn;
  }
  return x;
}

}  // namespace

SupportInfo support(const PopulationSpectrum& spec) {
  const double phi = spec.phi();
  if (phi < 1.0) {
    throw UnsupportedRegimeError("phi = " + detail::format_double(phi) +
                                 " < 1: the support may split into several bulk components");
  }
  const double s1 = spec.largest() / spec.sqrt_phi();
  const double eps = 1e-10 / s1;

  SupportInfo info{};
  info.x1 = critical_point(spec, -1.0 / s1 + eps, -eps);
  info.gamma_plus = master_values(info.x1, spec).f;

  const double sp = spec.smallest() / spec.sqrt_phi();
  double hi = 1.0 / sp;
  const double cap = 1e14 / sp;
  while (master_values(hi, spec).d1 >= 0.0 && hi < cap) hi *= 2.0;
  if (master_values(hi, spec).d1 >= 0.0) {
    if (phi > 1.0 + 1e-9) throw ConvergenceError("cannot bracket the lower critical point");
    info.x2 = std::numeric_limits<double>::infinity();
    info.gamma_minus = 0.0;
  } else {
    info.x2 = critical_point(spec, eps, hi);
    info.gamma_minus = master_values(info.x2, spec).f;
  }
  if (!(info.gamma_plus >= info.gamma_minus) || info.gamma_minus < 0.0) {
    throw ConvergenceError("critical points do not define a valid support");
  }
  return info;
}

}  // namespace mplss
