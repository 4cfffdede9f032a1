#include "mplss/master_function.hpp"

#include <cmath>

#include "format.hpp"
#include "mplss/error.hpp"

namespace mplss {

MasterValues<double> master_checked(double x, const PopulationSpectrum& spec) {
  if (!std::isfinite(x)) throw DomainError("master function argument is not finite");
  auto near = [x](double pole) { return std::abs(x - pole) < 1e-14 * std::max(1.0, std::abs(pole)); };
  if (near(0.0)) throw PoleProximityError("master function evaluated at the pole 0");
  for (const Atom& a : spec.atoms()) {
    const double pole = -spec.sqrt_phi() / a.value;
    if (near(pole)) {
      throw PoleProximityError("master function evaluated at the pole " +
                               detail::format_double(pole));
    }
  }
  return master_values(x, spec);
}

double master_f(double x, const PopulationSpectrum& spec) { return master_checked(x, spec).f; }
double master_f_d1(double x, const PopulationSpectrum& spec) { return master_checked(x, spec).d1; }
double master_f_d2(double x, const PopulationSpectrum& spec) { return master_checked(x, spec).d2; }
double master_f_d3(double x, const PopulationSpectrum& spec) { return master_checked(x, spec).d3; }

}  // namespace mplss
