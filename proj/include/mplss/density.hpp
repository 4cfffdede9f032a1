#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "mplss/population.hpp"
#include "mplss/stieltjes.hpp"
#include "mplss/support.hpp"
#include "mplss/test_function.hpp"

namespace mplss {

struct DensityGridConfig {
  std::size_t points = 2000;
  // Padding on both sides of the support; negative means 2% of its width.
  double margin = -1.0;
  BoundaryOptions boundary{};
};

struct DensityGrid {
  std::vector<double> xs;
  std::vector<double> rho;
  std::vector<char> flagged;  // per-point extrapolation disagreement
  double total_mass = 0.0;

  double spacing() const { return xs.size() > 1 ? xs[1] - xs[0] : 0.0; }
  std::size_t flagged_count() const;
  // Cumulative trapezoid of rho normalized to end at 1, linearly interpolated.
  double cdf(double x) const;

  void write_csv(std::ostream& os) const;
  // Columns x,rho with a header line. Throws ParseError with row/column.
  static DensityGrid read_csv(std::istream& is);

 private:
  mutable std::vector<double> cum_;
};

// rho(x) = Im m(x + i0) / pi, zero outside the support.
double density_at(double x, const PopulationSpectrum& spec, const SupportInfo& sup,
                  const BoundaryOptions& opt = {});

DensityGrid density(const PopulationSpectrum& spec, const DensityGridConfig& cfg = {});

struct QuadratureOptions {
  double rel_tol = 1e-11;
  unsigned max_depth = 18;
};

// Integral of tf against the limiting law.
double lss_centering(const PopulationSpectrum& spec, const TestFunctionSpec& tf,
                     const QuadratureOptions& opt = {});

// Kolmogorov distance between the empirical CDF of the nonzero eigenvalues and
// the CDF of the grid.
double esd_distance(std::span<const double> eigenvalues, const DensityGrid& grid);
double esd_distance(std::span<const double> eigenvalues, const PopulationSpectrum& spec);

}  // namespace mplss
