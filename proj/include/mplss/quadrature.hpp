#pragma once

#include <span>
#include <vector>

namespace mplss {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1].
Rule gauss_legendre(std::size_t n);

// Gauss-Legendre with per_panel nodes on each [breaks[i], breaks[i+1]].
Rule composite_gauss_legendre(std::span<const double> breaks, std::size_t per_panel);

}  // namespace mplss
