#include "mplss/density.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <charconv>
#include <cmath>
#include <numbers>
#include <istream>
#include <ostream>
#include <string>

#include "format.hpp"
#include "mplss/error.hpp"

namespace mplss {

double density_at(double x, const PopulationSpectrum& spec, const SupportInfo& sup,
                  const BoundaryOptions& opt) {
  if (!sup.contains(x)) return 0.0;
  return std::max(0.0, boundary_m(x, spec, sup, opt).m.imag() / std::numbers::pi);
}

DensityGrid density(const PopulationSpectrum& spec, const DensityGridConfig& cfg) {
  if (cfg.points < 2) throw DomainError("density grid needs at least two points");
  const SupportInfo sup = support(spec);
  const double margin = cfg.margin >= 0.0 ? cfg.margin : 0.02 * sup.width();
  const double lo = std::max(0.0, sup.gamma_minus - margin);
  const double hi = sup.gamma_plus + margin;
  DensityGrid g;
  g.xs.resize(cfg.points);
  g.rho.assign(cfg.points, 0.0);
  g.flagged.assign(cfg.points, 0);
  const double dx = (hi - lo) / static_cast<double>(cfg.points - 1);
  for (std::size_t i = 0; i < cfg.points; ++i) {
    const double x = lo + dx * static_cast<double>(i);
    g.xs[i] = x;
    if (!sup.contains(x)) continue;
    RealAxisValue v = boundary_m(x, spec, sup, cfg.boundary);
    g.rho[i] = std::max(0.0, v.m.imag() / std::numbers::pi);
    g.flagged[i] = v.flagged ? 1 : 0;
  }
  for (std::size_t i = 1; i < cfg.points; ++i) {
    g.total_mass += 0.5 * (g.rho[i] + g.rho[i - 1]) * (g.xs[i] - g.xs[i - 1]);
  }
  return g;
}

std::size_t DensityGrid::flagged_count() const {
  return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), 1));
}

double DensityGrid::cdf(double x) const {
  if (xs.empty()) return 0.0;
  if (cum_.size() != xs.size()) {
    cum_.assign(xs.size(), 0.0);
    for (std::size_t i = 1; i < xs.size(); ++i) {
      cum_[i] = cum_[i - 1] + 0.5 * (rho[i] + rho[i - 1]) * (xs[i] - xs[i - 1]);
    }
    const double total = cum_.back();
    if (total > 0.0) {
      for (double& c : cum_) c /= total;
    }
  }
  if (x <= xs.front()) return 0.0;
  if (x >= xs.back()) return 1.0;
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - xs.begin());
  const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return cum_[j - 1] + t * (cum_[j] - cum_[j - 1]);
}

void DensityGrid::write_csv(std::ostream& os) const {
  os << "x,rho\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    os << detail::format_double(xs[i]) << ',' << detail::format_double(rho[i]) << '\n';
  }
}

DensityGrid DensityGrid::read_csv(std::istream& is) {
  DensityGrid g;
  std::string line;
  std::size_t row = 0;
  auto parse = [&](std::string_view s, std::size_t col) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw ParseError("density csv: bad number '" + std::string(s) + "'", row, col);
    }
    return v;
  };
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line == "x,rho") continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("density csv: expected two columns", row, 1);
    g.xs.push_back(parse(std::string_view(line).substr(0, comma), 1));
    g.rho.push_back(parse(std::string_view(line).substr(comma + 1), 2));
  }
  g.flagged.assign(g.xs.size(), 0);
  for (std::size_t i = 1; i < g.xs.size(); ++i) {
    if (!(g.xs[i] > g.xs[i - 1])) throw ParseError("density csv: x not ascending", i + 1, 1);
    g.total_mass += 0.5 * (g.rho[i] + g.rho[i - 1]) * (g.xs[i] - g.xs[i - 1]);
  }
  return g;
}

double lss_centering(const PopulationSpectrum& spec, const TestFunctionSpec& tf,
                     const QuadratureOptions& opt) {
  const SupportInfo sup = support(spec);
  const double lo = std::max(sup.gamma_minus, tf.lower());
  const double hi = std::min(sup.gamma_plus, tf.upper());
  if (!(hi > lo)) return 0.0;
  // x = center - h cos(theta) absorbs the square-root edges.
  const double cen = sup.center(), hw = sup.half_width();
  auto theta_of = [&](double x) { return std::acos(std::clamp((cen - x) / hw, -1.0, 1.0)); };
  std::vector<double> cuts{theta_of(lo), theta_of(hi)};
  if (!tf.cutoff().is_none()) {
    const double b = tf.cutoff().b * tf.eta0();
    for (double x : {tf.center() - b, tf.center() + b}) {
      if (x > lo && x < hi) cuts.push_back(theta_of(x));
    }
  }
  std::sort(cuts.begin(), cuts.end());
  auto integrand = [&](double th) {
    const double x = cen - hw * std::cos(th);
    if (!sup.contains(x)) return 0.0;
    const double r = boundary_m(x, spec, sup).m.imag() / std::numbers::pi;
    return tf(x) * r * hw * std::sin(th);
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    double err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, cuts[i], cuts[i + 1], opt.max_depth, opt.rel_tol, &err);
    if (!std::isfinite(total)) throw ConvergenceError("centering quadrature produced a non-finite value");
  }
  return total;
}

double esd_distance(std::span<const double> eigenvalues, const DensityGrid& grid) {
  if (eigenvalues.empty()) throw DomainError("esd_distance needs at least one eigenvalue");
  double top = 0.0;
  for (double v : eigenvalues) top = std::max(top, std::abs(v));
  std::vector<double> ev;
  for (double v : eigenvalues) {
    if (std::abs(v) > 1e-10 * top) ev.push_back(v);
  }
  if (ev.empty()) throw DomainError("esd_distance: all eigenvalues are zero");
  std::sort(ev.begin(), ev.end());
  const double n = static_cast<double>(ev.size());
  double d = 0.0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const double F = grid.cdf(ev[i]);
    d = std::max({d, std::abs(F - static_cast<double>(i) / n),
                  std::abs(F - static_cast<double>(i + 1) / n)});
  }
  return d;
}

double esd_distance(std::span<const double> eigenvalues, const PopulationSpectrum& spec) {
  return esd_distance(eigenvalues, density(spec));
}

}  // namespace mplss
