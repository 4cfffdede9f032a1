// Asymptotic local kernels: the H^{1/2}-type double integral
//   c int int (G_i(x1) - G_i(x2)) (G_j(x1) - G_j(x2)) / (x1 - x2)^2 dx1 dx2
// with G = g in the bulk (c = 1/2pi^2) and G(x) = g(-/+ x^2) at the right/left
// edge (c = 1/4pi^2). The region where one point leaves the support of G is
// integrated in closed form in that variable.

#include <cmath>
#include <limits>
#include <numbers>

#include "mplss/clt.hpp"
#include "mplss/error.hpp"
#include "mplss/quadrature.hpp"

namespace mplss {

namespace {

enum class Shape { bulk, right, left };

struct Window {
  double half;                  // G vanishes for |x| > half unless open
  std::vector<double> breaks;   // where G changes smoothness
  bool open;                    // some g has no cutoff and is assumed flat beyond half
};

Window window_for(std::span<const TestFunctionSpec> gs, Shape shape) {
  double radius = 0.0, inner = 0.0;
  bool open = false;
  for (const TestFunctionSpec& g : gs) {
    if (g.cutoff().is_none()) {
      open = true;
      continue;
    }
    radius = std::max(radius, g.cutoff().radius());
    inner = std::max(inner, g.cutoff().b);
  }
  if (open) inner = 0.0;
  Window w;
  w.open = open;
  auto to_x = [&](double u) { return shape == Shape::bulk ? u : std::sqrt(u); };
  w.half = open ? std::max(to_x(radius), 10.0) : to_x(radius);
  w.breaks = {-w.half};
  if (inner > 0.0 && to_x(inner) < w.half) w.breaks.push_back(-to_x(inner));
  w.breaks.push_back(0.0);
  if (inner > 0.0 && to_x(inner) < w.half) w.breaks.push_back(to_x(inner));
  w.breaks.push_back(w.half);
  return w;
}

double G(const TestFunctionSpec& g, Shape s, double x) {
  switch (s) {
    case Shape::bulk: return g.g(x);
    case Shape::right: return g.g(-x * x);
    case Shape::left: return g.g(x * x);
  }
  return 0.0;
}

double dG(const TestFunctionSpec& g, Shape s, double x) {
  switch (s) {
    case Shape::bulk: return g.g_prime(x);
    case Shape::right: return -2.0 * x * g.g_prime(-x * x);
    case Shape::left: return 2.0 * x * g.g_prime(x * x);
  }
  return 0.0;
}

Eigen::MatrixXd kernel_matrix(std::span<const TestFunctionSpec> gs, Shape shape,
                              const Window& win, std::size_t nodes) {
  // Spread panels over the break intervals in proportion to their length.
  std::vector<double> breaks;
  const std::size_t per_panel = 16;
  const std::size_t panels = std::max<std::size_t>(nodes / per_panel, win.breaks.size() - 1);
  const double span = win.breaks.back() - win.breaks.front();
  for (std::size_t i = 0; i + 1 < win.breaks.size(); ++i) {
    const double a = win.breaks[i], b = win.breaks[i + 1];
    const std::size_t m =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(panels * (b - a) / span)));
    for (std::size_t q = 0; q < m; ++q) breaks.push_back(a + (b - a) * static_cast<double>(q) / m);
  }
  breaks.push_back(win.breaks.back());
  const Rule rule = composite_gauss_legendre(breaks, per_panel);
  const std::size_t n = rule.nodes.size(), k = gs.size();

  Eigen::MatrixXd val(k, n), der(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      val(i, j) = G(gs[i], shape, rule.nodes[j]);
      der(i, j) = dG(gs[i], shape, rule.nodes[j]);
    }
  }
  std::vector<double> end_lo(k), end_hi(k);
  for (std::size_t i = 0; i < k; ++i) {
    end_lo[i] = G(gs[i], shape, win.breaks.front());
    end_hi[i] = G(gs[i], shape, win.breaks.back());
  }
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(k, k);
  std::vector<double> q(k);
  for (std::size_t a = 0; a < n; ++a) {
    const double wa = rule.weights[a], xa = rule.nodes[a];
    // Diagonal node pair: the difference quotient tends to G'(x)^2.
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i; j < k; ++j) C(i, j) += wa * wa * der(i, a) * der(j, a);
    }
    for (std::size_t b = a + 1; b < n; ++b) {
      const double dx = xa - rule.nodes[b];
      const double w = 2.0 * wa * rule.weights[b] / (dx * dx);
      for (std::size_t i = 0; i < k; ++i) q[i] = val(i, a) - val(i, b);
      for (std::size_t i = 0; i < k; ++i) {
        if (q[i] == 0.0) continue;
        for (std::size_t j = i; j < k; ++j) C(i, j) += w * q[i] * q[j];
      }
    }
    // One point outside [-L, L], where every G is taken as its value at the
    // nearer end of the window: closed form in that point.
    const double L = win.half;
    const double tr = 2.0 * wa / (L - xa), tl = 2.0 * wa / (L + xa);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i; j < k; ++j) {
        C(i, j) += tr * (val(i, a) - end_hi[i]) * (val(j, a) - end_hi[j]) +
                   tl * (val(i, a) - end_lo[i]) * (val(j, a) - end_lo[j]);
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < i; ++j) C(i, j) = C(j, i);
  }
  return C;
}

GaussianLimit local_kernel(std::span<const TestFunctionSpec> gs, Shape shape,
                           const LocalKernelOptions& opt) {
  if (gs.empty()) throw DomainError("no base functions given");
  const Window win = window_for(gs, shape);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double pref = shape == Shape::bulk ? 1.0 / (2.0 * pi2) : 1.0 / (4.0 * pi2);

  std::size_t nodes = std::max<std::size_t>(opt.nodes, 32);
  Eigen::MatrixXd prev = kernel_matrix(gs, shape, win, nodes);
  Eigen::MatrixXd cur = prev;
  for (;;) {
    if (2 * nodes > opt.max_nodes) {
      throw ConvergenceError("local kernel quadrature did not converge within the node budget");
    }
    nodes *= 2;
    cur = kernel_matrix(gs, shape, win, nodes);
    const double diff = (cur - prev).cwiseAbs().maxCoeff();
    if (diff <= opt.tol * (1.0 + cur.cwiseAbs().maxCoeff())) break;
    prev = cur;
  }

  GaussianLimit out;
  out.cov = pref * cur;
  out.kappa4 = 0.0;
  out.nodes = nodes;
  out.regime = shape == Shape::bulk ? Regime::local_bulk : Regime::local_edge;
  for (const TestFunctionSpec& g : gs) {
    if (shape == Shape::bulk) {
      out.means.push_back(0.0);
      out.mean_defined.push_back(1);
      continue;
    }
    double g0 = std::numeric_limits<double>::quiet_NaN();
    try {
      g0 = g.g(0.0);
    } catch (const DomainError&) {
    }
    out.means.push_back(0.25 * g0);
    out.mean_defined.push_back(std::isfinite(g0) ? 1 : 0);
  }
  return out;
}

}  // namespace

GaussianLimit local_limit_bulk(std::span<const TestFunctionSpec> gs, const LocalKernelOptions& opt) {
  return local_kernel(gs, Shape::bulk, opt);
}

GaussianLimit local_limit_edge(std::span<const TestFunctionSpec> gs, EdgeSide side,
                               const LocalKernelOptions& opt) {
  return local_kernel(gs, side == EdgeSide::right ? Shape::right : Shape::left, opt);
}

}  // namespace mplss
