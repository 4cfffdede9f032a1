#include "mplss/statistics.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>

#include "mplss/density.hpp"
#include "mplss/error.hpp"

namespace mplss {

std::string_view to_string(StatKind k) {
  switch (k) {
    case StatKind::t1g: return "t1g";
    case StatKind::t2g: return "t2g";
    case StatKind::t3g: return "t3g";
    case StatKind::t4g: return "t4g";
    case StatKind::t1l: return "t1l";
    case StatKind::t2l: return "t2l";
    case StatKind::t3l: return "t3l";
    case StatKind::t4l: return "t4l";
  }
  return "t1g";
}

StatKind stat_kind_from_string(std::string_view s) {
  for (StatKind k : kAllStats) {
    if (to_string(k) == s) return k;
  }
  throw ParseError("unknown statistic '" + std::string(s) + "'");
}

bool is_local(StatKind k) {
  return k == StatKind::t1l || k == StatKind::t2l || k == StatKind::t3l || k == StatKind::t4l;
}

double StatParams::eta0_for(std::size_t n) const {
  if (eta0) {
    if (!(*eta0 > 0.0)) throw DomainError("eta0 must be positive");
    return *eta0;
  }
  return std::pow(static_cast<double>(n), -0.25);
}

TestFunctionSpec local_test_function(int k, const StatParams& params, double gamma_plus,
                                     double eta0) {
  switch (k) {
    case 1: return {BaseKind::linear, 0.0, params.local_cutoff, gamma_plus, eta0};
    case 2: return {BaseKind::quadratic, 0.0, params.local_cutoff, gamma_plus, eta0};
    case 3: return {BaseKind::logshift, params.local_log_c, params.local_log_cutoff, gamma_plus, eta0};
    default: throw DomainError("local test functions are indexed 1..3");
  }
}

std::vector<double> gram_eigenvalues(const Eigen::MatrixXd& X, std::span<const double> sigma) {
  const Eigen::Index p = X.rows(), n = X.cols();
  if (n < 2 || p < n) throw DomainError("gram_eigenvalues needs p >= n >= 2");
  if (!sigma.empty() && static_cast<Eigen::Index>(sigma.size()) != p) {
    throw DomainError("sigma length does not match the number of rows");
  }
  if (!X.allFinite()) throw DomainError("data matrix has non-finite entries");
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  if (sigma.empty()) {
    G.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose());
  } else {
    Eigen::VectorXd root(p);
    for (Eigen::Index i = 0; i < p; ++i) {
      if (!(sigma[static_cast<std::size_t>(i)] > 0.0)) throw DomainError("sigma must be positive");
      root(i) = std::sqrt(sigma[static_cast<std::size_t>(i)]);
    }
    const Eigen::MatrixXd Y = root.asDiagonal() * X;
    G.selfadjointView<Eigen::Lower>().rankUpdate(Y.transpose());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<double> gram_eigenvalues(const Eigen::MatrixXd& X) { return gram_eigenvalues(X, {}); }

namespace {

double e_prime(double phi) { return std::sqrt(phi) + 1.0 / std::sqrt(phi); }

double sum_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double raw_ratio(double t1, double t2, std::size_t n) {
  if (t1 == 0.0) throw DomainError("T4 is undefined for T1 = 0");
  const double nn = static_cast<double>(n);
  return nn * nn * t2 / (t1 * t1);
}

}  // namespace

double stat_raw(std::span<const double> eigs, StatKind kind, const StatParams& params, double phi,
                const SupportInfo& null_support) {
  if (eigs.empty()) throw DomainError("no eigenvalues");
  const std::size_t n = eigs.size();
  std::vector<double> terms(n);
  auto fill = [&](auto&& fn) {
    for (std::size_t j = 0; j < n; ++j) terms[j] = fn(eigs[j]);
    return sum_sorted(terms);
  };
  const double ep = e_prime(phi);
  const double c = params.c;
  const double c3 = params.t + 1.0 / params.t;
  const double eta0 = params.eta0_for(n);
  const double gp = null_support.gamma_plus;
  auto local = [&](int k) {
    const TestFunctionSpec tf = local_test_function(k, params, gp, eta0);
    return fill([&](double l) { return tf(l); });
  };
  switch (kind) {
    case StatKind::t1g: return fill([&](double l) { return l - ep + c; });
    case StatKind::t2g: return fill([&](double l) { return (l - ep + c) * (l - ep + c); });
    case StatKind::t3g:
      return fill([&](double l) {
        const double y = l - ep + c3;
        if (!(y > 0.0)) throw DomainError("T3 log argument is nonpositive");
        return y - std::log(y);
      });
    case StatKind::t4g:
      return raw_ratio(stat_raw(eigs, StatKind::t1g, params, phi, null_support),
                       stat_raw(eigs, StatKind::t2g, params, phi, null_support), n);
    case StatKind::t1l: return local(1);
    case StatKind::t2l: return local(2);
    case StatKind::t3l: return local(3);
    case StatKind::t4l: return raw_ratio(local(1), local(2), n);
  }
  return 0.0;
}

nlohmann::json to_json(const TestReport& r) {
  nlohmann::json j{{"kind", std::string(to_string(r.kind))},
                   {"raw", r.raw},
                   {"centering", r.centering},
                   {"scale", r.scale},
                   {"z_value", r.z_value},
                   {"p_value", r.p_value},
                   {"reject", r.reject},
                   {"alpha", r.alpha}};
  j["kappa4_used"] = r.kappa4_used ? nlohmann::json(*r.kappa4_used) : nlohmann::json(nullptr);
  return j;
}

NullCalibration::NullCalibration(std::size_t n, double phi, StatParams params)
    : n_(n), phi_(phi), params_(std::move(params)) {
  if (n < 2) throw DomainError("calibration needs n >= 2");
  if (!(params_.t > 1.0)) throw DomainError("T3 needs t > 1");
  const PopulationSpectrum null_spec = PopulationSpectrum::identity(phi);
  support_ = mplss::support(null_spec);
  eta0_ = params_.eta0_for(n);

  std::vector<TestFunctionSpec> tfs;
  for (int k = 1; k <= 3; ++k) {
    tfs.push_back(local_test_function(k, params_, support_.gamma_plus, eta0_));
    ml_[static_cast<std::size_t>(k - 1)] = lss_centering(null_spec, tfs.back());
  }
  if (params_.local_route == LocalRoute::theorem) {
    local_ = mplss::local_limit(tfs, null_spec);
  } else {
    std::vector<TestFunctionSpec> gs;
    for (int k = 1; k <= 3; ++k) gs.push_back(local_test_function(k, params_, 0.0, 1.0));
    local_ = local_limit_edge(gs, EdgeSide::right);
  }
  const double c3 = params_.t + 1.0 / params_.t;
  log_integral_ = lss_centering(
      null_spec, TestFunctionSpec(BaseKind::log, c3, Mollifier::none(), e_prime(phi), 1.0));
}

double p_value(double z) { return std::erfc(std::abs(z) / std::numbers::sqrt2); }

double critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - 0.5 * alpha);
}

bool decide(const TestReport& report, double alpha) {
  return std::abs(report.z_value) > critical_value(alpha);
}

namespace {

struct Ratio {
  double centering;
  double scale;
};

// Delta method for n^2 T2 / T1^2 around (mean1, mean2) with covariance V.
Ratio delta_ratio(double mean1, double mean2, double v11, double v22, double v12, std::size_t n) {
  if (mean1 == 0.0) throw DomainError("delta method: T1 has zero mean");
  const double nn = static_cast<double>(n);
  const double g1 = -2.0 * nn * nn * mean2 / (mean1 * mean1 * mean1);
  const double g2 = nn * nn / (mean1 * mean1);
  const double var = g1 * g1 * v11 + 2.0 * g1 * g2 * v12 + g2 * g2 * v22;
  if (!(var > 0.0)) throw DomainError("delta method: nonpositive variance");
  return {nn * nn * mean2 / (mean1 * mean1), std::sqrt(var)};
}

}  // namespace

TestReport standardize(StatKind kind, double raw, const NullCalibration& cal,
                       std::optional<double> kappa4, double alpha) {
  const double nn = static_cast<double>(cal.n());
  const StatParams& prm = cal.params();
  const double isp = 1.0 / std::sqrt(cal.phi());
  TestReport r{kind, raw, 0.0, 1.0, 0.0, 1.0, false, alpha, std::nullopt};
  critical_value(alpha);

  if (!is_local(kind)) {
    if (!kappa4) throw DomainError("global statistics need kappa4");
    const double k4 = *kappa4;
    if (!(k4 > -2.0)) throw DomainError("kappa4 must exceed -2");
    r.kappa4_used = k4;
    const double c = prm.c;
    const double mu1 = c - isp;
    const double mu2 = 1.0 + c * c - 2.0 * c * isp + isp * isp;
    const double v1 = 2.0 + k4;
    const double v2 = 4.0 + 4.0 * c * c * (k4 + 2.0);
    const double v12 = 4.0 * c + 2.0 * c * k4;
    switch (kind) {
      case StatKind::t1g:
        r.centering = nn * mu1;
        r.scale = std::sqrt(v1);
        break;
      case StatKind::t2g:
        r.centering = nn * mu2 + 1.0 + k4;
        r.scale = std::sqrt(v2);
        break;
      case StatKind::t3g: {
        // h3 = f1 - f3 with f3 = log: mean -M(f3), Cov(f1, f3) = (2 + kappa4) / t.
        const double t = prm.t;
        const double c3 = t + 1.0 / t;
        const double m3 = 0.5 * std::log(1.0 - 1.0 / (t * t)) - k4 / (2.0 * t * t);
        const double v3 = 2.0 * (std::log(t) - std::log(t - 1.0 / t)) + k4 / (t * t);
        r.centering = nn * ((c3 - isp) - cal.log_centering()) - m3;
        r.scale = std::sqrt(v1 * (1.0 - 2.0 / t) + v3);
        break;
      }
      case StatKind::t4g: {
        if (prm.t4g_literal) {
          const double d = c - 2.0 * isp;
          r.centering = nn * (1.0 + 1.0 / (d * d)) + (k4 + 1.0) * d * d;
          const double s = 4.0 + 4.0 * (k4 + 2.0) / (c * c);
          r.scale = std::sqrt(s * s / (c * c * c * c));
        } else {
          const Ratio q = delta_ratio(nn * mu1, nn * mu2 + 1.0 + k4, v1, v2, v12, cal.n());
          r.centering = q.centering;
          r.scale = q.scale;
        }
        break;
      }
      default: break;
    }
  } else {
    const GaussianLimit& L = cal.local_limit();
    auto mean_of = [&](int k) {
      const std::size_t i = static_cast<std::size_t>(k - 1);
      if (!L.mean_defined[i]) throw DomainError("local mean is undefined for this base function");
      return nn * cal.local_centering(k) + L.means[i];
    };
    switch (kind) {
      case StatKind::t1l:
      case StatKind::t2l:
      case StatKind::t3l: {
        const int k = kind == StatKind::t1l ? 1 : kind == StatKind::t2l ? 2 : 3;
        const double v = L.cov(k - 1, k - 1);
        if (!(v > 0.0)) throw DomainError("local variance is not positive");
        r.centering = mean_of(k);
        r.scale = std::sqrt(v);
        break;
      }
      case StatKind::t4l: {
        const Ratio q = delta_ratio(mean_of(1), mean_of(2), L.cov(0, 0), L.cov(1, 1), L.cov(0, 1), cal.n());
        r.centering = q.centering;
        r.scale = q.scale;
        break;
      }
      default: break;
    }
  }
  r.z_value = (raw - r.centering) / r.scale;
  r.p_value = p_value(r.z_value);
  r.reject = decide(r, alpha);
  return r;
}

TestReport run_test(std::span<const double> eigs, StatKind kind, const NullCalibration& cal,
                    std::optional<double> kappa4, double alpha) {
  const double raw = stat_raw(eigs, kind, cal.params(), cal.phi(), cal.support());
  return standardize(kind, raw, cal, kappa4, alpha);
}

}  // namespace mplss
