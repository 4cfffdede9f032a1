#include "mplss/test_function.hpp"

#include <cmath>
#include <limits>

#include "format.hpp"
#include "mplss/error.hpp"

namespace mplss {

double mollifier(double x, double a, double b) {
  const double d = std::abs(x) - b;
  if (d <= 0.0) return 1.0;
  if (d >= a) return 0.0;
  return std::exp(1.0 / (a * a) - 1.0 / (a * a - d * d));
}

double mollifier_derivative(double x, double a, double b) {
  const double d = std::abs(x) - b;
  if (d <= 0.0 || d >= a) return 0.0;
  const double q = a * a - d * d;
  const double k = std::exp(1.0 / (a * a) - 1.0 / q);
  return -2.0 * d / (q * q) * k * (x < 0.0 ? -1.0 : 1.0);
}

std::string_view to_string(BaseKind k) {
  switch (k) {
    case BaseKind::linear: return "linear";
    case BaseKind::quadratic: return "quadratic";
    case BaseKind::logshift: return "logshift";
    case BaseKind::log: return "log";
    case BaseKind::custom: return "custom";
  }
  return "custom";
}

BaseKind base_kind_from_string(std::string_view s) {
  if (s == "linear") return BaseKind::linear;
  if (s == "quadratic") return BaseKind::quadratic;
  if (s == "logshift") return BaseKind::logshift;
  if (s == "log") return BaseKind::log;
  throw ParseError("unknown base function '" + std::string(s) + "'");
}

TestFunctionSpec::TestFunctionSpec(BaseKind base, double c, Mollifier k, double center,
                                   double eta0)
    : base_(base), c_(c), k_(k), center_(center), eta0_(eta0), label_(to_string(base)) {
  if (base == BaseKind::custom) throw DomainError("use TestFunctionSpec::custom for custom bases");
  if (!(eta0 > 0.0)) throw DomainError("eta0 must be positive");
  if (!(k.a > 0.0) || !(k.b > 0.0)) throw DomainError("mollifier parameters must be positive");
}

TestFunctionSpec TestFunctionSpec::custom(std::function<double(double)> h,
                                          std::function<double(double)> dh, Mollifier k,
                                          double center, double eta0, std::string label) {
  if (!(eta0 > 0.0)) throw DomainError("eta0 must be positive");
  TestFunctionSpec t;
  t.base_ = BaseKind::custom;
  t.k_ = k;
  t.center_ = center;
  t.eta0_ = eta0;
  t.h_ = std::move(h);
  t.dh_ = std::move(dh);
  t.label_ = std::move(label);
  return t;
}

namespace {

void check_log_domain(double arg) {
  if (!(arg > 0.0)) {
    throw DomainError("log test function evaluated at nonpositive argument " +
                      detail::format_double(arg));
  }
}

}  // namespace

double TestFunctionSpec::h(double u) const {
  switch (base_) {
    case BaseKind::linear: return u;
    case BaseKind::quadratic: return u * u;
    case BaseKind::logshift: check_log_domain(u + c_); return (u + c_) - std::log(u + c_);
    case BaseKind::log: check_log_domain(u + c_); return std::log(u + c_);
    case BaseKind::custom: return h_(u);
  }
  return 0.0;
}

double TestFunctionSpec::g(double u) const {
  const double k = k_(u);
  if (k == 0.0) return 0.0;
  return factor_ * h(u) * k;
}

double TestFunctionSpec::g_prime(double u) const {
  const double k = k_(u);
  if (k == 0.0) return 0.0;
  double dh = 0.0;
  switch (base_) {
    case BaseKind::linear: dh = 1.0; break;
    case BaseKind::quadratic: dh = 2.0 * u; break;
    case BaseKind::logshift: check_log_domain(u + c_); dh = 1.0 - 1.0 / (u + c_); break;
    case BaseKind::log: check_log_domain(u + c_); dh = 1.0 / (u + c_); break;
    case BaseKind::custom: dh = dh_(u); break;
  }
  const double dk = k_.derivative(u);
  return factor_ * (dh * k + (dk == 0.0 ? 0.0 : h(u) * dk));
}

double TestFunctionSpec::lower() const {
  if (k_.is_none()) return -std::numeric_limits<double>::infinity();
  return center_ - eta0_ * k_.radius();
}

double TestFunctionSpec::upper() const {
  if (k_.is_none()) return std::numeric_limits<double>::infinity();
  return center_ + eta0_ * k_.radius();
}

TestFunctionSpec TestFunctionSpec::scaled(double s) const {
  TestFunctionSpec t = *this;
  t.factor_ *= s;
  return t;
}

}  // namespace mplss
