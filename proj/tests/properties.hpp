#pragma once

// Randomized invariant checks shared by the property tests and the
// acceptance binary. Each check returns the number of cases, the number of
// failures and the worst observed error.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mplss/clt.hpp"
#include "mplss/simulation.hpp"
#include "mplss/statistics.hpp"
#include "mplss/stieltjes.hpp"
#include "mplss/support.hpp"

namespace props {

using mplss::cplx;

struct Outcome {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst = 0.0;
  std::string first_failure;

  bool ok() const { return failures == 0 && cases > 0; }
  void record(double err, double tol, const std::string& what) {
    ++cases;
    worst = std::max(worst, err);
    if (!(err <= tol)) {
      if (failures == 0) first_failure = what;
      ++failures;
    }
  }
};

struct Case {
  mplss::PopulationSpectrum spec;
  cplx z;
};

// Random spectrum with 1 to 3 atoms in [0.5, 5] and phi in [2, 200].
inline mplss::PopulationSpectrum random_spectrum(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int k = 1 + static_cast<int>(rng() % 3);
  std::vector<mplss::Atom> atoms;
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    const double w = 0.2 + u(rng);
    atoms.push_back({0.5 + 4.5 * u(rng), w});
    total += w;
  }
  for (mplss::Atom& a : atoms) a.weight /= total;
  const double phi = std::exp(std::log(2.0) + u(rng) * std::log(100.0));
  return mplss::PopulationSpectrum(atoms, phi);
}

// z = E + i eta with |E - m1 phi^{1/2}| <= 1/tau, n^{-1+tau} <= eta <= 1/tau,
// |z| >= tau, for tau = 0.1 and n = 200.
inline cplx random_z(std::mt19937_64& rng, const mplss::PopulationSpectrum& spec) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double tau = 0.1;
  const double eta_lo = std::pow(200.0, -1.0 + tau);
  for (;;) {
    const double E = spec.moment(1) * spec.sqrt_phi() + (2.0 * u(rng) - 1.0) / tau;
    const double eta = std::exp(std::log(eta_lo) + u(rng) * (std::log(1.0 / tau) - std::log(eta_lo)));
    const cplx z(E, eta);
    if (std::abs(z) >= tau) return z;
  }
}

inline std::vector<Case> random_cases(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Case> out;
  out.reserve(count);
  while (out.size() < count) {
    const mplss::PopulationSpectrum spec = random_spectrum(rng);
    for (int j = 0; j < 5 && out.size() < count; ++j) out.push_back({spec, random_z(rng, spec)});
  }
  return out;
}

inline std::string describe(const Case& c) {
  std::ostringstream os;
  os.precision(17);
  os << "pi=" << c.spec.to_string() << " phi=" << c.spec.phi() << " z=" << c.z;
  return os.str();
}

// |1/m + z - int phi / (phi^{1/2} x^{-1} + m) d pi| / |z|, summed here
// without touching the library's master function.
inline Outcome self_consistency(const std::vector<Case>& cases) {
  Outcome o{"self-consistency"};
  for (const Case& c : cases) {
    const cplx m = mplss::solve_m(c.z, c.spec).m;
    cplx integral = 0.0;
    for (const mplss::Atom& a : c.spec.atoms()) {
      integral += a.weight * c.spec.phi() / (c.spec.sqrt_phi() / a.value + m);
    }
    o.record(std::abs(1.0 / m + c.z - integral) / std::abs(c.z), 1e-10, describe(c));
  }
  return o;
}

// Im m > 0 above the axis and Im m < 0 below it.
inline Outcome herglotz(const std::vector<Case>& cases) {
  Outcome o{"herglotz"};
  for (const Case& c : cases) {
    const double up = mplss::solve_m(c.z, c.spec).m.imag();
    const double down = mplss::solve_m(std::conj(c.z), c.spec).m.imag();
    o.record(up > 0.0 && down < 0.0 ? 0.0 : 1.0, 0.0, describe(c));
  }
  return o;
}

inline Outcome conjugate_symmetry(const std::vector<Case>& cases) {
  Outcome o{"conjugate symmetry"};
  for (const Case& c : cases) {
    const mplss::StieltjesValue a = mplss::solve_m(c.z, c.spec);
    const mplss::StieltjesValue b = mplss::solve_m(std::conj(c.z), c.spec);
    const double err = std::max(std::abs(std::conj(a.m) - b.m) / std::abs(a.m),
                                std::abs(std::conj(a.m1) - b.m1) / std::abs(a.m1));
    o.record(err, 1e-12, describe(c));
  }
  return o;
}

// 1 - (1/p) sum phi^{1/2} sigma_i / (z (1 + phi^{-1/2} m sigma_i)^2) = -m / (z m').
inline Outcome derivative_identity(const std::vector<Case>& cases) {
  Outcome o{"m/m' identity"};
  for (const Case& c : cases) {
    const mplss::StieltjesValue v = mplss::solve_m(c.z, c.spec);
    cplx lhs = 1.0;
    for (const mplss::Atom& a : c.spec.atoms()) {
      const cplx d = 1.0 + v.m * a.value / c.spec.sqrt_phi();
      lhs -= a.weight * c.spec.sqrt_phi() * a.value / (c.z * d * d);
    }
    const cplx rhs = -v.m / (c.z * v.m1);
    o.record(std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)), 1e-9, describe(c));
  }
  return o;
}

// alpha-hat, beta-hat and the resolvent covariance are symmetric in (z1, z2);
// the real-axis kernels are symmetric in (x1, x2).
inline Outcome kernel_symmetry(const std::vector<Case>& cases, std::uint64_t seed) {
  Outcome o{"kernel symmetry"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i + 1 < cases.size(); i += 2) {
    const mplss::PopulationSpectrum& spec = cases[i].spec;
    const cplx z1 = cases[i].z;
    const cplx z2 = random_z(rng, spec);
    const double k4 = -1.9 + 4.0 * u(rng);
    const cplx a12 = mplss::kernel_alpha_hat(z1, z2, spec, k4), a21 = mplss::kernel_alpha_hat(z2, z1, spec, k4);
    const cplx b12 = mplss::kernel_beta_hat(z1, z2, spec), b21 = mplss::kernel_beta_hat(z2, z1, spec);
    const cplx c12 = mplss::resolvent_covariance(z1, std::conj(z2), spec, k4);
    const cplx c21 = mplss::resolvent_covariance(std::conj(z2), z1, spec, k4);
    const double e1 = std::abs(a12 - a21) / std::max(1.0, std::abs(a12));
    const double e2 = std::abs(b12 - b21) / std::max(1.0, std::abs(b12));
    const double e3 = std::abs(c12 - c21) / std::max(1.0, std::abs(c12));
    o.record(std::max({e1, e2, e3}), 1e-12, describe(cases[i]));

    const mplss::SupportInfo sup = mplss::support(spec);
    const double w = sup.gamma_plus - sup.gamma_minus;
    const double x1 = sup.gamma_minus + w * (0.05 + 0.9 * u(rng));
    const double x2 = sup.gamma_minus + w * (0.05 + 0.9 * u(rng));
    if (x1 == x2) continue;
    const double r12 = mplss::kernel_alpha(x1, x2, spec, sup, k4) + mplss::kernel_beta(x1, x2, spec, sup);
    const double r21 = mplss::kernel_alpha(x2, x1, spec, sup, k4) + mplss::kernel_beta(x2, x1, spec, sup);
    o.record(std::abs(r12 - r21) / std::max(1.0, std::abs(r12)), 1e-10, describe(cases[i]));
  }
  return o;
}

// Random Gaussian bumps a exp(-(u - mu)^2 / (2 w^2)) on the rescaled variable.
inline mplss::TestFunctionSpec random_bump(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a = 2.0 * u(rng) - 1.0;
  const double mu = 2.0 * u(rng) - 1.0;
  const double w = 0.5 + u(rng);
  return mplss::TestFunctionSpec::custom(
      [=](double x) { return a * std::exp(-0.5 * (x - mu) * (x - mu) / (w * w)); },
      [=](double x) { return -a * (x - mu) / (w * w) * std::exp(-0.5 * (x - mu) * (x - mu) / (w * w)); },
      mplss::Mollifier::none(), 0.0, 1.0, "bump");
}

// Minimum eigenvalue of a symmetric matrix relative to its trace.
inline double psd_violation(const Eigen::MatrixXd& C) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  return lo >= 0.0 ? 0.0 : -lo / std::max(C.trace(), 1e-300);
}

// Local bulk and edge covariances of 2 to 5 random bumps, plus Hermitian
// resolvent covariance matrices at 2 to 5 random points, are PSD.
inline Outcome covariance_psd(std::size_t count, std::uint64_t seed) {
  Outcome o{"covariance PSD"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t k = 2 + rng() % 4;
    if (i % 2 == 0) {
      std::vector<mplss::TestFunctionSpec> gs;
      for (std::size_t j = 0; j < k; ++j) gs.push_back(random_bump(rng));
      const mplss::GaussianLimit g = i % 4 == 0 ? mplss::local_limit_bulk(gs)
                                                : mplss::local_limit_edge(gs, mplss::EdgeSide::right);
      o.record(psd_violation(g.cov), 1e-8, "local case " + std::to_string(i));
    } else {
      const mplss::PopulationSpectrum spec = random_spectrum(rng);
      const double k4 = -1.9 + 4.0 * u(rng);
      std::vector<cplx> zs;
      for (std::size_t j = 0; j < k; ++j) zs.push_back(random_z(rng, spec));
      Eigen::MatrixXcd C(k, k);
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
          C(a, b) = mplss::resolvent_covariance(zs[a], std::conj(zs[b]), spec, k4);
      const Eigen::MatrixXcd H = 0.5 * (C + C.adjoint());
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
      const double lo = es.eigenvalues().minCoeff();
      const double tr = H.trace().real();
      const double herm = (C - C.adjoint()).norm() / std::max(1.0, C.norm());
      o.record(std::max(lo >= 0.0 ? 0.0 : -lo / tr, herm), 1e-8,
               "resolvent case " + std::to_string(i) + " pi=" + spec.to_string());
    }
  }
  return o;
}

// Same inputs give bitwise identical matrices, Stieltjes values and statistics.
inline Outcome determinism(std::size_t count, std::uint64_t seed) {
  Outcome o{"determinism"};
  std::mt19937_64 rng(seed);
  const mplss::StatParams params;
  for (std::size_t i = 0; i < count; ++i) {
    mplss::EnsembleConfig cfg;
    cfg.n = 4 + rng() % 12;
    cfg.phi = 1.0 + static_cast<double>(rng() % 8);
    cfg.seed = rng();
    const std::size_t rep = rng() % 1000;
    const Eigen::MatrixXd A = mplss::sample_matrix(cfg, rep);
    const Eigen::MatrixXd B = mplss::sample_matrix(cfg, rep);
    const auto ea = mplss::sample_eigenvalues(cfg, rep);
    const auto eb = mplss::sample_eigenvalues(cfg, rep);
    const mplss::PopulationSpectrum spec = random_spectrum(rng);
    const cplx z = random_z(rng, spec);
    const cplx ma = mplss::solve_m(z, spec).m, mb = mplss::solve_m(z, spec).m;
    const mplss::SupportInfo sup = mplss::support(mplss::PopulationSpectrum::identity(cfg.phi));
    const double sa = mplss::stat_raw(ea, mplss::StatKind::t2l, params, cfg.phi, sup);
    const double sb = mplss::stat_raw(eb, mplss::StatKind::t2l, params, cfg.phi, sup);
    const bool same = (A.array() == B.array()).all() && ea == eb && ma == mb && sa == sb;
    o.record(same ? 0.0 : 1.0, 0.0, "case " + std::to_string(i));
  }
  return o;
}

inline std::vector<Outcome> run_all(std::size_t count = 500, std::uint64_t seed = 20240601) {
  const std::vector<Case> cases = random_cases(2 * count, seed);
  const std::vector<Case> half(cases.begin(), cases.begin() + static_cast<std::ptrdiff_t>(count));
  return {self_consistency(cases),  herglotz(half),
          conjugate_symmetry(half), derivative_identity(half),
          kernel_symmetry(std::vector<Case>(cases.begin(), cases.begin() + 2 * count), seed + 1),
          covariance_psd(count, seed + 2), determinism(count, seed + 3)};
}

}  // namespace props
