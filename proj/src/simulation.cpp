#include "mplss/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <boost/random/normal_distribution.hpp>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include "format.hpp"
#include "mplss/error.hpp"

namespace mplss {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed for the comparison law of an ECDF run and the alternative of a ROC run.
std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed ^ mix64(tag * kGolden + 0x632BE59BD9B4E019ULL));
}

}  // namespace

EntryDistribution EntryDistribution::gaussian() { return {}; }

EntryDistribution EntryDistribution::twopoint_neg() {
  return {DistTag::twopoint_neg, 1.0 / 3.0, std::numbers::sqrt2, -1.0 / std::numbers::sqrt2};
}

EntryDistribution EntryDistribution::twopoint_pos() {
  const double r2 = std::numbers::sqrt2;
  return {DistTag::twopoint_pos, (r2 + 1.0) / (2.0 * r2), r2 - 1.0, -1.0 - r2};
}

EntryDistribution EntryDistribution::custom(double p_plus) {
  if (!(p_plus > 0.0 && p_plus < 1.0)) throw DomainError("two-point p_plus must lie in (0, 1)");
  const double q = 1.0 - p_plus;
  return {DistTag::custom, p_plus, std::sqrt(q / p_plus), -std::sqrt(p_plus / q)};
}

EntryDistribution EntryDistribution::custom(double p_plus, double v_plus, double v_minus) {
  if (!(p_plus > 0.0 && p_plus < 1.0)) throw DomainError("two-point p_plus must lie in (0, 1)");
  const double q = 1.0 - p_plus;
  const double mean = p_plus * v_plus + q * v_minus;
  const double var = p_plus * v_plus * v_plus + q * v_minus * v_minus;
  if (std::abs(mean) > 1e-12 || std::abs(var - 1.0) > 1e-12) {
    throw DomainError("two-point law is not standardized (mean 0, variance 1)");
  }
  return {DistTag::custom, p_plus, v_plus, v_minus};
}

EntryDistribution EntryDistribution::parse(std::string_view s) {
  if (s == "gaussian") return gaussian();
  if (s == "twopoint_neg") return twopoint_neg();
  if (s == "twopoint_pos") return twopoint_pos();
  if (s.starts_with("custom:")) {
    const std::string_view num = s.substr(7);
    double p = 0.0;
    const auto res = std::from_chars(num.data(), num.data() + num.size(), p);
    if (res.ec != std::errc() || res.ptr != num.data() + num.size()) {
      throw ParseError("bad custom two-point parameter '" + std::string(num) + "'", 0, 8);
    }
    return custom(p);
  }
  throw ParseError("unknown entry distribution '" + std::string(s) + "'");
}

std::string EntryDistribution::name() const {
  switch (tag) {
    case DistTag::gaussian: return "gaussian";
    case DistTag::twopoint_neg: return "twopoint_neg";
    case DistTag::twopoint_pos: return "twopoint_pos";
    case DistTag::custom: return "custom:" + detail::format_double(p_plus);
  }
  return "gaussian";
}

double kappa4_of(const EntryDistribution& d) {
  switch (d.tag) {
    case DistTag::gaussian: return 0.0;
    case DistTag::twopoint_neg: return -1.5;
    case DistTag::twopoint_pos: return 2.0;
    case DistTag::custom: {
      const double q = 1.0 - d.p_plus;
      const double mean = d.p_plus * d.v_plus + q * d.v_minus;
      const double var = d.p_plus * d.v_plus * d.v_plus + q * d.v_minus * d.v_minus;
      if (std::abs(mean) > 1e-12 || std::abs(var - 1.0) > 1e-12) {
        throw DomainError("two-point law is not standardized (mean 0, variance 1)");
      }
      const double v4p = d.v_plus * d.v_plus * d.v_plus * d.v_plus;
      const double v4m = d.v_minus * d.v_minus * d.v_minus * d.v_minus;
      return d.p_plus * v4p + q * v4m - 3.0;
    }
  }
  return 0.0;
}

SplitMix64::SplitMix64(std::uint64_t seed, std::uint64_t stream)
    : state_(mix64(seed) ^ mix64(stream * kGolden + 0xD1B54A32D192ED03ULL)) {}

SplitMix64::result_type SplitMix64::operator()() {
  state_ += kGolden;
  return mix64(state_);
}

AlternativeSpec AlternativeSpec::cluster(double a, double epsilon) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError("cluster weight a must lie in (0, 1)");
  if (!(epsilon >= 0.0)) throw DomainError("epsilon must be nonnegative");
  AlternativeSpec s;
  s.kind = Kind::cluster;
  s.a = a;
  s.epsilon = epsilon;
  return s;
}

AlternativeSpec AlternativeSpec::spiked(std::size_t r, double epsilon) {
  if (!(epsilon >= 0.0)) throw DomainError("epsilon must be nonnegative");
  AlternativeSpec s;
  s.kind = Kind::spiked;
  s.r = r;
  s.epsilon = epsilon;
  return s;
}

std::vector<double> AlternativeSpec::diagonal(std::size_t p) const {
  std::vector<double> d(p, 1.0);
  const std::size_t k = kind == Kind::cluster
                            ? static_cast<std::size_t>(std::llround(a * static_cast<double>(p)))
                            : std::min(r, p);
  for (std::size_t i = 0; i < k; ++i) d[i] = 1.0 + epsilon;
  return d;
}

std::size_t EnsembleConfig::p() const {
  return static_cast<std::size_t>(std::llround(phi * static_cast<double>(n)));
}

void EnsembleConfig::validate() const {
  if (n < 2) throw DomainError("ensemble needs n >= 2");
  if (!(phi >= 1.0) || !std::isfinite(phi)) throw DomainError("ensemble needs phi >= 1");
  const std::size_t pp = p();
  if (pp > max_entries / n) throw DomainError("p n exceeds the configured entry cap");
  if (!sigma.empty()) {
    if (sigma.size() != pp) throw DomainError("sigma length does not match p");
    for (double s : sigma) {
      if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("sigma must be positive and finite");
    }
  }
  kappa4_of(dist);
}

EnsembleConfig EnsembleConfig::with_sigma(std::vector<double> s) const {
  EnsembleConfig c = *this;
  c.sigma = std::move(s);
  return c;
}

EnsembleConfig EnsembleConfig::with_population(const PopulationSpectrum& spec) const {
  return with_sigma(spec.is_identity() ? std::vector<double>{} : spec.expand(p()));
}

namespace {

// Fills `count` consecutive entries of the replicate stream, already scaled.
class EntrySampler {
 public:
  EntrySampler(const EnsembleConfig& cfg, std::size_t rep)
      : rng_(cfg.seed, rep), dist_(cfg.dist),
        scale_(std::pow(static_cast<double>(cfg.p()) * static_cast<double>(cfg.n), -0.25)) {
    if (dist_.tag != DistTag::gaussian) {
      // P(draw < threshold) = p_plus on the 53-bit grid.
      threshold_ = static_cast<std::uint64_t>(std::ldexp(dist_.p_plus, 53));
      hi_ = scale_ * dist_.v_plus;
      lo_ = scale_ * dist_.v_minus;
    }
  }

  void fill(double* out, std::size_t count) {
    if (dist_.tag == DistTag::gaussian) {
      for (std::size_t i = 0; i < count; ++i) out[i] = scale_ * normal_(rng_);
    } else {
      for (std::size_t i = 0; i < count; ++i) out[i] = (rng_() >> 11) < threshold_ ? hi_ : lo_;
    }
  }

 private:
  SplitMix64 rng_;
  EntryDistribution dist_;
  double scale_;
  boost::random::normal_distribution<double> normal_{};
  std::uint64_t threshold_ = 0;
  double hi_ = 0.0, lo_ = 0.0;
};

using RowBlock = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

Eigen::MatrixXd sample_matrix(const EnsembleConfig& cfg, std::size_t rep) {
  cfg.validate();
  const std::size_t p = cfg.p(), n = cfg.n;
  RowBlock X(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n));
  EntrySampler sampler(cfg, rep);
  sampler.fill(X.data(), p * n);
  return X;
}

std::vector<double> sample_eigenvalues(const EnsembleConfig& cfg, std::size_t rep) {
  cfg.validate();
  const std::size_t p = cfg.p(), n = cfg.n;
  const std::size_t rows = std::clamp<std::size_t>((std::size_t{1} << 22) / n, 256, 8192);
  const auto nn = static_cast<Eigen::Index>(n);
  EntrySampler sampler(cfg, rep);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nn, nn);
  RowBlock B(static_cast<Eigen::Index>(std::min(rows, p)), nn);
  for (std::size_t start = 0; start < p; start += rows) {
    const std::size_t m = std::min(rows, p - start);
    if (static_cast<std::size_t>(B.rows()) != m) B.resize(static_cast<Eigen::Index>(m), nn);
    sampler.fill(B.data(), m * n);
    if (!cfg.sigma.empty()) {
      for (std::size_t i = 0; i < m; ++i) B.row(static_cast<Eigen::Index>(i)) *= std::sqrt(cfg.sigma[start + i]);
    }
    G.selfadjointView<Eigen::Lower>().rankUpdate(B.transpose());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MPLSS_THREADS")) {
    unsigned v = 0;
    const std::string_view s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const unsigned t = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
  if (t <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed = count;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed) {
          failed = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < t; ++k) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double ks_normal(std::vector<double> xs) {
  if (xs.empty()) throw DomainError("ks_normal needs a nonempty sample");
  std::sort(xs.begin(), xs.end());
  const double m = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = normal_cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - F, F - static_cast<double>(i) / m});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

ReplicateTable simulate_statistics(const EnsembleConfig& cfg, std::span<const StatKind> kinds,
                                   const SimulationOptions& opt) {
  cfg.validate();
  if (kinds.empty()) throw DomainError("no statistics requested");
  if (cfg.reps == 0) throw DomainError("reps must be positive");
  const NullCalibration cal(cfg.n, cfg.phi, opt.params);
  const double k4 = opt.kappa4.value_or(kappa4_of(cfg.dist));

  ReplicateTable table;
  table.kinds.assign(kinds.begin(), kinds.end());
  table.kappa4_used = k4;
  table.raw.assign(kinds.size(), std::vector<double>(cfg.reps));
  table.z.assign(kinds.size(), std::vector<double>(cfg.reps));
  parallel_for(cfg.reps, opt.threads, [&](std::size_t rep) {
    const std::vector<double> eigs = sample_eigenvalues(cfg, rep);
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      const double raw = stat_raw(eigs, kinds[k], cal.params(), cal.phi(), cal.support());
      table.raw[k][rep] = raw;
      table.z[k][rep] = standardize(kinds[k], raw, cal, k4, opt.alpha).z_value;
    }
  });
  return table;
}

EcdfResult ecdf_experiment(const EnsembleConfig& cfg, std::span<const StatKind> kinds,
                           const SimulationOptions& opt, std::optional<EntryDistribution> compare) {
  if (cfg.reps < 100) throw DomainError("ecdf experiments need reps >= 100");
  const ReplicateTable main = simulate_statistics(cfg, kinds, opt);
  std::optional<ReplicateTable> other;
  if (compare) {
    EnsembleConfig c2 = cfg;
    c2.dist = *compare;
    c2.seed = derived_seed(cfg.seed, 1);
    SimulationOptions o2 = opt;
    if (!opt.kappa4) o2.kappa4 = std::nullopt;
    other = simulate_statistics(c2, kinds, o2);
  }
  EcdfResult out{cfg, compare, {}};
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    EcdfKindResult r{kinds[k], main.z[k], main.raw[k], main.z[k], 0.0, std::nullopt};
    std::sort(r.z_sorted.begin(), r.z_sorted.end());
    r.ks = ks_normal(r.z_sorted);
    if (other) r.ks_two_sample = ks_two_sample(r.z, other->z[k]);
    out.kinds.push_back(std::move(r));
  }
  return out;
}

PowerResult power_experiment(const EnsembleConfig& cfg, const AlternativeSpec& alt,
                             std::span<const double> epsilons, std::span<const StatKind> kinds,
                             const SimulationOptions& opt) {
  if (epsilons.empty()) throw DomainError("no epsilon values given");
  const double crit = critical_value(opt.alpha);
  PowerResult out{cfg, alt, {epsilons.begin(), epsilons.end()}, {}};
  for (double eps : epsilons) {
    AlternativeSpec a = alt;
    a.epsilon = eps;
    if (!(eps >= 0.0)) throw DomainError("epsilon must be nonnegative");
    const EnsembleConfig c = eps == 0.0 ? cfg.with_sigma({}) : cfg.with_sigma(a.diagonal(cfg.p()));
    const ReplicateTable t = simulate_statistics(c, kinds, opt);
    const double reps = static_cast<double>(t.reps());
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      const auto hits = std::count_if(t.z[k].begin(), t.z[k].end(),
                                      [&](double z) { return std::abs(z) > crit; });
      const double pw = static_cast<double>(hits) / reps;
      out.points.push_back({kinds[k], eps, pw, std::sqrt(pw * (1.0 - pw) / reps)});
    }
  }
  return out;
}

RocCurve roc_curve(std::span<const double> null_scores, std::span<const double> alt_scores) {
  if (null_scores.empty() || alt_scores.empty()) throw DomainError("ROC needs both classes");
  std::vector<std::pair<double, int>> pooled;
  for (double s : null_scores) pooled.emplace_back(s, 0);
  for (double s : alt_scores) pooled.emplace_back(s, 1);
  for (const auto& [s, label] : pooled) {
    if (!std::isfinite(s)) throw DomainError("ROC scores must be finite");
  }
  std::sort(pooled.begin(), pooled.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  if (pooled.front().first == pooled.back().first) throw DomainError("ROC scores are all equal");

  const double P = static_cast<double>(alt_scores.size()), N = static_cast<double>(null_scores.size());
  RocCurve c;
  c.fpr.push_back(0.0);
  c.tpr.push_back(0.0);
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < pooled.size();) {
    const double s = pooled[i].first;
    while (i < pooled.size() && pooled[i].first == s) {
      (pooled[i].second ? tp : fp)++;
      ++i;
    }
    c.fpr.push_back(static_cast<double>(fp) / N);
    c.tpr.push_back(static_cast<double>(tp) / P);
  }
  for (std::size_t i = 1; i < c.fpr.size(); ++i) {
    c.auc += 0.5 * (c.fpr[i] - c.fpr[i - 1]) * (c.tpr[i] + c.tpr[i - 1]);
  }
  return c;
}

RocResult roc_experiment(const EnsembleConfig& null_cfg, const EnsembleConfig& alt_cfg,
                         std::span<const StatKind> kinds, const SimulationOptions& opt) {
  if (null_cfg.reps != alt_cfg.reps) throw DomainError("ROC needs equal reps per hypothesis");
  if (null_cfg.n != alt_cfg.n || null_cfg.phi != alt_cfg.phi) {
    throw DomainError("ROC configs must share n and phi");
  }
  const ReplicateTable t0 = simulate_statistics(null_cfg, kinds, opt);
  EnsembleConfig alt = alt_cfg;
  if (alt.seed == null_cfg.seed) alt.seed = derived_seed(null_cfg.seed, 2);
  const ReplicateTable t1 = simulate_statistics(alt, kinds, opt);
  RocResult out{null_cfg, alt, {}};
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    std::vector<double> s0(t0.z[k]), s1(t1.z[k]);
    for (double& s : s0) s = std::abs(s);
    for (double& s : s1) s = std::abs(s);
    out.kinds.push_back({kinds[k], roc_curve(s0, s1)});
  }
  return out;
}

namespace {

nlohmann::json config_json(const EnsembleConfig& c) {
  return {{"n", c.n},
          {"phi", c.phi},
          {"p", c.p()},
          {"dist", c.dist.name()},
          {"identity_sigma", c.sigma.empty()},
          {"seed", c.seed},
          {"reps", c.reps}};
}

std::string alt_name(const AlternativeSpec& a) {
  return a.kind == AlternativeSpec::Kind::cluster ? "cluster" : "spiked";
}

}  // namespace

nlohmann::json to_json(const EcdfResult& r) {
  nlohmann::json j{{"experiment", "ecdf"}, {"config", config_json(r.cfg)}};
  j["compare"] = r.compare ? nlohmann::json(r.compare->name()) : nlohmann::json(nullptr);
  j["results"] = nlohmann::json::array();
  for (const EcdfKindResult& k : r.kinds) {
    nlohmann::json e{{"kind", std::string(to_string(k.kind))},
                     {"ks", k.ks},
                     {"reps", r.cfg.reps},
                     {"seed", r.cfg.seed}};
    e["ks_two_sample"] = k.ks_two_sample ? nlohmann::json(*k.ks_two_sample) : nlohmann::json(nullptr);
    j["results"].push_back(e);
  }
  return j;
}

nlohmann::json to_json(const PowerResult& r) {
  nlohmann::json j{{"experiment", "power"},
                   {"config", config_json(r.cfg)},
                   {"alternative", {{"kind", alt_name(r.alternative)},
                                    {"a", r.alternative.a},
                                    {"r", r.alternative.r}}},
                   {"results", nlohmann::json::array()}};
  for (const PowerPoint& p : r.points) {
    j["results"].push_back({{"kind", std::string(to_string(p.kind))},
                            {"epsilon", p.epsilon},
                            {"power", p.power},
                            {"std_error", p.std_error},
                            {"reps", r.cfg.reps},
                            {"seed", r.cfg.seed}});
  }
  return j;
}

nlohmann::json to_json(const RocResult& r) {
  nlohmann::json j{{"experiment", "roc"},
                   {"null", config_json(r.null_cfg)},
                   {"alternative", config_json(r.alt_cfg)},
                   {"results", nlohmann::json::array()}};
  for (const RocKindResult& k : r.kinds) {
    j["results"].push_back({{"kind", std::string(to_string(k.kind))},
                            {"auc", k.curve.auc},
                            {"reps", r.null_cfg.reps},
                            {"seed", r.null_cfg.seed}});
  }
  return j;
}

void write_csv(std::ostream& os, const EcdfResult& r) {
  os << "kind,rep,raw,z\n";
  for (const EcdfKindResult& k : r.kinds) {
    for (std::size_t i = 0; i < k.z.size(); ++i) {
      os << to_string(k.kind) << ',' << i << ',' << detail::format_double(k.raw[i]) << ','
         << detail::format_double(k.z[i]) << '\n';
    }
  }
}

void write_csv(std::ostream& os, const PowerResult& r) {
  os << "kind,epsilon,power,std_error\n";
  for (const PowerPoint& p : r.points) {
    os << to_string(p.kind) << ',' << detail::format_double(p.epsilon) << ','
       << detail::format_double(p.power) << ',' << detail::format_double(p.std_error) << '\n';
  }
}

void write_csv(std::ostream& os, const RocResult& r) {
  os << "kind,fpr,tpr\n";
  for (const RocKindResult& k : r.kinds) {
    for (std::size_t i = 0; i < k.curve.fpr.size(); ++i) {
      os << to_string(k.kind) << ',' << detail::format_double(k.curve.fpr[i]) << ','
         << detail::format_double(k.curve.tpr[i]) << '\n';
    }
  }
}

}  // namespace mplss
