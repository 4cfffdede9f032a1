#include "mplss/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include "format.hpp"
#include "json.hpp"
#include "mplss/clt.hpp"
#include "mplss/density.hpp"
#include "mplss/error.hpp"
#include "mplss/population.hpp"
#include "mplss/simulation.hpp"
#include "mplss/statistics.hpp"
#include "mplss/stieltjes.hpp"
#include "mplss/support.hpp"

#ifndef MPLSS_VERSION
#define MPLSS_VERSION "dev"
#endif

namespace mplss::cli {

namespace {

using json = nlohmann::json;

// Bad flag combination detected after parsing; exits like a usage error.
class UsageError : public Error {
 public:
  using Error::Error;
  const char* code() const noexcept override { return "usage"; }
};

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double parse_number(std::string_view s, std::size_t row, std::size_t col, const char* what) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError(std::string(what) + ": bad number '" + std::string(s) + "'", row, col);
  }
  return v;
}

// Comma-separated numeric matrix, one CSV line per row.
Eigen::MatrixXd read_matrix_csv(std::istream& is, bool header) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header && row == 1) continue;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> vals;
    std::size_t start = 0, col = 1;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      const std::string_view field =
          std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      const double v = parse_number(field, row, col, "csv");
      if (!std::isfinite(v)) throw ParseError("csv: non-finite entry", row, col);
      vals.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
      ++col;
    }
    if (!rows.empty() && vals.size() != rows.front().size()) {
      throw ParseError("csv: expected " + std::to_string(rows.front().size()) + " columns, found " +
                           std::to_string(vals.size()),
                       row, std::min(vals.size(), rows.front().size()) + 1);
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw ParseError("csv: no data rows");
  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return M;
}

// "base,c=..,a=..,b=..,eta0=..,E=.." where E also accepts gamma_plus,
// gamma_minus and center, and b=none removes the cutoff.
TestFunctionSpec parse_tf(std::string_view text, const SupportInfo& sup, bool cutoff_by_default) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    parts.push_back(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  const BaseKind base = base_kind_from_string(parts.front());
  if (base == BaseKind::custom) throw ParseError("custom test functions are not available from the CLI");
  double c = base == BaseKind::logshift || base == BaseKind::log ? 1.0 : 0.0;
  double a = 1.0, b = 4.0, eta0 = 1.0, center = 0.0;
  bool cutoff = cutoff_by_default, none = false;
  std::size_t col = parts.front().size() + 2;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::string_view p = parts[i];
    const std::size_t eq = p.find('=');
    if (eq == std::string_view::npos) throw ParseError("test function: expected key=value", 0, col);
    const std::string_view key = p.substr(0, eq), val = p.substr(eq + 1);
    if (key == "c") {
      c = parse_number(val, 0, col, "test function");
    } else if (key == "a") {
      a = parse_number(val, 0, col, "test function");
      cutoff = true;
    } else if (key == "b") {
      if (val == "none") {
        none = true;
      } else {
        b = parse_number(val, 0, col, "test function");
        cutoff = true;
      }
    } else if (key == "eta0") {
      eta0 = parse_number(val, 0, col, "test function");
    } else if (key == "E") {
      if (val == "gamma_plus") center = sup.gamma_plus;
      else if (val == "gamma_minus") center = sup.gamma_minus;
      else if (val == "center") center = sup.center();
      else center = parse_number(val, 0, col, "test function");
    } else {
      throw ParseError("test function: unknown key '" + std::string(key) + "'", 0, col);
    }
    col += p.size() + 1;
  }
  const Mollifier k = none || !cutoff ? Mollifier::none() : Mollifier{a, b};
  return {base, c, k, center, eta0};
}

json gaussian_json(const GaussianLimit& g, std::span<const std::string> labels) {
  json j = to_json(g);
  j["functions"] = labels;
  j["nodes"] = g.nodes;
  return j;
}

// Primary output goes to --output when given.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw DomainError("cannot open output file '" + path + "'");
      os_ = file_.get();
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

void write_side_csv(const std::string& path, const std::function<void(std::ostream&)>& body,
                    const json& header) {
  if (path.empty()) return;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open csv file '" + path + "'");
  f << "# " << header.dump() << '\n';
  body(f);
}

struct SpectrumFlags {
  std::string pi = "1:1";
  double phi = 100.0;
};

struct LimitFlags {
  std::vector<std::string> tfs;
  double kappa4 = 0.0;
  std::string route = "general";
  std::string kernel = "theorem";
};

struct TestFlags {
  std::string input;
  std::string rows = "vars";
  bool header = false;
  bool scale_pn = false;
  std::vector<std::string> stats{"all"};
  std::optional<double> kappa4;
};

struct SimFlags {
  std::size_t n = 200;
  double phi = 50.0;
  std::size_t reps = 500;
  std::uint64_t seed = 0;
  std::string dist = "gaussian";
  std::string compare;
  std::string pi = "1:1";
  std::optional<double> kappa4;
  bool paper_scale = false;
  std::vector<std::string> stats{"t1g"};
  std::string alt = "cluster";
  double a = 0.5;
  std::size_t r = 1;
  std::vector<double> eps{0.0, 0.05, 0.1, 0.2, 0.3};
  double roc_eps = 0.3;
  std::string csv;
};

struct CommonFlags {
  std::string output;
  std::string format = "json";
  unsigned threads = 0;
  double c = 3.0;
  double t = 3.0;
  std::optional<double> eta0;
  double alpha = 0.05;
  std::string local_route = "theorem";
  bool t4g_literal = false;
};

std::vector<StatKind> parse_stats(const std::vector<std::string>& names) {
  std::vector<StatKind> out;
  for (const std::string& s : names) {
    if (s == "all") {
      out.assign(kAllStats.begin(), kAllStats.end());
      return out;
    }
    out.push_back(stat_kind_from_string(s));
  }
  if (out.empty()) throw UsageError("no statistic selected");
  return out;
}

StatParams stat_params(const CommonFlags& f) {
  StatParams p;
  p.c = f.c;
  p.t = f.t;
  p.eta0 = f.eta0;
  p.t4g_literal = f.t4g_literal;
  if (f.local_route == "theorem") p.local_route = LocalRoute::theorem;
  else if (f.local_route == "edge") p.local_route = LocalRoute::edge_asymptotic;
  else throw UsageError("--local-route must be theorem or edge");
  return p;
}

// Reproducibility header: version, every flag of the subcommand, seed.
json run_header(const CLI::App& sub, std::optional<std::uint64_t> seed) {
  json flags = json::object();
  for (const CLI::Option* o : sub.get_options()) {
    if (o->get_lnames().empty()) continue;
    const std::string& name = o->get_lnames().front();
    if (name == "help") continue;
    if (o->count() > 0) {
      const auto& res = o->results();
      flags[name] = res.size() == 1 ? json(res.front()) : json(res);
    } else {
      const std::string d = o->get_default_str();
      flags[name] = d.empty() ? json(nullptr) : json(d);
    }
  }
  json h{{"version", MPLSS_VERSION}, {"command", sub.get_name()}, {"flags", flags}};
  h["seed"] = seed ? json(*seed) : json(nullptr);
  return h;
}

void emit_json(Sink& sink, json body, const json& header) {
  body["run"] = header;
  sink.stream() << body.dump(2) << '\n';
}

void cmd_law_density(const CLI::App& sub, const SpectrumFlags& s, const CommonFlags& f,
                     std::size_t points, double margin, std::ostream& out) {
  const PopulationSpectrum spec = PopulationSpectrum::parse(s.pi, s.phi);
  DensityGridConfig cfg;
  cfg.points = points;
  cfg.margin = margin;
  const DensityGrid g = density(spec, cfg);
  const json header = run_header(sub, std::nullopt);
  Sink sink(f.output, out);
  if (f.format == "csv") {
    sink.stream() << "# " << header.dump() << '\n';
    g.write_csv(sink.stream());
  } else {
    emit_json(sink, {{"x", g.xs}, {"rho", g.rho}, {"total_mass", g.total_mass},
                     {"flagged", g.flagged_count()}},
              header);
  }
}

void cmd_law_edges(const CLI::App& sub, const SpectrumFlags& s, const CommonFlags& f,
                   std::ostream& out) {
  const PopulationSpectrum spec = PopulationSpectrum::parse(s.pi, s.phi);
  const SupportInfo sup = support(spec);
  Sink sink(f.output, out);
  emit_json(sink, {{"gamma_minus", sup.gamma_minus}, {"gamma_plus", sup.gamma_plus},
                   {"x1", finite_or_null(sup.x1)}, {"x2", finite_or_null(sup.x2)}},
            run_header(sub, std::nullopt));
}

void cmd_law_m(const CLI::App& sub, const SpectrumFlags& s, const CommonFlags& f, double re,
               double im, std::ostream& out) {
  const PopulationSpectrum spec = PopulationSpectrum::parse(s.pi, s.phi);
  json body;
  if (im == 0.0) {
    const SupportInfo sup = support(spec);
    const RealAxisValue v = boundary_m(re, spec, sup);
    body = {{"z", complex_json({re, 0.0})}, {"m", complex_json(v.m)},
            {"m1", complex_json(v.m1)},    {"m2", complex_json(v.m2)},
            {"m3", complex_json(v.m3)},    {"in_bulk", v.in_bulk},
            {"polished", v.polished},      {"flagged", v.flagged}};
  } else {
    const StieltjesValue v = solve_m({re, im}, spec);
    body = {{"z", complex_json(v.z)},   {"m", complex_json(v.m)},
            {"m1", complex_json(v.m1)}, {"m2", complex_json(v.m2)},
            {"m3", complex_json(v.m3)}, {"companion", complex_json(companion_transform(v, spec))},
            {"residual", v.residual}};
  }
  Sink sink(f.output, out);
  emit_json(sink, body, run_header(sub, std::nullopt));
}

void cmd_limit_global(const CLI::App& sub, const SpectrumFlags& s, const LimitFlags& l,
                      const CommonFlags& f, std::ostream& out) {
  if (l.tfs.empty()) throw UsageError("limit-global needs at least one --tf");
  const PopulationSpectrum spec = PopulationSpectrum::parse(s.pi, s.phi);
  const SupportInfo sup = support(spec);
  std::vector<TestFunctionSpec> tfs;
  for (const std::string& t : l.tfs) tfs.push_back(parse_tf(t, sup, false));
  json body;
  if (l.route == "general") {
    body = gaussian_json(global_limit(tfs, spec, l.kappa4), l.tfs);
  } else if (l.route == "identity" || l.route == "contour") {
    if (!spec.is_identity()) throw UsageError("--route identity/contour needs --pi 1:1");
    const IdentityRoute route = l.route == "contour" ? IdentityRoute::contour : IdentityRoute::automatic;
    json means = json::array(), closed = json::array(), cov = json::array();
    for (std::size_t i = 0; i < tfs.size(); ++i) {
      const IdentityLimit r = global_limit_identity(tfs[i], s.phi, l.kappa4, route);
      means.push_back(r.mean);
      closed.push_back(r.closed_form);
      json row = json::array();
      for (std::size_t j = 0; j < tfs.size(); ++j) {
        if (i == j) {
          row.push_back(r.variance);
        } else {
          row.push_back(global_covariance_identity(tfs[i], tfs[j], s.phi, l.kappa4));
        }
      }
      cov.push_back(row);
    }
    body = {{"means", means}, {"cov", cov},           {"closed_form", closed},
            {"regime", "global"}, {"kappa4", l.kappa4}, {"functions", l.tfs}};
  } else {
    throw UsageError("--route must be general, identity or contour");
  }
  Sink sink(f.output, out);
  emit_json(sink, body, run_header(sub, std::nullopt));
}

void cmd_limit_local(const CLI::App& sub, const SpectrumFlags& s, const LimitFlags& l,
                     const CommonFlags& f, std::ostream& out) {
  if (l.tfs.empty()) throw UsageError("limit-local needs at least one --tf");
  const PopulationSpectrum spec = PopulationSpectrum::parse(s.pi, s.phi);
  const SupportInfo sup = support(spec);
  std::vector<TestFunctionSpec> tfs;
  for (const std::string& t : l.tfs) tfs.push_back(parse_tf(t, sup, true));
  GaussianLimit g;
  if (l.kernel == "theorem") g = local_limit(tfs, spec);
  else if (l.kernel == "bulk") g = local_limit_bulk(tfs);
  else if (l.kernel == "edge-right") g = local_limit_edge(tfs, EdgeSide::right);
  else if (l.kernel == "edge-left") g = local_limit_edge(tfs, EdgeSide::left);
  else throw UsageError("--kernel must be theorem, bulk, edge-right or edge-left");
  Sink sink(f.output, out);
  emit_json(sink, gaussian_json(g, l.tfs), run_header(sub, std::nullopt));
}

void cmd_test(const CLI::App& sub, const TestFlags& t, const CommonFlags& f, std::ostream& out) {
  const std::vector<StatKind> kinds = parse_stats(t.stats);
  if (t.rows != "vars" && t.rows != "samples") throw UsageError("--rows must be vars or samples");
  for (StatKind k : kinds) {
    if (!is_local(k) && !t.kappa4) {
      throw UsageError("global statistic " + std::string(to_string(k)) + " needs --kappa4");
    }
  }
  std::ifstream in(t.input, std::ios::binary);
  if (!in) throw ParseError("cannot open input '" + t.input + "'");
  Eigen::MatrixXd X = read_matrix_csv(in, t.header);
  if (t.rows == "samples") X.transposeInPlace();
  const auto p = static_cast<double>(X.rows()), n = static_cast<double>(X.cols());
  if (X.cols() < 2 || X.rows() < X.cols()) {
    throw DomainError("test needs p >= n >= 2 (rows are variables unless --rows samples)");
  }
  if (t.scale_pn) X *= std::pow(p * n, -0.25);
  const std::vector<double> eigs = gram_eigenvalues(X);
  const NullCalibration cal(static_cast<std::size_t>(X.cols()), p / n, stat_params(f));
  json reports = json::array();
  for (StatKind k : kinds) reports.push_back(to_json(run_test(eigs, k, cal, t.kappa4, f.alpha)));
  Sink sink(f.output, out);
  emit_json(sink, {{"p", X.rows()}, {"n", X.cols()}, {"phi", p / n}, {"reports", reports}},
            run_header(sub, std::nullopt));
}

EnsembleConfig ensemble(const CLI::App& sub, SimFlags& s) {
  if (s.paper_scale) {
    if (sub.count("--n") == 0) s.n = 400;
    if (sub.count("--phi") == 0) s.phi = 100.0;
    if (sub.count("--reps") == 0) s.reps = 1000;
  }
  EnsembleConfig c;
  c.n = s.n;
  c.phi = s.phi;
  c.reps = s.reps;
  c.seed = s.seed;
  c.dist = EntryDistribution::parse(s.dist);
  return c.with_population(PopulationSpectrum::parse(s.pi, s.phi));
}

SimulationOptions sim_options(const SimFlags& s, const CommonFlags& f) {
  SimulationOptions o;
  o.params = stat_params(f);
  o.kappa4 = s.kappa4;
  o.alpha = f.alpha;
  o.threads = f.threads;
  return o;
}

AlternativeSpec alternative(const SimFlags& s, double eps) {
  if (s.alt == "cluster") return AlternativeSpec::cluster(s.a, eps);
  if (s.alt == "spiked") return AlternativeSpec::spiked(s.r, eps);
  throw UsageError("--alt must be cluster or spiked");
}

void cmd_simulate_ecdf(const CLI::App& sub, SimFlags& s, const CommonFlags& f, std::ostream& out) {
  const EnsembleConfig cfg = ensemble(sub, s);
  const std::vector<StatKind> kinds = parse_stats(s.stats);
  std::optional<EntryDistribution> cmp;
  if (!s.compare.empty()) cmp = EntryDistribution::parse(s.compare);
  const EcdfResult r = ecdf_experiment(cfg, kinds, sim_options(s, f), cmp);
  const json header = run_header(sub, s.seed);
  write_side_csv(s.csv, [&](std::ostream& os) { write_csv(os, r); }, header);
  Sink sink(f.output, out);
  emit_json(sink, to_json(r), header);
}

void cmd_simulate_power(const CLI::App& sub, SimFlags& s, const CommonFlags& f, std::ostream& out) {
  const EnsembleConfig cfg = ensemble(sub, s);
  const std::vector<StatKind> kinds = parse_stats(s.stats);
  const PowerResult r = power_experiment(cfg, alternative(s, 0.0), s.eps, kinds, sim_options(s, f));
  const json header = run_header(sub, s.seed);
  write_side_csv(s.csv, [&](std::ostream& os) { write_csv(os, r); }, header);
  Sink sink(f.output, out);
  emit_json(sink, to_json(r), header);
}

void cmd_simulate_roc(const CLI::App& sub, SimFlags& s, const CommonFlags& f, std::ostream& out) {
  const EnsembleConfig null_cfg = ensemble(sub, s);
  const std::vector<StatKind> kinds = parse_stats(s.stats);
  const AlternativeSpec alt = alternative(s, s.roc_eps);
  const EnsembleConfig alt_cfg = null_cfg.with_sigma(alt.diagonal(null_cfg.p()));
  const RocResult r = roc_experiment(null_cfg, alt_cfg, kinds, sim_options(s, f));
  const json header = run_header(sub, s.seed);
  write_side_csv(s.csv, [&](std::ostream& os) { write_csv(os, r); }, header);
  Sink sink(f.output, out);
  emit_json(sink, to_json(r), header);
}

void add_common(CLI::App* sub, CommonFlags& f, bool stats) {
  sub->add_option("--output", f.output, "Write the primary output to this path");
  if (stats) {
    sub->add_option("--c", f.c, "Shift c of the global h1, h2 statistics");
    sub->add_option("--t", f.t, "T3 parameter t (> 1)");
    sub->add_option("--eta0", f.eta0, "Local scale (default n^-1/4)");
    sub->add_option("--alpha", f.alpha, "Test level");
    sub->add_option("--local-route", f.local_route, "Local calibration: theorem or edge");
    sub->add_flag("--t4g-literal", f.t4g_literal, "Literal printed T4g constants");
  }
}

void add_spectrum(CLI::App* sub, SpectrumFlags& s) {
  sub->add_option("--pi", s.pi, "Population spectrum 'w:v,w:v,...'");
  sub->add_option("--phi", s.phi, "Aspect ratio p/n");
}

void add_sim(CLI::App* sub, SimFlags& s, CommonFlags& f) {
  add_common(sub, f, true);
  sub->add_option("--n", s.n, "Sample count");
  sub->add_option("--phi", s.phi, "Aspect ratio, p = round(phi n)");
  sub->add_option("--reps", s.reps, "Replicates");
  sub->add_option("--seed", s.seed, "Master seed (unsigned 64-bit)");
  sub->add_option("--dist", s.dist, "gaussian, twopoint_neg, twopoint_pos or custom:<p>");
  sub->add_option("--pi", s.pi, "Population spectrum of the simulated data");
  sub->add_option("--kappa4", s.kappa4, "kappa4 used to standardize global statistics");
  sub->add_option("--stat", s.stats, "Statistic(s), or all")->delimiter(',');
  sub->add_option("--threads", f.threads, "Worker threads (default MPLSS_THREADS or all cores)");
  sub->add_option("--csv", s.csv, "Per-replicate or per-point CSV path");
  sub->add_flag("--paper-scale", s.paper_scale, "Defaults n=400, phi=100, reps=1000");
}

int report_error(std::ostream& err, const Error& e, const char* fallback_code = nullptr) {
  json j{{"error", fallback_code ? fallback_code : e.code()}, {"message", e.what()}};
  if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
    j["row"] = pe->row();
    j["column"] = pe->column();
  }
  err << j.dump() << '\n';
  return dynamic_cast<const ParseError*>(&e) || dynamic_cast<const UsageError*>(&e) ? 2 : 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear spectral statistics of high-dimensional sample covariance matrices"};
  app.set_version_flag("--version", std::string(MPLSS_VERSION));
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  CommonFlags common;
  SpectrumFlags spectrum;
  LimitFlags limits;
  TestFlags test;
  SimFlags sim;
  std::size_t points = 2000;
  double margin = -1.0, re = 0.0, im = 0.0;

  auto* density_cmd = app.add_subcommand("law-density", "Density of the limiting law on a grid");
  add_spectrum(density_cmd, spectrum);
  add_common(density_cmd, common, false);
  density_cmd->add_option("--points", points, "Grid points");
  density_cmd->add_option("--margin", margin, "Padding beyond the support (negative: 2% of width)");
  density_cmd->add_option("--format", common.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* edges_cmd = app.add_subcommand("law-edges", "Support edges and critical points");
  add_spectrum(edges_cmd, spectrum);
  add_common(edges_cmd, common, false);

  auto* m_cmd = app.add_subcommand("law-m", "Stieltjes transform and derivatives at z");
  add_spectrum(m_cmd, spectrum);
  add_common(m_cmd, common, false);
  m_cmd->add_option("--re", re, "Re z")->required();
  m_cmd->add_option("--im", im, "Im z (0 gives the boundary value)");

  auto* lg_cmd = app.add_subcommand("limit-global", "Global Gaussian limit of linear statistics");
  add_spectrum(lg_cmd, spectrum);
  add_common(lg_cmd, common, false);
  lg_cmd->add_option("--tf", limits.tfs, "Test function 'base,c=..,a=..,b=..,eta0=..,E=..'");
  lg_cmd->add_option("--kappa4", limits.kappa4, "Fourth cumulant of the entries");
  lg_cmd->add_option("--route", limits.route, "general, identity or contour");

  auto* ll_cmd = app.add_subcommand("limit-local", "Local Gaussian limit near an edge or in the bulk");
  add_spectrum(ll_cmd, spectrum);
  add_common(ll_cmd, common, false);
  ll_cmd->add_option("--tf", limits.tfs, "Test function 'base,c=..,a=..,b=..,eta0=..,E=..'");
  ll_cmd->add_option("--kernel", limits.kernel, "theorem, bulk, edge-right or edge-left");

  auto* test_cmd = app.add_subcommand("test", "Test H0: Sigma = I on a data matrix");
  add_common(test_cmd, common, true);
  test_cmd->add_option("--input", test.input, "CSV data matrix")->required();
  test_cmd->add_option("--rows", test.rows, "Rows are vars (p x n) or samples (n x p)");
  test_cmd->add_flag("--header", test.header, "Skip one header line");
  test_cmd->add_flag("--scale-pn", test.scale_pn, "Multiply entries by (pn)^-1/4");
  test_cmd->add_option("--stat", test.stats, "Statistic(s), or all")->delimiter(',');
  test_cmd->add_option("--kappa4", test.kappa4, "kappa4 for global statistics");

  auto* ecdf_cmd = app.add_subcommand("simulate-ecdf", "Null calibration ECDF experiment");
  add_sim(ecdf_cmd, sim, common);
  ecdf_cmd->add_option("--compare-dist", sim.compare, "Second entry law for a two-sample KS");

  auto* power_cmd = app.add_subcommand("simulate-power", "Power across an epsilon sweep");
  add_sim(power_cmd, sim, common);
  power_cmd->add_option("--alt", sim.alt, "cluster or spiked");
  power_cmd->add_option("--a", sim.a, "Cluster weight");
  power_cmd->add_option("--r", sim.r, "Number of spikes");
  power_cmd->add_option("--eps", sim.eps, "Epsilon values")->delimiter(',');

  auto* roc_cmd = app.add_subcommand("simulate-roc", "ROC and AUC of null versus alternative");
  add_sim(roc_cmd, sim, common);
  roc_cmd->add_option("--alt", sim.alt, "cluster or spiked");
  roc_cmd->add_option("--a", sim.a, "Cluster weight");
  roc_cmd->add_option("--r", sim.r, "Number of spikes");
  roc_cmd->add_option("--eps", sim.roc_eps, "Alternative epsilon");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*density_cmd) cmd_law_density(*density_cmd, spectrum, common, points, margin, out);
    else if (*edges_cmd) cmd_law_edges(*edges_cmd, spectrum, common, out);
    else if (*m_cmd) cmd_law_m(*m_cmd, spectrum, common, re, im, out);
    else if (*lg_cmd) cmd_limit_global(*lg_cmd, spectrum, limits, common, out);
    else if (*ll_cmd) cmd_limit_local(*ll_cmd, spectrum, limits, common, out);
    else if (*test_cmd) cmd_test(*test_cmd, test, common, out);
    else if (*ecdf_cmd) cmd_simulate_ecdf(*ecdf_cmd, sim, common, out);
    else if (*power_cmd) cmd_simulate_power(*power_cmd, sim, common, out);
    else if (*roc_cmd) cmd_simulate_roc(*roc_cmd, sim, common, out);
  } catch (const Error& e) {
    return report_error(err, e);
  } catch (const std::exception& e) {
    err << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
  return 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"mplss"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace mplss::cli
