#include "mplss/population.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "format.hpp"
#include "mplss/error.hpp"

namespace mplss {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s, std::size_t column) {
  s = trim(s);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("spectrum: cannot parse number '" + std::string(s) + "'", 1, column);
  }
  return v;
}

}  // namespace

PopulationSpectrum::PopulationSpectrum(std::vector<Atom> atoms, double phi, double tau) {
  if (!(phi > 0.0) || !std::isfinite(phi)) throw DomainError("phi must be positive and finite");
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("tau must lie in (0, 1)");
  if (atoms.empty()) throw DomainError("spectrum needs at least one atom");

  std::map<double, double, std::greater<>> merged;
  double total = 0.0;
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.value) || a.value < tau || a.value > 1.0 / tau) {
      throw DomainError("atom value " + detail::format_double(a.value) + " outside [tau, 1/tau]");
    }
    if (!(a.weight > 0.0) || a.weight > 1.0 + 1e-12) {
      throw DomainError("atom weight " + detail::format_double(a.weight) + " outside (0, 1]");
    }
    merged[a.value] += a.weight;
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("atom weights sum to " + detail::format_double(total) + ", expected 1");
  }
  for (auto [v, w] : merged) atoms_.push_back({v, w});
  phi_ = phi;
  sqrt_phi_ = std::sqrt(phi);
}

PopulationSpectrum PopulationSpectrum::identity(double phi) { return {{{1.0, 1.0}}, phi}; }

PopulationSpectrum PopulationSpectrum::from_diagonal(std::span<const double> sigma, double phi,
                                                     double tau) {
  if (sigma.empty()) throw DomainError("empty diagonal");
  std::map<double, std::size_t> counts;
  for (double s : sigma) ++counts[s];
  std::vector<Atom> atoms;
  const double p = static_cast<double>(sigma.size());
  double assigned = 0.0;
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    double w = static_cast<double>(it->second) / p;
    if (std::next(it) == counts.end()) w = 1.0 - assigned;
    assigned += w;
    atoms.push_back({it->first, w});
  }
  return {std::move(atoms), phi, tau};
}

PopulationSpectrum PopulationSpectrum::parse(std::string_view text, double phi, double tau) {
  std::vector<Atom> atoms;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(pos, end - pos);
    std::size_t colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError("spectrum: expected 'weight:value' in '" + std::string(item) + "'", 1,
                       pos + 1);
    }
    double w = parse_number(item.substr(0, colon), pos + 1);
    double v = parse_number(item.substr(colon + 1), pos + colon + 2);
    atoms.push_back({v, w});
    pos = end + 1;
  }
  // Textual weights are typically rounded decimals; renormalize tiny drift.
  double total = 0.0;
  for (const Atom& a : atoms) total += a.weight;
  if (std::abs(total - 1.0) <= 1e-9) {
    for (Atom& a : atoms) a.weight /= total;
  }
  return {std::move(atoms), phi, tau};
}

double PopulationSpectrum::moment(int k) const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.weight * std::pow(a.value, k);
  return s;
}

std::vector<double> PopulationSpectrum::expand(std::size_t p) const {
  std::vector<double> out;
  out.reserve(p);
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    std::size_t count = (i + 1 == atoms_.size())
                            ? p - std::min(p, out.size())
                            : static_cast<std::size_t>(std::llround(atoms_[i].weight * p));
    count = std::min(count, p - out.size());
    out.insert(out.end(), count, atoms_[i].value);
  }
  return out;
}

std::string PopulationSpectrum::to_string() const {
  std::string s;
  for (const Atom& a : atoms_) {
    if (!s.empty()) s += ',';
    s += detail::format_double(a.weight) + ':' + detail::format_double(a.value);
  }
  return s;
}

}  // namespace mplss
