#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mplss {

struct Atom {
  double value;
  double weight;
};

// Population spectral measure pi (weighted atoms of the diagonal of Sigma)
// together with the aspect ratio phi = p/n.
class PopulationSpectrum {
 public:
  static constexpr double kDefaultTau = 1e-4;

  // Atoms are sorted descending and equal values merged. Throws DomainError
  // if weights do not sum to one within 1e-12 or a value leaves [tau, 1/tau].
  PopulationSpectrum(std::vector<Atom> atoms, double phi, double tau = kDefaultTau);

  static PopulationSpectrum identity(double phi);
  // Empirical spectral measure of an explicit diagonal.
  static PopulationSpectrum from_diagonal(std::span<const double> sigma, double phi,
                                          double tau = kDefaultTau);
  // "w1:v1,w2:v2,...". Throws ParseError on malformed text.
  static PopulationSpectrum parse(std::string_view text, double phi,
                                  double tau = kDefaultTau);

  std::span<const Atom> atoms() const { return atoms_; }
  double phi() const { return phi_; }
  double sqrt_phi() const { return sqrt_phi_; }
  double largest() const { return atoms_.front().value; }
  double smallest() const { return atoms_.back().value; }
  // k-th moment of pi.
  double moment(int k) const;
  bool is_identity() const { return atoms_.size() == 1 && atoms_.front().value == 1.0; }

  // Diagonal of length p with round(w_i * p) copies of each atom; the last
  // atom absorbs rounding so the length is exactly p.
  std::vector<double> expand(std::size_t p) const;

  std::string to_string() const;

 private:
  std::vector<Atom> atoms_;
  double phi_;
  double sqrt_phi_;
};

}  // namespace mplss
