#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "starosc/grid.hpp"
#include "starosc/series.hpp"

namespace starosc {

// Entropy law S = Sigma(omega), omega = rho^{gamma-1}. Either a polynomial
// in omega or a tabulated law interpolated by a natural cubic spline.
class SigmaLaw {
public:
  static SigmaLaw zero();
  static SigmaLaw polynomial(std::vector<double> coeff);
  static SigmaLaw table(std::vector<double> omega, std::vector<double> sigma);

  bool isPolynomial() const { return kind_ == Kind::Polynomial; }
  const std::vector<double>& coefficients() const { return coeff_; }
  const std::vector<double>& tableOmega() const { return omega_; }
  const std::vector<double>& tableSigma() const { return sigma_; }

  double value(double omega) const;
  double deriv(double omega) const;
  double deriv2(double omega) const;
  double deriv3(double omega) const;

  // Taylor expansion about omega0. Polynomials are exact to any order;
  // spline tables cap at cubic.
  Series taylorAt(double omega0, std::size_t order) const;

private:
  enum class Kind { Polynomial, Table };
  Kind kind_ = Kind::Polynomial;
  std::vector<double> coeff_;
  // table data + spline second derivatives
  std::vector<double> omega_, sigma_, y2_;
  void buildSpline();
  std::size_t seg(double omega) const;
};

struct EosSpec {
  double gamma = 1.5;
  double c_v = 1.0;
  double grav_const = 1.0;
  SigmaLaw sigma = SigmaLaw::zero();

  double nu() const { return 1.0 / (gamma - 1.0); }
};

// Evaluation engine for P = rho^gamma exp(S/C_V) with S = Sigma(rho^{gamma-1}).
// Everything is parametrized by omega = rho^{gamma-1}; the potential-like
// variable u = f^u(rho) has the closed form
//   u(omega) = omega e^{Sigma(omega)/C_V} + (1/(gamma-1)) Int_0^omega e^{Sigma/C_V}.
class Eos {
public:
  Eos(EosSpec spec, double omega_max_hint = 1.0);

  const EosSpec& spec() const { return spec_; }
  double nu() const { return spec_.nu(); }

  double pressure(double rho) const;       // f^P
  double dPressureDRho(double rho) const;  // Df^P
  // gamma + (gamma-1)/C_V * omega * Sigma'(omega); must stay positive.
  double ellipticFactor(double omega) const;
  // Verifies ellipticFactor > 0 on [0, omega_max]; worst value reported.
  bool elliptic(double omega_max, double* worst = nullptr) const;

  double expSigmaOverCv(double omega) const;
  double uOfOmega(double omega) const;
  double uOfRho(double rho) const;  // f^u
  double omegaOfU(double u) const;  // inverse, u > 0
  double rhoOfU(double u) const;    // f^rho with the u v 0 clamp
  double J(double omega) const;     // du/domega
  double dJ(double omega) const;    // d2u/domega2
  double d2J(double omega) const;   // d3u/domega3

  // u(omega0 + d) as a Taylor series in d (constant term included).
  Series uSeriesAtOmega(double omega0, std::size_t order) const;
  // delta-omega as a series in (u - u(omega0)); zero constant term.
  Series omegaDeltaSeriesInU(double omega0, std::size_t order) const;

private:
  EosSpec spec_;
  // prefix table of I(omega) = Int_0^omega e^{Sigma/C_V}
  std::vector<double> iKnots_, iPrefix_;
  double iOf(double omega) const;
};

}  // namespace starosc
