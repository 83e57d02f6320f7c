#pragma once

#include <memory>
#include <span>
#include <vector>

#include "starosc/equilibrium.hpp"

namespace starosc {

// Named background fields for scale-height expressions.
enum class Field { Rho, Pressure, Gravity, SoundSpeed2, Radius };

struct FieldPower {
  Field field;
  double power = 1.0;
};

// 1/H[Q] = -d log Q / dr for a product of named fields, assembled from the
// analytic component log-derivatives (never by differencing the product).
double invScaleHeight(const PointState& p, std::span<const FieldPower> q);
double invScaleHeight(const EquilibriumStar& star, std::span<const FieldPower> q, double r);

// Sampled background bundle on the star grid.
struct Profiles {
  std::vector<double> r, rho, P, S, Phi, g, c2, A, N2, meanRho;
  double rho_O = 0.0, g_O = 0.0;
};
Profiles backgroundProfiles(const EquilibriumStar& star);

// Pointwise lambda- (g-branch) or mu- (p-branch) dependent coefficients.
// Everything references the Gough reduction of the oscillation system.
struct AuxPoint {
  double r = 0.0;
  double E = 1.0, dE = 0.0, d2E = 0.0, d3E = 0.0;  // branch E factor
  double invHE = 0.0, dinvHE = 0.0;                // 1/H[E], d/dr
  double frakN2 = 0.0, dfrakN2 = 0.0, d2frakN2 = 0.0;
  double kappa = 0.0, dkappa = 0.0, d2kappa = 0.0;
  double Sl2 = 0.0;      // Lamb frequency squared
  double aCoup = 0.0;    // rho / (H[rho] g E)  (or its p analogue)
  double bCoup = 0.0;    // rho c^2 lambda / (H[rho] E r Sl2 g^2)  (p analogue)
  double bint = 0.0;     // bCoup * r, the W-exponent integrand
  double W = 0.0;        // weight function of the reduction
  double invHW = 0.0;    // = A_coefficient / 2
  double Acoef = 0.0;    // the first-order coefficient A(r)
  double dAcoef = 0.0;
  double invHgE2r2 = 0.0;   // 1/H[g^2 E / r^2]
  double invHEorig = 0.0;   // 1/H[E] of the original (g-form) factor
  double lambda_phys = 0.0; // lambda (g) or 1/mu (p)
};

enum class Branch { G, P };

// Common machinery for the two parameter families.
class ModeAux {
public:
  virtual ~ModeAux() = default;
  Branch branch() const { return branch_; }
  int l() const { return l_; }
  double ll1() const { return static_cast<double>(l_) * (l_ + 1); }
  double parameter() const { return param_; }   // lambda or mu
  double lambdaPhys() const;                    // lambda on both branches
  const EquilibriumStar& star() const { return *star_; }
  double minE() const { return minE_; }

  AuxPoint at(double r) const;
  // E and friends without the W quadrature (cheap path).
  virtual void eChain(const PointState& p, double* E, double* dE, double* d2E,
                      double* d3E) const = 0;

protected:
  ModeAux(std::shared_ptr<const EquilibriumStar> star, int l, double param, Branch b);
  virtual void fill(const PointState& p, AuxPoint* a) const = 0;
  void buildWTable();
  double wExponent(double r) const;  // cumulative 2 pi G Int bint

  std::shared_ptr<const EquilibriumStar> star_;
  int l_;
  double param_;
  Branch branch_;
  double minE_ = 1.0;
  std::vector<double> wgrid_, wint_, wder_;
};

// E = 1 + (E1 + E2 lambda) lambda / l(l+1),
// E1 = -4 r/g + 4 pi G rho (r/g)^2, E2 = -(r/g)^2.
class GoughAux : public ModeAux {
public:
  GoughAux(std::shared_ptr<const EquilibriumStar> star, int l, double lambda);
  double lambda() const { return param_; }
  double E1(const PointState& p) const;
  double E2(const PointState& p) const;
  void eChain(const PointState& p, double* E, double* dE, double* d2E,
              double* d3E) const override;

protected:
  void fill(const PointState& p, AuxPoint* a) const override;
};

// E^p = 1 + (E^p_1 + mu E^p_2) mu,
// E^p_1 = 4 g/r - 4 pi G rho, E^p_2 = -l(l+1)(g/r)^2.
class PModeAux : public ModeAux {
public:
  PModeAux(std::shared_ptr<const EquilibriumStar> star, int l, double mu);
  double mu() const { return param_; }
  double Ep1(const PointState& p) const;
  double Ep2(const PointState& p) const;
  void eChain(const PointState& p, double* E, double* dE, double* d2E,
              double* d3E) const override;

protected:
  void fill(const PointState& p, AuxPoint* a) const override;
};

// Throws LambdaTooLarge / MuTooLarge when min E dips below zero.
GoughAux goughFactors(std::shared_ptr<const EquilibriumStar> star, int l, double lambda);
PModeAux pmodeFactors(std::shared_ptr<const EquilibriumStar> star, int l, double mu);

// Largest parameter keeping min E >= 1 - eps, located by bisection.
double lambda0Default(const std::shared_ptr<const EquilibriumStar>& star, int l,
                      double eps = 0.1);
double mu0Default(const std::shared_ptr<const EquilibriumStar>& star, int l, double eps = 0.1);

}  // namespace starosc
