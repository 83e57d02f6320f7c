#pragma once

#include <memory>

#include "starosc/equilibrium.hpp"
#include "starosc/sl_solver.hpp"

namespace starosc {

// Coefficient q00 of the l = 0 operator written in divergence form
//   L^ss psi = -(1/(rho r^4)) d/dr (gamma r^4 P dpsi/dr) + q00 psi.
// The safe form evaluates the surface-singular first-line terms through the
// cancellation in eta = rho^{gamma-1}; the naive form keeps them separate.
double radialQ00(const EquilibriumStar& star, double r);
double radialQ00Naive(const EquilibriumStar& star, double r);

// Normal-form problem for the radial spectrum: a = gamma r^4 P, c = r^4 rho.
LiouvilleProblem radialProblem(const EquilibriumStar& star);

struct RadialMode {
  int n = 0;  // 1-based order; eigenfunction has n-1 interior nodes
  double lambda = 0.0;
  int nodes = -1;
  bool agreement_ok = true;
};

struct RadialSpectrum {
  std::vector<RadialMode> modes;
  std::shared_ptr<const LiouvilleTransform> transform;
  SpectrumSlice slice;
  double lambda(int n) const { return modes.at(n - 1).lambda; }
};

RadialSpectrum radialSpectrum(const EquilibriumStar& star, int n_max,
                              const SLOptions& opts = {});

struct RadialModeFunction {
  std::vector<double> r, psi, V;  // V = r psi
  std::vector<double> x, y;       // normal-form representation
  double lambda = 0.0;
  int nodes = 0;
  double residual = 0.0;
};

RadialModeFunction radialEigenfunction(const EquilibriumStar& star, const RadialSpectrum& spec,
                                       int n, const SLOptions& opts = {});

}  // namespace starosc
