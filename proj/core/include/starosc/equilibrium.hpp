#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "starosc/eos.hpp"
#include "starosc/grid.hpp"
#include "starosc/series.hpp"

namespace starosc {

// Background fields and their radial derivatives at one radius, all chained
// analytically from (u, du/dr) through the equilibrium ODE and the EOS.
struct PointState {
  double r = 0.0;
  double u = 0.0, du = 0.0, d2u = 0.0, d3u = 0.0, d4u = 0.0;
  double omega = 0.0, domega = 0.0, d2omega = 0.0, d3omega = 0.0;
  double rho = 0.0, drho = 0.0, d2rho = 0.0, d3rho = 0.0;
  double P = 0.0, dP = 0.0, d2P = 0.0, d3P = 0.0;
  double S = 0.0, dS = 0.0, d2S = 0.0, d3S = 0.0;
  double g = 0.0, dg = 0.0, d2g = 0.0, d3g = 0.0;
  double c2 = 0.0, dc2 = 0.0, d2c2 = 0.0;
  double A = 0.0, dA = 0.0, d2A = 0.0;     // Schwarzschild discriminant
  double N2 = 0.0, dN2 = 0.0, d2N2 = 0.0;  // Brunt-Vaisala frequency squared
  // g/r with its center limit, and radial derivatives of that ratio
  double gOverR = 0.0, dgOverR = 0.0, d2gOverR = 0.0, d3gOverR = 0.0;
  double meanRho = 0.0;  // g/(G r): the 4pi/r^3 Int rho r'^2 dr' mean
};

struct GridSpec {
  std::size_t n_nodes = 481;          // clustered storage grid
  double rel_tol = 1e-12;             // integrator tolerance
  double event_tol = 1e-12;           // |u(R)| <= event_tol * u_O
  double r_max_over_alpha = 200.0;    // give up beyond this many scale lengths
  std::size_t center_order_z = 12;    // center series order in z = r^2
  std::size_t surface_extra_order = 12;
  // Theorem smallness bound on the central density for 6/5 < gamma <= 4/3;
  // must be supplied by the caller in that range.
  std::optional<double> rho_center_bound;
};

struct StarLimits {
  double rho_O = 0.0;   // central density
  double u_O = 0.0;     // central u
  double P_O = 0.0;     // central pressure
  double rho_O1 = 0.0;  // -lim (1/r) drho/dr
  double P_O1 = 0.0;    // -lim (1/r) dP/dr
  double g_O = 0.0;     // lim g/r = P_O1/rho_O
  double N2_O1 = 0.0;   // N^2 ~ (N2_O1/2) r^2
  double C_rho = 0.0;   // rho ~ C_rho (R-r)^nu
  double c_R2 = 0.0;    // c^2 ~ c_R2 (R-r)
  double g_R = 0.0;     // surface gravity
  double N2_R = 0.0;    // surface Brunt-Vaisala
  double S_R = 0.0;     // surface entropy
  double mass = 0.0;    // g_R R^2 / G
};

// Fit-based boundary coefficients plus the identity cross-checks.
struct BoundaryCoefficients {
  double rho_O1 = 0.0, P_O1 = 0.0, g_O = 0.0;
  double C_rho = 0.0, c_R2 = 0.0, g_R = 0.0;
  double N2_R = 0.0, N2_O1 = 0.0;
  double P_O1_identity = 0.0;  // (4pi/3) G rho_O^2
  double g_R_identity = 0.0;   // nu * c_R2
  double center_fit_residual = 0.0;
  double surface_fit_residual = 0.0;
};

struct AdmissibilityReport {
  bool positive_interior = false;     // rho > 0 on [0,R)
  bool surface_zero = false;          // rho(R) = 0
  bool drho_negative = false;         // item 3
  bool dP_negative = false;
  bool center_signs = false;          // (1/r) drho/dr, (1/r) dP/dr < 0 at 0
  bool physical_vacuum = false;       // item 4
  double eta_slope_R = 0.0;           // d(rho^{gamma-1})/dr at R-0
  double center_even_residual = 0.0;  // odd-power contamination of u near 0
  double surface_fit_residual = 0.0;  // rho vs C_rho (R-r)^nu
  double hydrostatic_residual = 0.0;  // FD check of dP/dr = -rho g
  double poisson_residual = 0.0;      // FD check of (r^2 g)' = 4 pi G rho r^2
  bool pass() const {
    return positive_interior && surface_zero && drho_negative && dP_negative &&
           center_signs && physical_vacuum && center_even_residual < 1e-6 &&
           surface_fit_residual < 1e-4 && hydrostatic_residual < 1e-8 &&
           poisson_residual < 1e-6;
  }
};

// Immutable spherically symmetric equilibrium. Thread-safe for reads.
class EquilibriumStar {
public:
  const EosSpec& eosSpec() const { return eos_->spec(); }
  const Eos& eos() const { return *eos_; }
  double gamma() const { return eos_->spec().gamma; }
  double nuIndex() const { return eos_->spec().nu(); }
  double G() const { return eos_->spec().grav_const; }
  double radius() const { return R_; }
  double rhoCenter() const { return limits_.rho_O; }
  const StarLimits& limits() const { return limits_; }
  const std::vector<double>& grid() const { return grid_; }
  const Rational& rationalNu() const { return rational_nu_; }

  // Background state at radius r in [0, R].
  PointState state(double r) const;

  // u and du/dr only (cheap path used by integr ation loops).
  void uAt(double r, double* u, double* du) const;

  // Center Taylor series of u in z = r^2 (constant term u_O).
  const Series& centerSeriesZ() const { return center_z_; }
  double centerSeriesRadius() const { return r_center_; }
  // Surface Taylor series of u in s = (R-r)^{1/D}; empty if nu irrational.
  const Series& surfaceSeriesS() const { return surface_s_; }
  bool hasSurfaceSeries() const { return has_surface_series_; }

  const AdmissibilityReport& admissibility() const { return admissibility_; }

  // Assembles a star from raw (r, u, du) samples. Intended for validation
  // harnesses that need deliberately broken profiles; no admissibility is
  // implied. Samples must start at r > 0 and end at r = R with u(R) = 0.
  static EquilibriumStar fromSamples(const EosSpec& eos, const std::vector<double>& r,
                                     const std::vector<double>& u, const std::vector<double>& du);

private:
  friend EquilibriumStar buildEquilibrium(const EosSpec&, double, const GridSpec&);
  friend AdmissibilityReport checkAdmissible(const EquilibriumStar&);

  struct Segment {
    double r0, r1;
    double u0, du0, d2u0;
    double u1, du1, d2u1;
  };

  std::shared_ptr<const Eos> eos_;
  double R_ = 0.0;
  std::vector<Segment> segments_;
  Series center_z_;
  double r_center_ = 0.0;
  Series surface_s_;
  bool has_surface_series_ = false;
  Rational rational_nu_;
  std::vector<double> grid_;
  StarLimits limits_;
  AdmissibilityReport admissibility_;

  void evalSegment(const Segment& s, double r, double* u, double* du) const;
  PointState chainFrom(double r, double u, double du) const;
};

// Shooting construction per the center series start + adaptive integration +
// event location of the first zero of u.
EquilibriumStar buildEquilibrium(const EosSpec& eos, double rho_center,
                                 const GridSpec& grid = {});

AdmissibilityReport checkAdmissible(const EquilibriumStar& star);

BoundaryCoefficients boundaryCoefficients(const EquilibriumStar& star,
                                          double fit_tol = 1e-3);

// rho(r) = tau rho1(tau r), S(r) = S1(tau r) - gamma C_V log tau.
EquilibriumStar rescaleTau(const EquilibriumStar& star, double tau);

}  // namespace starosc
