#include <doctest.h>

#include <cmath>
#include <vector>

#include "starosc/equilibrium.hpp"
#include "starosc/errors.hpp"

using namespace starosc;

namespace {

// Independent Lane-Emden integrator: theta'' + (2/xi) theta' + theta^n = 0,
// RK4 with Richardson refinement of the first zero.
double laneEmdenFirstZero(double n, double h) {
  auto rhs = [n](double xi, double th, double dth, double* f1, double* f2) {
    *f1 = dth;
    *f2 = (xi == 0.0) ? -1.0 / 3.0 : (-std::pow(std::max(th, 0.0), n) - 2.0 * dth / xi);
  };
  // series start to avoid the origin
  double xi = 1e-4;
  double th = 1.0 - xi * xi / 6.0 + n * std::pow(xi, 4) / 120.0;
  double dth = -xi / 3.0 + n * std::pow(xi, 3) / 30.0;
  double prev_xi = xi, prev_th = th;
  while (th > 0.0 && xi < 50.0) {
    prev_xi = xi;
    prev_th = th;
    double k1t, k1d, k2t, k2d, k3t, k3d, k4t, k4d;
    rhs(xi, th, dth, &k1t, &k1d);
    rhs(xi + 0.5 * h, th + 0.5 * h * k1t, dth + 0.5 * h * k1d, &k2t, &k2d);
    rhs(xi + 0.5 * h, th + 0.5 * h * k2t, dth + 0.5 * h * k2d, &k3t, &k3d);
    rhs(xi + h, th + h * k3t, dth + h * k3d, &k4t, &k4d);
    th += h * (k1t + 2 * k2t + 2 * k3t + k4t) / 6.0;
    dth += h * (k1d + 2 * k2d + 2 * k3d + k4d) / 6.0;
    xi += h;
  }
  if (th > 0.0) return -1.0;  // no zero
  // secant on the last step
  return prev_xi + (xi - prev_xi) * prev_th / (prev_th - th);
}

double laneEmdenFirstZeroRich(double n) {
  double a = laneEmdenFirstZero(n, 2e-4);
  double b = laneEmdenFirstZero(n, 1e-4);
  return b + (b - a) / 15.0;
}

EosSpec polySpec(double gamma, std::vector<double> sigma = {0.0}) {
  EosSpec s;
  s.gamma = gamma;
  s.c_v = 1.0;
  s.grav_const = 1.0;
  s.sigma = SigmaLaw::polynomial(std::move(sigma));
  return s;
}

}  // namespace

TEST_CASE("constant-entropy star matches the Lane-Emden oracle") {
  EosSpec spec = polySpec(1.5);
  EquilibriumStar star = buildEquilibrium(spec, 1.0);
  double u_O = star.limits().u_O;
  double xi1_star = star.radius() * std::sqrt(4.0 * M_PI * spec.grav_const * 1.0 / u_O);
  double xi1_oracle = laneEmdenFirstZeroRich(2.0);
  CHECK(std::abs(xi1_star - xi1_oracle) / xi1_oracle < 1e-6);
}

TEST_CASE("gamma = 6/5 constant entropy has no finite radius") {
  EosSpec spec = polySpec(1.2);
  GridSpec g;
  g.rho_center_bound = 10.0;
  g.r_max_over_alpha = 60.0;
  CHECK_THROWS_AS(buildEquilibrium(spec, 1.0, g), NoFiniteRadius);
}

TEST_CASE("Lane-Emden homology scaling of the radius") {
  EosSpec spec = polySpec(1.5);
  EquilibriumStar s1 = buildEquilibrium(spec, 1.0);
  EquilibriumStar s2 = buildEquilibrium(spec, 2.0);
  double expect = std::pow(2.0, (spec.gamma - 2.0) / 2.0);
  CHECK(s2.radius() / s1.radius() == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("admissibility and boundary coefficients") {
  EosSpec spec = polySpec(1.5, {0.0, -0.05});  // mild baroclinic star
  EquilibriumStar star = buildEquilibrium(spec, 1.0);
  const AdmissibilityReport& rep = star.admissibility();
  CHECK(rep.positive_interior);
  CHECK(rep.surface_zero);
  CHECK(rep.drho_negative);
  CHECK(rep.dP_negative);
  CHECK(rep.center_signs);
  CHECK(rep.physical_vacuum);
  CHECK(rep.hydrostatic_residual < 1e-8);
  CHECK(rep.poisson_residual < 1e-6);
  CHECK(rep.pass());

  BoundaryCoefficients bc = boundaryCoefficients(star);
  CHECK(bc.P_O1 == doctest::Approx(bc.P_O1_identity).epsilon(1e-6));
  CHECK(bc.g_O == doctest::Approx(bc.P_O1 / 1.0).epsilon(1e-6));
  CHECK(bc.g_R == doctest::Approx(bc.g_R_identity).epsilon(1e-3));
  CHECK(bc.C_rho == doctest::Approx(star.limits().C_rho).epsilon(1e-4));
  CHECK(bc.surface_fit_residual < 1e-4);
}

TEST_CASE("constant entropy gives vanishing Brunt-Vaisala everywhere") {
  EquilibriumStar star = buildEquilibrium(polySpec(1.5), 1.0);
  for (double fr : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    PointState p = star.state(fr * star.radius());
    CHECK(std::abs(p.A) < 1e-12);
    CHECK(std::abs(p.N2) < 1e-12);
  }
  BoundaryCoefficients bc = boundaryCoefficients(star);
  CHECK(std::abs(bc.N2_R) < 1e-10);
  CHECK(std::abs(bc.N2_O1) < 1e-10);
}

TEST_CASE("u is not the specific enthalpy unless Sigma is constant") {
  // d(u - chi)/dr = -(1/c_v) w Sigma'(w) (P/rho^2) drho/dr
  EosSpec spec = polySpec(1.5, {0.1, -0.2});
  EquilibriumStar star = buildEquilibrium(spec, 1.0);
  for (double fr : {0.2, 0.5, 0.8}) {
    PointState p = star.state(fr * star.radius());
    // chi = gamma/(gamma-1) P/rho; d(chi)/dr via the chain
    double dchi = spec.gamma / (spec.gamma - 1.0) * (p.dP / p.rho - p.P * p.drho / (p.rho * p.rho));
    double lhs = p.du - dchi;
    double rhs = -(1.0 / spec.c_v) * p.omega * spec.sigma.deriv(p.omega) *
                 (p.P / (p.rho * p.rho)) * p.drho;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-7));
  }
  // constant entropy: u and chi differ by a constant
  EquilibriumStar iso = buildEquilibrium(polySpec(1.5), 1.0);
  PointState p = iso.state(0.5 * iso.radius());
  double dchi = 1.5 / 0.5 * (p.dP / p.rho - p.P * p.drho / (p.rho * p.rho));
  CHECK(p.du == doctest::Approx(dchi).epsilon(1e-9));
}

TEST_CASE("physical vacuum continuation: omega extends C1 across R") {
  EquilibriumStar star = buildEquilibrium(polySpec(1.5), 1.0);
  PointState pR = star.state(star.radius());
  CHECK(std::isfinite(pR.domega));
  CHECK(pR.domega < 0.0);
  // one-sided difference of omega approaches the chained slope
  double h = 1e-6 * star.radius();
  PointState pm = star.state(star.radius() - h);
  CHECK((0.0 - pm.omega) / h == doctest::Approx(pR.domega).epsilon(1e-4));
}

TEST_CASE("tau rescaling") {
  EosSpec spec = polySpec(1.5, {0.0, -0.05});
  EquilibriumStar star = buildEquilibrium(spec, 1.0);
  EquilibriumStar same = rescaleTau(star, 1.0);
  CHECK(same.radius() == doctest::Approx(star.radius()).epsilon(1e-10));

  EquilibriumStar half = rescaleTau(star, 2.0);
  CHECK(half.radius() == doctest::Approx(star.radius() / 2.0).epsilon(1e-8));
  CHECK(half.rhoCenter() == doctest::Approx(2.0 * star.rhoCenter()).epsilon(1e-12));
  // P(r) = P1(tau r) pointwise
  for (double fr : {0.25, 0.55, 0.85}) {
    PointState a = half.state(fr * half.radius());
    PointState b = star.state(fr * star.radius());
    CHECK(a.P == doctest::Approx(b.P).epsilon(1e-8));
    CHECK(a.rho == doctest::Approx(2.0 * b.rho).epsilon(1e-8));
  }
  CHECK_THROWS_AS(rescaleTau(star, -1.0), DomainError);

  // condition-number scalings of Theorem-type quantities:
  // (1+rho<rho>^-1)<rho>^-1 scales by tau^-1, -(1/r)(drho/dr)<rho>^-1 by tau^2
  double q1s = 0.0, q1h = 0.0, q2s = 0.0, q2h = 0.0;
  double fr = 0.5;
  {
    PointState b = star.state(fr * star.radius());
    PointState a = half.state(fr * half.radius());
    q1s = (1.0 + b.rho / b.meanRho) / b.meanRho;
    q1h = (1.0 + a.rho / a.meanRho) / a.meanRho;
    q2s = -(b.drho / b.r) / b.meanRho;
    q2h = -(a.drho / a.r) / a.meanRho;
  }
  CHECK(q1h == doctest::Approx(q1s / 2.0).epsilon(1e-7));
  CHECK(q2h == doctest::Approx(q2s * 4.0).epsilon(1e-7));
}

TEST_CASE("hand-made profiles are flagged") {
  EosSpec spec = polySpec(1.5);
  // bump in u produces drho/dr > 0 somewhere
  std::vector<double> r, u, du;
  double R = 1.0, uO = 3.0;
  int n = 400;
  for (int i = 0; i <= n; ++i) {
    double x = 1e-3 + (R - 1e-3) * i / n;
    double base = uO * (1.0 - x * x / (R * R));
    double bump = 0.3 * uO * std::exp(-std::pow((x - 0.55 * R) / (0.06 * R), 2));
    double dbase = -2.0 * uO * x / (R * R);
    double dbump = bump * (-2.0 * (x - 0.55 * R) / std::pow(0.06 * R, 2));
    r.push_back(x);
    u.push_back(std::max(base + bump, 0.0));
    du.push_back(dbase + dbump);
  }
  u.back() = 0.0;
  EquilibriumStar bad = EquilibriumStar::fromSamples(spec, r, u, du);
  AdmissibilityReport rep = checkAdmissible(bad);
  CHECK_FALSE(rep.drho_negative);

  // rho ~ (R-r)^{nu+1/2} near R fails the physical-vacuum window
  std::vector<double> r2, u2, du2;
  double p = (2.0 + 0.5) * (spec.gamma - 1.0);  // omega ~ (R-r)^{1.25}
  for (int i = 0; i <= n; ++i) {
    double x = 1e-3 + (R - 1e-3) * i / n;
    double val = 3.0 * std::pow((R - x) / R, p);
    double dval = -3.0 * p / R * std::pow((R - x) / R, p - 1.0);
    r2.push_back(x);
    u2.push_back(val);
    du2.push_back(dval);
  }
  u2.back() = 0.0;
  EquilibriumStar bad2 = EquilibriumStar::fromSamples(spec, r2, u2, du2);
  AdmissibilityReport rep2 = checkAdmissible(bad2);
  CHECK_FALSE(rep2.physical_vacuum);
}

TEST_CASE("gamma below 4/3 requires the smallness bound") {
  EosSpec spec = polySpec(1.3);
  CHECK_THROWS_AS(buildEquilibrium(spec, 1.0), DomainError);
  GridSpec g;
  g.rho_center_bound = 0.5;
  CHECK_THROWS_AS(buildEquilibrium(spec, 1.0, g), DomainError);
}
