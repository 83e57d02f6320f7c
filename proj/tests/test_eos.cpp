#include <doctest.h>

#include <cmath>

#include "starosc/eos.hpp"
#include "starosc/grid.hpp"

using namespace starosc;

TEST_CASE("pressure closed forms") {
  EosSpec spec;
  spec.gamma = 1.5;
  spec.c_v = 1.0;
  Eos eos(spec, 4.0);
  // Sigma == 0: P = rho^gamma
  CHECK(eos.pressure(4.0) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(eos.pressure(0.0) == 0.0);
  CHECK_THROWS_AS(eos.pressure(-1.0), DomainError);

  // Sigma(w) = -w, c_v = 1, rho = 1: P = e^{-1}
  EosSpec s2 = spec;
  s2.sigma = SigmaLaw::polynomial({0.0, -1.0});
  Eos eos2(s2, 2.0);
  CHECK(eos2.pressure(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  // numeric oracle for the same closed form
  double w = std::pow(1.0, 0.5);
  double oracle = std::pow(1.0, 1.5) * std::exp(s2.sigma.value(w) / s2.c_v);
  CHECK(eos2.pressure(1.0) == doctest::Approx(oracle).epsilon(1e-14));
}

TEST_CASE("u and its inverse") {
  EosSpec spec;
  spec.gamma = 1.5;
  Eos eos(spec, 2.0);
  // constant entropy: u = gamma/(gamma-1) rho^{gamma-1}
  CHECK(eos.uOfRho(1.0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(eos.rhoOfU(-1.0) == 0.0);
  double rho = 0.37;
  CHECK(eos.rhoOfU(eos.uOfRho(rho)) == doctest::Approx(rho).epsilon(1e-10));

  // symbolic-integration oracle for a nontrivial entropy law
  EosSpec s2 = spec;
  s2.sigma = SigmaLaw::polynomial({0.1, -0.4, 0.05});
  Eos eos2(s2, 2.0);
  double r0 = 0.9;
  // brute-force route: quadrature of Df^P/rho after substituting
  // t = rho^{gamma-1}, which makes the integrand smooth at zero
  double nu = 1.0 / (s2.gamma - 1.0);
  auto integrand = [&](double t) {
    double rr = std::pow(t, nu);
    return eos2.dPressureDRho(rr) / rr * nu * std::pow(t, nu - 1.0);
  };
  double brute = integrateAdaptive(integrand, 0.0, std::pow(r0, s2.gamma - 1.0), 1e-13);
  CHECK(eos2.uOfRho(r0) == doctest::Approx(brute).epsilon(1e-9));
  CHECK(eos2.rhoOfU(eos2.uOfRho(r0)) == doctest::Approx(r0).epsilon(1e-10));
}

TEST_CASE("ellipticity guard") {
  EosSpec spec;
  spec.gamma = 1.5;
  // strongly decreasing Sigma violates gamma + (gamma-1)/c_v w Sigma' > 0
  spec.sigma = SigmaLaw::polynomial({0.0, -10.0});
  Eos eos(spec, 2.0);
  double worst = 0.0;
  CHECK_FALSE(eos.elliptic(2.0, &worst));
  CHECK(worst < 0.0);
}

TEST_CASE("series of u about omega0 matches finite differences") {
  EosSpec spec;
  spec.gamma = 1.4;
  spec.c_v = 2.0;
  spec.sigma = SigmaLaw::polynomial({0.2, -0.3, 0.07});
  Eos eos(spec, 2.0);
  double w0 = 0.5;
  Series u = eos.uSeriesAtOmega(w0, 8);
  CHECK(u[0] == doctest::Approx(eos.uOfOmega(w0)).epsilon(1e-12));
  CHECK(u[1] == doctest::Approx(eos.J(w0)).epsilon(1e-12));
  CHECK(2.0 * u[2] == doctest::Approx(eos.dJ(w0)).epsilon(1e-10));
  CHECK(6.0 * u[3] == doctest::Approx(eos.d2J(w0)).epsilon(1e-8));
  // inverse series round trip
  Series dw = eos.omegaDeltaSeriesInU(w0, 8);
  double eps = 0.01;
  double u_val = eos.uOfOmega(w0 + eps);
  CHECK(dw.eval(u_val - u[0]) == doctest::Approx(eps).epsilon(1e-10));
}

TEST_CASE("table sigma approximates its polynomial source") {
  std::vector<double> w, s;
  for (int i = 0; i <= 200; ++i) {
    double x = 2.0 * i / 200.0;
    w.push_back(x);
    s.push_back(0.3 - 0.5 * x + 0.02 * x * x);
  }
  SigmaLaw law = SigmaLaw::table(w, s);
  CHECK(law.value(0.777) == doctest::Approx(0.3 - 0.5 * 0.777 + 0.02 * 0.777 * 0.777).epsilon(1e-8));
  CHECK(law.deriv(0.777) == doctest::Approx(-0.5 + 0.04 * 0.777).epsilon(1e-5));
}

TEST_CASE("rational nu approximation") {
  Rational r = rationalApprox(2.0, 64);
  CHECK(r.num == 2);
  CHECK(r.den == 1);
  CHECK(r.exact);
  Rational r2 = rationalApprox(1.0 / (1.8 - 1.0), 64);  // nu = 1.25
  CHECK(r2.num == 5);
  CHECK(r2.den == 4);
  Rational r3 = rationalApprox(M_PI, 64);
  CHECK_FALSE(r3.exact);
}
