#include <doctest.h>

#include <cmath>
#include <memory>

#include "starosc/profiles.hpp"

using namespace starosc;

namespace {
std::shared_ptr<const EquilibriumStar> referenceStar(double k = 0.05) {
  EosSpec s;
  s.gamma = 1.5;
  s.c_v = 1.0;
  s.grav_const = 1.0;
  s.sigma = SigmaLaw::polynomial({0.0, -k});
  return std::make_shared<EquilibriumStar>(buildEquilibrium(s, 1.0));
}
}  // namespace

TEST_CASE("background identities") {
  auto star = referenceStar();
  const double R = star->radius();
  // g = G <rho> r pointwise, <rho>(0) continuous, <rho> decreasing
  PointState c = star->state(0.0);
  CHECK(c.meanRho == doctest::Approx(4.0 * M_PI / 3.0 * 1.0).epsilon(1e-10));
  double prev = c.meanRho;
  for (double fr : {0.2, 0.4, 0.6, 0.8, 1.0}) {
    PointState p = star->state(fr * R);
    CHECK(p.g == doctest::Approx(star->G() * p.meanRho * p.r).epsilon(1e-12));
    CHECK(p.meanRho < prev);
    prev = p.meanRho;
  }
  // g/r -> g_O = P_O1 / rho_O at the center
  CHECK(c.gOverR == doctest::Approx(star->limits().g_O).epsilon(1e-10));
  // <rho>(R) R^3 equals the total mass over 4 pi / ... : M = <rho>(R) R^3
  PointState s = star->state(R);
  CHECK(s.meanRho * R * R * R == doctest::Approx(star->limits().mass).epsilon(1e-10));

  // N^2 = -A dPhi/dr pointwise and N2 >= delta r^2 for the decreasing Sigma
  for (double fr : {0.1, 0.5, 0.9}) {
    PointState p = star->state(fr * R);
    CHECK(p.N2 == doctest::Approx(-p.A * p.g).epsilon(1e-10));
    CHECK(p.N2 > 0.0);
  }
}

TEST_CASE("scale heights: power law and composites") {
  auto star = referenceStar();
  const double R = star->radius();
  double r = 0.4 * R;
  PointState p = star->state(r);
  // Q = r^k -> 1/H = -k/r
  FieldPower rk[] = {{Field::Radius, 3.0}};
  CHECK(invScaleHeight(p, rk) == doctest::Approx(-3.0 / r).epsilon(1e-12));
  // 1/H[rho] near the surface approaches nu/(R-r)
  double d = 1e-4 * R;
  PointState ps = star->state(R - d);
  FieldPower rho1[] = {{Field::Rho, 1.0}};
  CHECK(invScaleHeight(ps, rho1) == doctest::Approx(star->nuIndex() / d).epsilon(2e-3));
  // Q = rho g^2 / r^4 near the center behaves like +2/r (1 + O(r^2));
  // the sign follows from 1/H[r^k] = -k/r
  double rc = 1e-3 * R;
  PointState pc = star->state(rc);
  FieldPower q[] = {{Field::Rho, 1.0}, {Field::Gravity, 2.0}, {Field::Radius, -4.0}};
  CHECK(invScaleHeight(pc, q) == doctest::Approx(2.0 / rc).epsilon(1e-4));
  // composite = sum of components
  double direct = invScaleHeight(p, q);
  FieldPower qr[] = {{Field::Rho, 1.0}};
  FieldPower qg[] = {{Field::Gravity, 2.0}};
  FieldPower qx[] = {{Field::Radius, -4.0}};
  CHECK(direct ==
        doctest::Approx(invScaleHeight(p, qr) + invScaleHeight(p, qg) + invScaleHeight(p, qx))
            .epsilon(1e-13));
}

TEST_CASE("gough factors collapse at lambda = 0") {
  auto star = referenceStar();
  GoughAux aux = goughFactors(star, 2, 0.0);
  const double R = star->radius();
  for (double fr : {0.15, 0.5, 0.85}) {
    AuxPoint a = aux.at(fr * R);
    PointState p = star->state(fr * R);
    CHECK(a.E == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(a.frakN2 == doctest::Approx(p.N2).epsilon(1e-12));
    // W = rho^(1/2) g / r^2
    CHECK(a.W == doctest::Approx(std::sqrt(p.rho) * p.g / (p.r * p.r)).epsilon(1e-12));
  }
}

TEST_CASE("E bounds and the linear shrink of max|E-1|") {
  auto star = referenceStar();
  int l = 2;
  double lam0 = lambda0Default(star, l, 0.1);
  CHECK(lam0 > 0.0);
  CHECK(GoughAux(star, l, lam0).minE() >= 0.9 - 1e-9);
  // max |E-1| at lam0, lam0/2, lam0/4 shrinks linearly
  auto maxDev = [&](double lam) {
    GoughAux aux(star, l, lam);
    double m = 0.0;
    for (double r : star->grid()) {
      double E, dE, d2E, d3E;
      aux.eChain(star->state(r), &E, &dE, &d2E, &d3E);
      m = std::max(m, std::abs(E - 1.0));
    }
    return m;
  };
  double m1 = maxDev(lam0), m2 = maxDev(lam0 / 2), m4 = maxDev(lam0 / 4);
  CHECK(m2 == doctest::Approx(m1 / 2).epsilon(0.2));
  CHECK(m4 == doctest::Approx(m2 / 2).epsilon(0.2));
}

TEST_CASE("fraky identity lambda/g + 1/H[gE/r^2] + (E-1) Sl2 g/(c^2 lambda) = 1/H[E]") {
  auto star = referenceStar();
  int l = 2;
  double lam = 0.5 * lambda0Default(star, l, 0.1);
  GoughAux aux(star, l, lam);
  const double R = star->radius();
  for (double fr : {0.2, 0.5, 0.8}) {
    double r = fr * R;
    PointState p = star->state(r);
    AuxPoint a = aux.at(r);
    // 1/H[gE/r^2] = 1/H[g] + 1/H[E] + 2/r
    double invHg = -p.dg / p.g;
    double lhs = lam / p.g + (invHg + a.invHE + 2.0 / r) +
                 (a.E - 1.0) * a.Sl2 * p.g / (p.c2 * lam);
    CHECK(lhs == doctest::Approx(a.invHE).epsilon(1e-8));
  }
}

TEST_CASE("E matches the A21 cross-evaluation") {
  // E(r; lambda) = A21 lambda r^2 / (l(l+1) rho g^2) with
  // A21 = rho [ (l(l+1)/lambda)(g/r)^2 - g (1/H[g] + 2/r) - lambda ]
  auto star = referenceStar();
  int l = 3;
  double lam = 0.5 * lambda0Default(star, l, 0.1);
  GoughAux aux(star, l, lam);
  double ll1 = l * (l + 1.0);
  for (double fr : {0.25, 0.6, 0.9}) {
    double r = fr * star->radius();
    PointState p = star->state(r);
    AuxPoint a = aux.at(r);
    double invHg = -p.dg / p.g;
    double A21 = p.rho * (ll1 / lam * p.gOverR * p.gOverR - p.g * (invHg + 2.0 / r) - lam);
    double Eref = A21 * lam * r * r / (ll1 * p.rho * p.g * p.g);
    CHECK(a.E == doctest::Approx(Eref).epsilon(1e-10));
  }
}

TEST_CASE("p-mode factors") {
  auto star = referenceStar();
  int l = 2;
  PModeAux id = pmodeFactors(star, l, 0.0);
  for (double fr : {0.2, 0.7}) {
    AuxPoint a = id.at(fr * star->radius());
    CHECK(a.E == doctest::Approx(1.0).epsilon(1e-14));
  }
  double mu0 = mu0Default(star, l, 0.1);
  CHECK(mu0 > 0.0);
  CHECK(PModeAux(star, l, mu0).minE() >= 0.9 - 1e-9);
  // kappa^p near the surface ~ 1/(c_R^2 (R-r))
  PModeAux aux(star, l, 0.5 * mu0);
  double d = 1e-5 * star->radius();
  AuxPoint a = aux.at(star->radius() - d);
  CHECK(a.kappa == doctest::Approx(1.0 / (star->limits().c_R2 * d)).epsilon(2e-3));
  // |frakN2| bounded on the grid
  double m = 0.0;
  for (double r : star->grid()) m = std::max(m, std::abs(aux.at(r).frakN2));
  CHECK(std::isfinite(m));
  // x_+^p = Int 1/c dr finite (crude Riemann bound on the clustered grid)
  double xp = 0.0;
  const auto& g = star->grid();
  for (std::size_t i = 1; i + 1 < g.size(); ++i)
    xp += (g[i + 1] - g[i]) / std::sqrt(star->state(g[i]).c2);
  CHECK(std::isfinite(xp));
  CHECK(xp > 0.0);
}

TEST_CASE("aux derivative chains match finite differences") {
  auto star = referenceStar();
  int l = 2;
  double lam = 0.5 * lambda0Default(star, l, 0.1);
  GoughAux aux(star, l, lam);
  double r = 0.5 * star->radius(), h = 1e-5 * star->radius();
  AuxPoint a0 = aux.at(r);
  AuxPoint ap = aux.at(r + h), am = aux.at(r - h);
  CHECK((ap.E - am.E) / (2 * h) == doctest::Approx(a0.dE).epsilon(1e-7));
  CHECK((ap.dE - am.dE) / (2 * h) == doctest::Approx(a0.d2E).epsilon(1e-6));
  CHECK((ap.d2E - am.d2E) / (2 * h) == doctest::Approx(a0.d3E).epsilon(1e-5));
  CHECK((ap.frakN2 - am.frakN2) / (2 * h) == doctest::Approx(a0.dfrakN2).epsilon(1e-7));
  CHECK((ap.kappa - am.kappa) / (2 * h) == doctest::Approx(a0.dkappa).epsilon(1e-7));
  CHECK((ap.dkappa - am.dkappa) / (2 * h) == doctest::Approx(a0.d2kappa).epsilon(1e-6));
  CHECK((ap.Acoef - am.Acoef) / (2 * h) == doctest::Approx(a0.dAcoef).epsilon(1e-6));
  // invHW = Acoef/2 by the W construction; check against the W samples
  double dlogW = (std::log(ap.W) - std::log(am.W)) / (2 * h);
  CHECK(-dlogW == doctest::Approx(a0.invHW).epsilon(1e-6));

  PModeAux paux(star, l, 0.3 * mu0Default(star, l, 0.1));
  AuxPoint b0 = paux.at(r);
  AuxPoint bp = paux.at(r + h), bm = paux.at(r - h);
  CHECK((bp.E - bm.E) / (2 * h) == doctest::Approx(b0.dE).epsilon(1e-7));
  CHECK((bp.frakN2 - bm.frakN2) / (2 * h) == doctest::Approx(b0.dfrakN2).epsilon(1e-6));
  CHECK((bp.Acoef - bm.Acoef) / (2 * h) == doctest::Approx(b0.dAcoef).epsilon(1e-6));
  double dlogWp = (std::log(bp.W) - std::log(bm.W)) / (2 * h);
  CHECK(-dlogWp == doctest::Approx(b0.invHW).epsilon(1e-6));
}
