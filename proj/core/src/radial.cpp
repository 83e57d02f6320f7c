#include "starosc/radial.hpp"

#include <cmath>

#include "starosc/errors.hpp"

namespace starosc {

namespace {
constexpr double kPi = 3.14159265358979323846;

double q00FirstLineSafe(const EquilibriumStar& star, const PointState& p) {
  // - gamma/(gamma-1) e^{S/c_v} [ eta'' + (gamma-1)/(gamma c_v) Sigma'(eta) eta'^2 ]
  const double gamma = star.gamma(), cv = star.eosSpec().c_v;
  double es = std::exp(p.S / cv);
  double sp = star.eosSpec().sigma.deriv(p.omega);
  return -gamma / (gamma - 1.0) * es *
         (p.d2omega + (gamma - 1.0) / (gamma * cv) * sp * p.domega * p.domega);
}

double q00Rest(const EquilibriumStar& star, const PointState& p) {
  const double gamma = star.gamma();
  double drhoOverR = p.r > 0.0 ? p.drho / p.r : p.d2rho;
  double AoverR = p.r > 0.0 ? p.A / p.r : p.dA;
  double t4 = -p.c2 * drhoOverR / p.rho;
  double t5 = 3.0 * (gamma - 1.0) * p.gOverR;
  double t6 = p.c2 * (AoverR + p.dA) - gamma * p.A * p.g;
  double t7 = -4.0 * kPi * star.G() * p.rho;
  return t4 + t5 + t6 + t7;
}
}  // namespace

double radialQ00(const EquilibriumStar& star, double r) {
  PointState p = star.state(r);
  if (p.rho <= 0.0) throw DomainError("radialQ00: vacuum point");
  return q00FirstLineSafe(star, p) + q00Rest(star, p);
}

double radialQ00Naive(const EquilibriumStar& star, double r) {
  PointState p = star.state(r);
  if (p.rho <= 0.0) throw DomainError("radialQ00Naive: vacuum point");
  const double gamma = star.gamma();
  double t1 = -gamma * p.P / (p.rho * p.rho) * p.d2rho;
  double t2 = -(gamma - 1.0) / (p.rho * p.rho) * p.dP * p.drho;
  double t3 = gamma * p.P / (p.rho * p.rho * p.rho) * p.drho * p.drho;
  return t1 + t2 + t3 + q00Rest(star, p);
}

LiouvilleProblem radialProblem(const EquilibriumStar& star) {
  const double gamma = star.gamma();
  const double nu = star.nuIndex();
  SLCoeffs co;
  co.r_lo = 0.0;
  co.r_hi = star.radius();
  co.exp_hi = -1.0;  // c/a = rho/(gamma P) ~ (R - r)^{-1}
  // hold the star by value in the closures; stars are cheap shared state
  auto s = std::make_shared<EquilibriumStar>(star);
  co.a = [s, gamma](double r) {
    PointState p = s->state(r);
    return gamma * r * r * r * r * p.P;
  };
  co.da = [s, gamma](double r) {
    PointState p = s->state(r);
    return gamma * (4.0 * r * r * r * p.P + r * r * r * r * p.dP);
  };
  co.d2a = [s, gamma](double r) {
    PointState p = s->state(r);
    return gamma * (12.0 * r * r * p.P + 8.0 * r * r * r * p.dP + r * r * r * r * p.d2P);
  };
  co.c = [s](double r) {
    PointState p = s->state(r);
    return r * r * r * r * p.rho;
  };
  co.dc = [s](double r) {
    PointState p = s->state(r);
    return 4.0 * r * r * r * p.rho + r * r * r * r * p.drho;
  };
  co.d2c = [s](double r) {
    PointState p = s->state(r);
    return 12.0 * r * r * p.rho + 8.0 * r * r * r * p.drho + r * r * r * r * p.d2rho;
  };
  co.q00 = [s](double r) { return radialQ00(*s, r); };

  LiouvilleProblem prob;
  prob.transform = std::make_shared<LiouvilleTransform>(std::move(co));
  prob.x_plus = prob.transform->xPlus();
  prob.K_lo = 2.0;
  prob.K_hi = (gamma + 1.0) * (3.0 - gamma) / (4.0 * (gamma - 1.0) * (gamma - 1.0));
  // equivalently (2 nu - 1)(2 nu + 1)/4 with nu = 1/(gamma-1)
  if (std::abs(prob.K_hi - (2.0 * nu - 1.0) * (2.0 * nu + 1.0) / 4.0) > 1e-12 * prob.K_hi)
    throw NumericError("radialProblem: inconsistent surface wall strength");
  prob.K0 = computeK0(prob);
  return prob;
}

RadialSpectrum radialSpectrum(const EquilibriumStar& star, int n_max, const SLOptions& opts) {
  if (!star.admissibility().pass())
    throw DomainError("radialSpectrum: star fails the admissibility checks");
  RadialSpectrum out;
  LiouvilleProblem prob = radialProblem(star);
  out.transform = prob.transform;
  out.slice = slEigenvalues(prob, n_max, opts);
  out.modes.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    RadialMode m;
    m.n = n;
    m.lambda = out.slice.value(n);
    m.nodes = out.slice.eigs[n - 1].nodes;
    m.agreement_ok = out.slice.eigs[n - 1].agreement_ok;
    out.modes.push_back(m);
  }
  return out;
}

RadialModeFunction radialEigenfunction(const EquilibriumStar& star, const RadialSpectrum& spec,
                                       int n, const SLOptions& opts) {
  LiouvilleProblem prob = radialProblem(star);
  SLFunction y = slEigenfunction(prob, spec.slice, n, opts);
  RadialModeFunction out;
  out.lambda = y.lambda;
  out.nodes = y.nodes;
  out.residual = y.residual;
  out.x = y.x;
  out.y = y.y;
  out.r.resize(y.x.size());
  out.psi.resize(y.x.size());
  out.V.resize(y.x.size());
  for (std::size_t i = 0; i < y.x.size(); ++i) {
    double r = prob.transform->rOfX(y.x[i]);
    out.r[i] = r;
    out.psi[i] = prob.transform->psiFromY(r, y.y[i]);
    out.V[i] = r * out.psi[i];
  }
  return out;
}

}  // namespace starosc
