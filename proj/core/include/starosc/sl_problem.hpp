#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

namespace starosc {

// Coefficients of  -(1/c) d/dr ( a dpsi/dr ) + q00 psi = Lambda psi
// on (r_lo, r_hi), weighted by c dr. All callables must be smooth on the
// open interval; first and second derivatives are supplied analytically.
struct SLCoeffs {
  std::function<double(double)> a, da, d2a;
  std::function<double(double)> c, dc, d2c;
  std::function<double(double)> q00;
  double r_lo = 0.0, r_hi = 1.0;
  // c/a ~ k (r_hi - r)^{exp_hi} near r_hi (0 or -1 supported)
  double exp_hi = 0.0;
};

// Normal-form change of variables x = Int sqrt(c/a) dr, y = (a c)^{1/4} psi,
//   -y'' + q(x) y = Lambda y,  q = q00 + (a/c) Q / 4,
//   Q = (log ac)'' - ((log ac)')^2 / 4 + (log a)' (log ac)'.
class LiouvilleTransform {
public:
  LiouvilleTransform(SLCoeffs coeffs, std::size_t table_n = 2048);

  double xPlus() const { return x_plus_; }
  double xOfR(double r) const;
  double rOfX(double x) const;
  double qAtR(double r) const;
  double qAtX(double x) const { return qAtR(rOfX(x)); }
  // y(x) from psi(r) and back
  double yFromPsi(double r, double psi) const;
  double psiFromY(double r, double y) const;
  const SLCoeffs& coeffs() const { return co_; }

private:
  SLCoeffs co_;
  std::vector<double> rt_, xt_;  // monotone table x(r)
  double x_plus_ = 0.0;
  double sqrtCoverA(double r) const;
  double panelIntegral(double ra, double rb) const;
};

// Assembled singular eigenproblem on (0, x_plus): inverse-square walls of
// declared strength at both ends plus an optional compact perturbation.
// The perturbation builder receives the solver mesh and must return F with
// (fhat y)(x_i) = sum_j F_ij y_j for P1 hat-basis samples y_j.
struct LiouvilleProblem {
  std::shared_ptr<const LiouvilleTransform> transform;
  // direct potential; used when no transform backs the problem
  std::function<double(double)> q_direct;
  double x_plus = 0.0;
  double K_lo = 0.0, K_hi = 0.0;  // wall strengths; limit point needs > 3/4
  double K0 = 0.0;                // recorded weight shift q~ = q + K0 >= 1 + ...
  std::function<Eigen::MatrixXd(const std::vector<double>&)> perturbation;

  bool perturbed() const { return static_cast<bool>(perturbation); }
  double qAt(double x) const { return q_direct ? q_direct(x) : transform->qAtX(x); }
  // indicial decay exponent (1 + sqrt(1+4K))/2 at each wall; a vanishing
  // strength marks a regular Dirichlet end (y ~ distance)
  double sLo() const { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * K_lo)); }
  double sHi() const { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * K_hi)); }
};

// Computes the recorded shift K0 = max(0, 1 - min(q - walls)) over a probe
// mesh and validates the wall strengths.
double computeK0(const LiouvilleProblem& p, std::size_t probe_n = 512);

}  // namespace starosc
