#pragma once

#include <Eigen/Dense>
#include <optional>
#include <memory>
#include <vector>

#include "starosc/equilibrium.hpp"
#include "starosc/profiles.hpp"

namespace starosc {

// Sampled radial function on a star grid with its declared endpoint classes:
// behaves like r^{p0} near the center and (R-r)^{pR} near the surface.
struct RadialFunction {
  std::vector<double> values;
  double p0 = 0.0;
  double pR = 0.0;
};

// Quadrature realizations of the reduced Poisson kernels
//   (H_l f)(r) = 1/(2l+1) [ r^l Int_r^R f s^{1-l} ds + r^-(l+1) Int_0^r f s^{l+2} ds ]
// and the closed-form radial derivative r d(H_l f)/dr.
// Sample-to-sample maps are cubic-interpolation exact-moment panel sums; the
// H matrix is symmetrized in the r^2 dr inner product.
class GravityOps {
public:
  GravityOps(std::shared_ptr<const EquilibriumStar> star, int l);

  int l() const { return l_; }
  const EquilibriumStar& star() const { return *star_; }
  const std::vector<double>& grid() const { return grid_; }
  // Node weights of Int . dr and of Int . r^2 dr on the grid.
  const std::vector<double>& weightsDr() const { return wdr_; }
  const std::vector<double>& weightsR2Dr() const { return wr2dr_; }

  const Eigen::MatrixXd& H() const { return H_; }
  const Eigen::MatrixXd& Hdot() const { return Hdot_; }

  std::vector<double> apply(const std::vector<double>& f) const;
  std::vector<double> applyDot(const std::vector<double>& f) const;

  // Pointwise evaluation at any r >= 0 (exterior decay law for r >= R).
  double evalH(const std::vector<double>& f, double r) const;
  double evalHdot(const std::vector<double>& f, double r) const;
  // The exterior multipole constant: H = C r^-(l+1) (l >= 1), C/r (l = 0).
  double exteriorC(const std::vector<double>& f) const;

private:
  std::shared_ptr<const EquilibriumStar> star_;
  int l_;
  std::vector<double> grid_;   // radii
  std::vector<double> x_;     // radii / R
  std::vector<double> wdr_, wr2dr_;
  Eigen::MatrixXd H_, Hdot_;

  // weights of Int_{xlo}^{xhi} (cubic interpolant) x^a dx over panel j
  void panelWeights(std::size_t j, int a, double xlo, double xhi, int idx[4], double w[4]) const;
  // cumulative I1(x)/I2(x) contributions for arbitrary x
  void integralsAt(const std::vector<double>& f, double x, double* I1, double* I2) const;
};

struct DeltaPhiResult {
  std::vector<double> X, Xdot;  // delta-Phi-check and r d(delta-Phi-check)/dr
  bool neumann_converged = false;
  int iterations = 0;
  double agreement = 0.0;  // direct vs Neumann relative gap
  double residual = 0.0;   // back-substitution residual of the 2x2 system
};

// Coupled solve for the self-gravity pair per the aux coupling coefficients;
// the same operator also backs the compact perturbation of the eigenproblem.
class DeltaPhiSolver {
public:
  // G_override replaces the 4 pi G prefactor of the coupling (the background
  // keeps the star's constant); G_override = 0 switches the perturbation off.
  DeltaPhiSolver(std::shared_ptr<const GravityOps> ops, const ModeAux& aux,
                 std::optional<double> G_override = {});

  const GravityOps& ops() const { return *ops_; }
  double deltaG() const { return delta_g_; }
  bool contractive() const { return delta_g_ < 1.0; }

  DeltaPhiResult solve(const std::vector<double>& Y) const;

private:
  std::shared_ptr<const GravityOps> ops_;
  double fourPiG_;
  double delta_g_;
  Eigen::MatrixXd K_;  // 4 pi G [[H a, H b], [Hd a, Hd b]]
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

// The (G)-condition report: the pointwise suprema of the two coupling
// brackets |4 pi G a| and |4 pi G b| together with the assembled-operator
// contraction factor (infinity norm) the Neumann iteration actually sees.
struct ConditionG {
  double sup_a = 0.0;
  double sup_b = 0.0;
  double contraction = 0.0;
  double value() const { return contraction; }
};
ConditionG checkConditionG(std::shared_ptr<const GravityOps> ops, const ModeAux& aux,
                           std::optional<double> G_override = {});

}  // namespace starosc
