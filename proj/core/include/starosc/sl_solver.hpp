#pragma once

#include <optional>

#include "starosc/sl_problem.hpp"

namespace starosc {

struct SLOptions {
  int mesh_n = 1793;          // FEM mesh nodes at the finest truncation level
  double x_eps_frac = 1e-4;   // Dirichlet truncation offset over x_plus
  double agree_tol = 1e-6;    // matrix-vs-shooting agreement requirement
  bool with_shooting = true;  // node-counting refinement (unperturbed only)
  bool richardson = true;     // extrapolate over {eps, eps/2, eps/4}
  double shoot_cut_frac = 5e-3;  // shooting launch offset over x_plus
  double shoot_tol = 1e-12;
  double gap_rel = 1e-6;  // near-degenerate flag threshold
};

struct SLEigen {
  int index = 0;  // 1-based; eigenfunction has index-1 interior nodes
  double value = 0.0;
  double matrix_value = 0.0;
  std::optional<double> shoot_value;
  int nodes = -1;
  bool agreement_ok = true;
  bool gap_flagged = false;
};

struct SpectrumSlice {
  std::vector<SLEigen> eigs;
  std::vector<double> mesh;                 // finest FEM mesh
  std::vector<Eigen::VectorXd> vectors;     // eigenvectors on the mesh
  double x_eps = 0.0;

  double value(int n) const { return eigs.at(n - 1).value; }
};

// First n_max eigenvalues by the symmetric Galerkin matrix on a graded mesh
// (Richardson-extrapolated over the truncation offset), refined and
// cross-checked by node-counting Prufer shooting when no perturbation is
// attached. Throws FormulationMismatch when the two paths disagree beyond
// opts.agree_tol (after flagging).
SpectrumSlice slEigenvalues(const LiouvilleProblem& p, int n_max, const SLOptions& opts = {});

struct SLFunction {
  std::vector<double> x;
  std::vector<double> y;   // normalized, ||y||_{L2(dx)} = 1
  std::vector<double> dy;  // derivative samples
  double lambda = 0.0;
  int nodes = 0;
  double residual = 0.0;  // finite-difference back-substitution residual
  bool ill_conditioned = false;
};

// Eigenfunction for the n-th eigenvalue (1-based). Unperturbed problems are
// re-integrated by shooting at the refined eigenvalue; perturbed problems are
// polished by function-space inverse iteration from the matrix eigenvector.
SLFunction slEigenfunction(const LiouvilleProblem& p, const SpectrumSlice& slice, int n,
                           const SLOptions& opts = {});

// Inhomogeneous two-point solve (-d^2/dx^2 + q - Lambda) y = rhs with
// recessive-decay boundary behavior, by variation of parameters on shooting
// solutions. Used by the eigenfunction polish and exposed for reuse.
void solveInhomogeneous(const LiouvilleProblem& p, double lambda,
                        const std::function<double(double)>& rhs, const std::vector<double>& x_out,
                        std::vector<double>* y, std::vector<double>* dy,
                        const SLOptions& opts = {});

}  // namespace starosc
