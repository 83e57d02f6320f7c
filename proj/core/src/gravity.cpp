#include "starosc/gravity.hpp"

#include <cmath>

#include "starosc/errors.hpp"
#include "starosc/grid.hpp"

namespace starosc {

namespace {
constexpr double kPi = 3.14159265358979323846;

// integral of t^p over [lo, hi] with the p = -1 log case
double powInt(double lo, double hi, double p) {
  if (std::abs(p + 1.0) < 1e-14) return std::log(hi / lo);
  return (std::pow(hi, p + 1.0) - std::pow(lo, p + 1.0)) / (p + 1.0);
}

// generalized binomial a(a-1)...(a-i+1)/i!
double genBinom(double a, int i) {
  double v = 1.0;
  for (int k = 0; k < i; ++k) v *= (a - k) / (k + 1.0);
  return v;
}

void solve4(double A[4][4], double b[4][4]) {
  // invert in place onto b (b starts as identity)
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    for (int k = 0; k < 4; ++k) {
      std::swap(A[piv][k], A[c][k]);
      std::swap(b[piv][k], b[c][k]);
    }
    double d = A[c][c];
    for (int k = 0; k < 4; ++k) {
      A[c][k] /= d;
      b[c][k] /= d;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == c) continue;
      double f = A[r][c];
      for (int k = 0; k < 4; ++k) {
        A[r][k] -= f * A[c][k];
        b[r][k] -= f * b[c][k];
      }
    }
  }
}
}  // namespace

GravityOps::GravityOps(std::shared_ptr<const EquilibriumStar> star, int l)
    : star_(std::move(star)), l_(l) {
  if (l_ < 0 || l_ > 24) throw DomainError("GravityOps: degree out of supported range 0..24");
  grid_ = star_->grid();
  const std::size_t n = grid_.size();
  const double R = star_->radius();
  x_.resize(n);
  for (std::size_t i = 0; i < n; ++i) x_[i] = grid_[i] / R;

  // node weights of Int_0^1 . dx from the cubic panels (a = 0)
  std::vector<double> w0(n, 0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    int idx[4];
    double w[4];
    panelWeights(j, 0, x_[j], x_[j + 1], idx, w);
    for (int m = 0; m < 4; ++m) w0[idx[m]] += w[m];
  }
  wdr_.resize(n);
  wr2dr_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    wdr_[i] = w0[i] * R;
    wr2dr_[i] = grid_[i] * grid_[i] * wdr_[i];
  }

  // cumulative quadrature matrices for I1 (weight x^{l+2}) and I2 (x^{1-l})
  Eigen::MatrixXd L1 = Eigen::MatrixXd::Zero(n, n), L2 = Eigen::MatrixXd::Zero(n, n);
  {
    std::vector<std::array<double, 4>> W1(n - 1), W2(n - 1);
    std::vector<std::array<int, 4>> IDX(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) {
      int idx[4];
      double w[4];
      panelWeights(j, l_ + 2, x_[j], x_[j + 1], idx, w);
      for (int m = 0; m < 4; ++m) {
        W1[j][m] = w[m];
        IDX[j][m] = idx[m];
      }
      if (j == 0 && l_ >= 2) {
        // I2 over the first panel is only consumed through x^l I2 -> 0
        for (int m = 0; m < 4; ++m) W2[j][m] = 0.0;
      } else {
        panelWeights(j, 1 - l_, x_[j], x_[j + 1], idx, w);
        for (int m = 0; m < 4; ++m) W2[j][m] = w[m];
      }
    }
    // prefix rows: I1(x_i) integrates panels j < i, I2(x_i) panels j >= i
    Eigen::VectorXd acc1 = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 1; i < n; ++i) {
      for (int m = 0; m < 4; ++m) acc1[IDX[i - 1][m]] += W1[i - 1][m];
      L1.row(i) = acc1.transpose();
    }
    Eigen::VectorXd acc2 = Eigen::VectorXd::Zero(n);
    for (std::size_t i = n - 1; i-- > 0;) {
      for (int m = 0; m < 4; ++m) acc2[IDX[i][m]] += W2[i][m];
      L2.row(i) = acc2.transpose();
    }
  }

  const double scale = R * R / (2.0 * l_ + 1.0);
  H_.resize(n, n);
  Hdot_.resize(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double xi = x_[i];
    double xm = (i == 0) ? 0.0 : std::pow(xi, -(l_ + 1.0));
    double xl = (i == 0) ? (l_ == 0 ? 1.0 : 0.0) : std::pow(xi, static_cast<double>(l_));
    H_.row(i) = scale * (xm * L1.row(i) + xl * L2.row(i));
    Hdot_.row(i) = scale * (l_ * xl * L2.row(i) - (l_ + 1.0) * xm * L1.row(i));
  }
  if (l_ == 0) {
    // H(0) = I2(0) stays finite; the x^{-1} I1 part vanishes there
    H_.row(0) = scale * L2.row(0);
    Hdot_.row(0).setZero();
  }

  // symmetrize in the r^2 dr inner product: assemble M = (VH + H^T V)/2,
  // which is symmetric entry-by-entry in floating point, then H = V^-1 M
  Eigen::MatrixXd M(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double m = 0.5 * (wr2dr_[i] * H_(i, j) + wr2dr_[j] * H_(j, i));
      M(i, j) = m;
      M(j, i) = m;
    }
  for (std::size_t i = 1; i < n; ++i) H_.row(i) = M.row(i) / wr2dr_[i];
  // row 0 keeps its direct quadrature value (zero weight at r = 0)
}

void GravityOps::panelWeights(std::size_t j, int a, double xlo, double xhi, int idx[4],
                              double w[4]) const {
  const std::size_t n = x_.size();
  std::size_t s = (j == 0) ? 0 : ((j + 2 >= n) ? n - 4 : j - 1);
  for (int m = 0; m < 4; ++m) idx[m] = static_cast<int>(s) + m;

  double xj = x_[j];
  double t[4];
  for (int m = 0; m < 4; ++m) t[m] = x_[idx[m]] - xj;
  double tlo = xlo - xj, thi = xhi - xj;

  // Vandermonde inverse on the shifted nodes
  double A[4][4], Ainv[4][4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
  for (int m = 0; m < 4; ++m) {
    A[m][0] = 1.0;
    A[m][1] = t[m];
    A[m][2] = t[m] * t[m];
    A[m][3] = t[m] * t[m] * t[m];
  }
  solve4(A, Ainv);

  // moments m_k = Int t^k (t + xj)^a dt over [tlo, thi]
  double mk[4];
  if (a >= 0) {
    for (int k = 0; k < 4; ++k) {
      double acc = 0.0;
      for (int i = 0; i <= a; ++i) {
        double c = genBinom(a, i) * ((a - i == 0) ? 1.0 : std::pow(xj, a - i));
        acc += c * (std::pow(thi, k + i + 1.0) - std::pow(tlo, k + i + 1.0)) / (k + i + 1.0);
      }
      mk[k] = acc;
    }
  } else if (xj == 0.0) {
    for (int k = 0; k < 4; ++k) mk[k] = powInt(std::max(tlo, 1e-300), thi, k + a);
  } else if (xj >= 3.0 * (x_[j + 1] - xj)) {
    double xa = std::pow(xj, a);
    for (int k = 0; k < 4; ++k) {
      double acc = 0.0;
      for (int i = 0; i < 80; ++i) {
        double term = genBinom(a, i) * std::pow(xj, -static_cast<double>(i)) *
                      (std::pow(thi, k + i + 1.0) - std::pow(tlo, k + i + 1.0)) / (k + i + 1.0);
        acc += term;
        if (std::abs(term) < 1e-18 * std::abs(acc) && i > 4) break;
      }
      mk[k] = xa * acc;
    }
  } else {
    // near-origin panel with negative exponent: 16-pt Gauss-Legendre
    for (int k = 0; k < 4; ++k) {
      auto f = [&](double tt) { return std::pow(tt, k) * std::pow(tt + xj, a); };
      mk[k] = gaussLegendre16(f, tlo, thi);
    }
  }
  for (int m = 0; m < 4; ++m) {
    double acc = 0.0;
    for (int k = 0; k < 4; ++k) acc += Ainv[k][m] * mk[k];
    w[m] = acc;
  }
}

void GravityOps::integralsAt(const std::vector<double>& f, double x, double* I1,
                             double* I2) const {
  const std::size_t n = x_.size();
  double acc1 = 0.0, acc2 = 0.0;
  int idx[4];
  double w[4];
  std::size_t j = lowerIndex(x_, x);
  // full panels below / above, partial panel around x
  for (std::size_t p = 0; p < j; ++p) {
    panelWeights(p, l_ + 2, x_[p], x_[p + 1], idx, w);
    for (int m = 0; m < 4; ++m) acc1 += w[m] * f[idx[m]];
  }
  if (x > x_[j]) {
    panelWeights(j, l_ + 2, x_[j], std::min(x, x_[j + 1]), idx, w);
    for (int m = 0; m < 4; ++m) acc1 += w[m] * f[idx[m]];
  }
  if (x < x_[j + 1]) {
    if (!(j == 0 && l_ >= 2 && x == 0.0)) {
      panelWeights(j, 1 - l_, std::max(x, x_[j]), x_[j + 1], idx, w);
      for (int m = 0; m < 4; ++m) acc2 += w[m] * f[idx[m]];
    }
  }
  for (std::size_t p = j + 1; p + 1 < n; ++p) {
    if (p == 0 && l_ >= 2) continue;
    panelWeights(p, 1 - l_, x_[p], x_[p + 1], idx, w);
    for (int m = 0; m < 4; ++m) acc2 += w[m] * f[idx[m]];
  }
  *I1 = acc1;
  *I2 = acc2;
}

std::vector<double> GravityOps::apply(const std::vector<double>& f) const {
  Eigen::Map<const Eigen::VectorXd> fv(f.data(), f.size());
  Eigen::VectorXd out = H_ * fv;
  return std::vector<double>(out.data(), out.data() + out.size());
}

std::vector<double> GravityOps::applyDot(const std::vector<double>& f) const {
  Eigen::Map<const Eigen::VectorXd> fv(f.data(), f.size());
  Eigen::VectorXd out = Hdot_ * fv;
  return std::vector<double>(out.data(), out.data() + out.size());
}

double GravityOps::evalH(const std::vector<double>& f, double r) const {
  const double R = star_->radius();
  const double scale = R * R / (2.0 * l_ + 1.0);
  double x = r / R;
  if (x >= 1.0) {
    double I1, I2;
    integralsAt(f, 1.0, &I1, &I2);
    return scale * std::pow(x, -(l_ + 1.0)) * I1;
  }
  if (x <= 0.0) {
    if (l_ >= 1) return 0.0;
    double I1, I2;
    integralsAt(f, 0.0, &I1, &I2);
    return scale * I2;
  }
  double I1, I2;
  integralsAt(f, x, &I1, &I2);
  return scale * (std::pow(x, -(l_ + 1.0)) * I1 + std::pow(x, static_cast<double>(l_)) * I2);
}

double GravityOps::evalHdot(const std::vector<double>& f, double r) const {
  const double R = star_->radius();
  const double scale = R * R / (2.0 * l_ + 1.0);
  double x = r / R;
  if (x >= 1.0) {
    double I1, I2;
    integralsAt(f, 1.0, &I1, &I2);
    return -scale * (l_ + 1.0) * std::pow(x, -(l_ + 1.0)) * I1;
  }
  if (x <= 0.0) return 0.0;
  double I1, I2;
  integralsAt(f, x, &I1, &I2);
  return scale * (l_ * std::pow(x, static_cast<double>(l_)) * I2 -
                  (l_ + 1.0) * std::pow(x, -(l_ + 1.0)) * I1);
}

double GravityOps::exteriorC(const std::vector<double>& f) const {
  const double R = star_->radius();
  double I1, I2;
  integralsAt(f, 1.0, &I1, &I2);
  // dimensional constant of H = C r^-(l+1) for r >= R
  return R * R / (2.0 * l_ + 1.0) * I1 * std::pow(R, l_ + 1.0);
}

// ---------------------------------------------------------------------------

DeltaPhiSolver::DeltaPhiSolver(std::shared_ptr<const GravityOps> ops, const ModeAux& aux,
                               std::optional<double> G_override)
    : ops_(std::move(ops)) {
  const auto& grid = ops_->grid();
  const std::size_t n = grid.size();
  fourPiG_ = 4.0 * kPi * (G_override ? *G_override : ops_->star().G());
  Eigen::VectorXd a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    AuxPoint p = aux.at(grid[i]);
    a[i] = p.aCoup;
    b[i] = p.bCoup;
  }
  K_.resize(2 * n, 2 * n);
  K_.topLeftCorner(n, n) = fourPiG_ * ops_->H() * a.asDiagonal();
  K_.topRightCorner(n, n) = fourPiG_ * ops_->H() * b.asDiagonal();
  K_.bottomLeftCorner(n, n) = fourPiG_ * ops_->Hdot() * a.asDiagonal();
  K_.bottomRightCorner(n, n) = fourPiG_ * ops_->Hdot() * b.asDiagonal();
  delta_g_ = K_.cwiseAbs().rowwise().sum().maxCoeff();
  lu_.compute(Eigen::MatrixXd::Identity(2 * n, 2 * n) - K_);
}

DeltaPhiResult DeltaPhiSolver::solve(const std::vector<double>& Y) const {
  const std::size_t n = ops_->grid().size();
  if (Y.size() != n) throw DomainError("DeltaPhiSolver::solve: sample count mismatch");
  Eigen::Map<const Eigen::VectorXd> Yv(Y.data(), n);
  Eigen::VectorXd rhs(2 * n);
  rhs.head(n) = fourPiG_ * (ops_->H() * Yv);
  rhs.tail(n) = fourPiG_ * (ops_->Hdot() * Yv);

  DeltaPhiResult out;
  Eigen::VectorXd zd = lu_.solve(rhs);
  out.residual = (zd - K_ * zd - rhs).cwiseAbs().maxCoeff() /
                 std::max(rhs.cwiseAbs().maxCoeff(), 1e-300);

  if (delta_g_ < 0.98) {
    Eigen::VectorXd z = rhs, zn;
    int it = 0;
    for (; it < 400; ++it) {
      zn = K_ * z + rhs;
      double d = (zn - z).cwiseAbs().maxCoeff();
      z = zn;
      if (d <= 1e-13 * std::max(1e-300, z.cwiseAbs().maxCoeff())) break;
    }
    out.neumann_converged = it < 400;
    out.iterations = it;
    out.agreement = (z - zd).cwiseAbs().maxCoeff() / std::max(zd.cwiseAbs().maxCoeff(), 1e-300);
  } else {
    out.neumann_converged = false;
    out.iterations = 0;
    out.agreement = 0.0;
  }
  out.X.assign(zd.data(), zd.data() + n);
  out.Xdot.assign(zd.data() + n, zd.data() + 2 * n);
  return out;
}

ConditionG checkConditionG(std::shared_ptr<const GravityOps> ops, const ModeAux& aux,
                           std::optional<double> G_override) {
  const auto& grid = ops->grid();
  const std::size_t n = grid.size();
  double fourPiG = 4.0 * kPi * (G_override ? *G_override : ops->star().G());
  Eigen::VectorXd a(n), b(n);
  ConditionG out;
  for (std::size_t i = 0; i < n; ++i) {
    AuxPoint p = aux.at(grid[i]);
    a[i] = p.aCoup;
    b[i] = p.bCoup;
    out.sup_a = std::max(out.sup_a, std::abs(fourPiG * p.aCoup));
    out.sup_b = std::max(out.sup_b, std::abs(fourPiG * p.bCoup));
  }
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0, rowD = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row += std::abs(fourPiG * ops->H()(i, j) * a[j]) + std::abs(fourPiG * ops->H()(i, j) * b[j]);
      rowD += std::abs(fourPiG * ops->Hdot()(i, j) * a[j]) +
              std::abs(fourPiG * ops->Hdot()(i, j) * b[j]);
    }
    out.contraction = std::max(out.contraction, std::max(row, rowD));
  }
  return out;
}

}  // namespace starosc
