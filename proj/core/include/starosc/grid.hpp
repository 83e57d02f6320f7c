#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "starosc/errors.hpp"

namespace starosc {

// Cosine-clustered nodes on [0, L]: dense near both endpoints.
inline std::vector<double> clusteredGrid(double L, std::size_t n) {
  std::vector<double> r(n);
  for (std::size_t j = 0; j < n; ++j) {
    double t = static_cast<double>(j) / static_cast<double>(n - 1);
    r[j] = 0.5 * L * (1.0 - std::cos(M_PI * t));
  }
  r.front() = 0.0;
  r.back() = L;
  return r;
}

inline std::size_t lowerIndex(const std::vector<double>& x, double v) {
  auto it = std::upper_bound(x.begin(), x.end(), v);
  std::size_t i = static_cast<std::size_t>(it - x.begin());
  if (i == 0) return 0;
  if (i >= x.size()) return x.size() - 2;
  return i - 1;
}

inline double interpLinear(const std::vector<double>& x, const std::vector<double>& y, double v) {
  if (v <= x.front()) return y.front();
  if (v >= x.back()) return y.back();
  std::size_t i = lowerIndex(x, v);
  double t = (v - x[i]) / (x[i + 1] - x[i]);
  return (1.0 - t) * y[i] + t * y[i + 1];
}

// Trapezoid weights for an arbitrary node set.
inline std::vector<double> trapezoidWeights(const std::vector<double>& x) {
  std::vector<double> w(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    double h = x[i + 1] - x[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) s += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return s;
}

namespace detail {
// Abscissae/weights for 16-point Gauss-Legendre (positive half).
inline constexpr double kGL16Nodes[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
inline constexpr double kGL16Weights[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};
}  // namespace detail

inline double gaussLegendre16(const std::function<double(double)>& f, double a, double b) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 8; ++i) {
    double dx = half * detail::kGL16Nodes[i];
    s += detail::kGL16Weights[i] * (f(mid - dx) + f(mid + dx));
  }
  return s * half;
}

// Adaptive GL16 with interval bisection to a relative tolerance.
inline double integrateAdaptive(const std::function<double(double)>& f, double a, double b,
                                double relTol = 1e-12, int maxDepth = 28) {
  struct Rec {
    static double go(const std::function<double(double)>& f, double a, double b, double whole,
                     double scale, double relTol, int depth) {
      double m = 0.5 * (a + b);
      double left = gaussLegendre16(f, a, m);
      double right = gaussLegendre16(f, m, b);
      double err = std::abs(left + right - whole);
      if (depth <= 0 || err <= relTol * std::max(scale, std::abs(left + right)))
        return left + right;
      return go(f, a, m, left, scale, relTol, depth - 1) +
             go(f, m, b, right, scale, relTol, depth - 1);
    }
  };
  double whole = gaussLegendre16(f, a, b);
  return Rec::go(f, a, b, whole, std::abs(whole), relTol, maxDepth);
}

// Least-squares fit of y against the given powers of x (normal equations
// with column scaling); returns one coefficient per entry of `powers`.
inline std::vector<double> polyFit(const std::vector<double>& x, const std::vector<double>& y,
                                   const std::vector<double>& powers) {
  const std::size_t m = powers.size(), n = x.size();
  if (n < m) throw NumericError("polyFit: not enough samples");
  std::vector<std::vector<double>> A(n, std::vector<double>(m));
  std::vector<double> scale(m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      A[i][j] = std::pow(x[i], powers[j]);
      scale[j] = std::max(scale[j], std::abs(A[i][j]));
    }
  for (auto& s : scale)
    if (s == 0.0) s = 1.0;
  // Normal equations M c = b on scaled columns.
  std::vector<std::vector<double>> M(m, std::vector<double>(m, 0.0));
  std::vector<double> b(m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double aij = A[i][j] / scale[j];
      b[j] += aij * y[i];
      for (std::size_t k = 0; k <= j; ++k) M[j][k] += aij * (A[i][k] / scale[k]);
    }
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = j + 1; k < m; ++k) M[j][k] = M[k][j];
  // Gaussian elimination with partial pivoting.
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
    std::swap(M[piv], M[col]);
    std::swap(b[piv], b[col]);
    if (M[col][col] == 0.0) throw NumericError("polyFit: singular normal matrix");
    for (std::size_t r = col + 1; r < m; ++r) {
      double f = M[r][col] / M[col][col];
      for (std::size_t c = col; c < m; ++c) M[r][c] -= f * M[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> c(m);
  for (std::size_t r = m; r-- > 0;) {
    double acc = b[r];
    for (std::size_t cc = r + 1; cc < m; ++cc) acc -= M[r][cc] * c[cc];
    c[r] = acc / M[r][r];
  }
  for (std::size_t j = 0; j < m; ++j) c[j] /= scale[j];
  return c;
}

// Slope of log|y| vs log x (simple linear regression). Ignores zero samples.
inline double logLogSlope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || y[i] == 0.0) continue;
    double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw NumericError("logLogSlope: not enough usable samples");
  double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

// Continued-fraction rational approximation p/q of v with q <= qmax.
struct Rational {
  long long num = 0;
  long long den = 1;
  double err = 0.0;
  bool exact = false;  // |v - num/den| < tol
};

inline Rational rationalApprox(double v, long long qmax, double tol = 1e-12) {
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = v;
  for (int it = 0; it < 64; ++it) {
    double fa = std::floor(x);
    long long a = static_cast<long long>(fa);
    long long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > qmax) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double frac = x - fa;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
  }
  Rational r;
  if (q1 == 0) { r.num = p0; r.den = q0; }
  else { r.num = p1; r.den = q1; }
  r.err = std::abs(v - static_cast<double>(r.num) / static_cast<double>(r.den));
  r.exact = r.err < tol;
  return r;
}

}  // namespace starosc
