#include <doctest.h>

#include <cmath>
#include <memory>

#include "starosc/grid.hpp"
#include "starosc/sl_solver.hpp"

using namespace starosc;

namespace {

// roots of tan z = z (zeros of the spherical Bessel-type solution sqrt(x)
// J_{3/2}), located by Newton from the McMahon estimate
double tanRoot(int n) {
  double z = (n + 0.5) * M_PI;
  z -= 1.0 / z;
  for (int it = 0; it < 60; ++it) {
    double t = std::tan(z);
    double f = t - z;
    double df = t * t;
    double step = f / df;
    z -= step;
    if (std::abs(step) < 1e-14) break;
  }
  return z;
}

// independent dense discretization oracle: second-order central differences
// on a uniform mesh truncated at eps, eigenvalue count by the classic
// LDL^T pivot-sign sweep, Richardson over two resolutions
double denseOracle(const std::function<double(double)>& q, double xp, int n, int N) {
  auto eig = [&](int M) {
    // only the left end carries the inverse-square wall; truncate there alone
    double eps = 1e-3 * xp;
    double h = (xp - eps) / (M + 1.0);
    std::vector<double> diag(M);
    double off = -1.0 / (h * h);
    for (int i = 0; i < M; ++i) diag[i] = 2.0 / (h * h) + q(eps + h * (i + 1));
    auto countBelow = [&](double lam) {
      int c = 0;
      double d = diag[0] - lam;
      if (d < 0) ++c;
      for (int i = 1; i < M; ++i) {
        d = diag[i] - lam - off * off / (d == 0.0 ? 1e-300 : d);
        if (d < 0) ++c;
      }
      return c;
    };
    double lo = 0.0, hi = 4.0 / (h * h);
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (countBelow(mid) >= n)
        hi = mid;
      else
        lo = mid;
      if (hi - lo < 1e-13 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
  };
  double a = eig(N), b = eig(2 * N);
  return b + (b - a) / 3.0;
}

LiouvilleProblem besselProblem() {
  LiouvilleProblem p;
  p.x_plus = M_PI;
  p.q_direct = [](double x) { return 2.0 / (x * x); };
  p.K_lo = 2.0;
  p.K_hi = 0.0;
  return p;
}

}  // namespace

TEST_CASE("identity transform and an exponential-weight closed form") {
  SLCoeffs co;
  co.c = [](double) { return 1.0; };
  co.dc = [](double) { return 0.0; };
  co.d2c = [](double) { return 0.0; };
  co.q00 = [](double) { return 0.0; };
  co.r_lo = 0.0;
  co.r_hi = 1.0;
  LiouvilleTransform lt(co);
  CHECK(lt.xPlus() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lt.xOfR(0.4) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(lt.rOfX(0.7) == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(lt.qAtR(0.5) == doctest::Approx(0.0));

  // a = c = e^{2r}: x = r and q = 1 exactly
  SLCoeffs ce;
  ce.a = [](double r) { return std::exp(2 * r); };
  ce.da = [](double r) { return 2 * std::exp(2 * r); };
  ce.d2a = [](double r) { return 4 * std::exp(2 * r); };
  ce.c = ce.a;
  ce.dc = ce.da;
  ce.d2c = ce.d2a;
  ce.q00 = [](double) { return 0.0; };
  ce.r_lo = 0.0;
  ce.r_hi = 1.0;
  LiouvilleTransform le(ce);
  CHECK(le.xPlus() == doctest::Approx(1.0).epsilon(1e-12));
  for (double r : {0.2, 0.5, 0.9}) CHECK(le.qAtR(r) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("plain string: both paths reproduce (n pi / L)^2") {
  LiouvilleProblem p;
  p.x_plus = M_PI;
  p.q_direct = [](double) { return 0.0; };
  p.K_lo = 0.0;
  p.K_hi = 0.0;
  SpectrumSlice s = slEigenvalues(p, 6);
  for (int n = 1; n <= 6; ++n) {
    CHECK(s.value(n) == doctest::Approx(n * n).epsilon(2e-7));
    CHECK(s.eigs[n - 1].agreement_ok);
    CHECK(s.eigs[n - 1].nodes == n - 1);
  }
}

TEST_CASE("inverse-square wall against Bessel zeros and the dense oracle") {
  LiouvilleProblem p = besselProblem();
  SpectrumSlice s = slEigenvalues(p, 8);
  for (int n = 1; n <= 8; ++n) {
    double exact = std::pow(tanRoot(n) / M_PI, 2.0);
    CHECK(s.value(n) == doctest::Approx(exact).epsilon(1e-6));
    CHECK(s.eigs[n - 1].agreement_ok);
    CHECK(s.eigs[n - 1].nodes == n - 1);
  }
  // brute-force dense oracle at triple base resolution
  for (int n : {1, 3}) {
    double oracle = denseOracle(p.q_direct, p.x_plus, n, 4000);
    CHECK(s.value(n) == doctest::Approx(oracle).epsilon(1e-5));
  }
}

TEST_CASE("constant shift moves every eigenvalue by the shift") {
  LiouvilleProblem p = besselProblem();
  SpectrumSlice base = slEigenvalues(p, 4);
  LiouvilleProblem ps = besselProblem();
  double shift = 7.25;
  ps.q_direct = [shift](double x) { return 2.0 / (x * x) + shift; };
  SpectrumSlice moved = slEigenvalues(ps, 4);
  for (int n = 1; n <= 4; ++n)
    CHECK(moved.value(n) - base.value(n) == doctest::Approx(shift).epsilon(1e-9));
}

TEST_CASE("Weyl growth for a bounded-tail potential") {
  LiouvilleProblem p = besselProblem();
  SLOptions o;
  o.mesh_n = 1601;
  SpectrumSlice s = slEigenvalues(p, 20, o);
  double expect = std::pow(20.0 * M_PI / p.x_plus, 2.0);
  CHECK(std::abs(s.value(20) - expect) / expect < 0.10);
}

TEST_CASE("eigenfunctions: nodes, decay exponent, residual") {
  LiouvilleProblem p = besselProblem();
  SpectrumSlice s = slEigenvalues(p, 4);
  SLFunction y1 = slEigenfunction(p, s, 1);
  CHECK(y1.nodes == 0);
  CHECK(y1.residual < 1e-6);
  SLFunction y3 = slEigenfunction(p, s, 3);
  CHECK(y3.nodes == 2);
  CHECK(y3.residual < 1e-6);
  // endpoint decay exponent from a log-log fit near the left wall
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < y1.x.size() && y1.x[i] < 0.1; ++i) {
    xs.push_back(y1.x[i]);
    ys.push_back(std::abs(y1.y[i]));
  }
  double slope = logLogSlope(xs, ys);
  double s_expected = p.sLo();  // = 2 for K = 2
  CHECK(slope == doctest::Approx(s_expected).epsilon(0.05));
}

TEST_CASE("quadratic-form sandwich under a bounded perturbation") {
  // (1-e) Q0 <= Q <= (1+e) Q0 checked by direct quadrature for sampled y
  LiouvilleProblem p = besselProblem();
  auto q0 = p.q_direct;
  double eps = 0.05;
  auto qpert = [q0, eps](double x) { return q0(x) * (1.0 + eps * std::sin(3 * x)); };
  const int M = 2001;
  for (int trial = 0; trial < 4; ++trial) {
    double Q0 = 0.0, Q1 = 0.0;
    for (int i = 1; i + 1 < M; ++i) {
      double x = M_PI * i / (M - 1.0);
      double h = M_PI / (M - 1.0);
      double y = std::pow(x, 2.0) * std::pow(M_PI - x, 1.0) * std::sin((trial + 1) * x);
      double dy = (std::pow(x + h, 2.0) * std::pow(M_PI - x - h, 1.0) *
                       std::sin((trial + 1) * (x + h)) -
                   std::pow(x - h, 2.0) * std::pow(M_PI - x + h, 1.0) *
                       std::sin((trial + 1) * (x - h))) /
                  (2 * h);
      Q0 += h * (dy * dy + (q0(x) + 1.0) * y * y);
      Q1 += h * (dy * dy + (qpert(x) + 1.0) * y * y);
    }
    CHECK(Q1 >= (1.0 - eps) * Q0);
    CHECK(Q1 <= (1.0 + eps) * Q0);
  }
}

TEST_CASE("compact perturbation: rank-one block shifts the spectrum as predicted") {
  // fhat y = gamma <y, u> u with a smooth unit-norm profile u: first-order
  // shift of Lambda_n is gamma <y_n, u>^2
  LiouvilleProblem p = besselProblem();
  double gamma = 0.8;
  auto ufun = [xp = p.x_plus](double x) { return std::sin(M_PI * x / xp) * std::sqrt(2.0 / xp); };
  p.perturbation = [&, gamma](const std::vector<double>& mesh) {
    const std::size_t n = mesh.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      double h = mesh[i + 1] - mesh[i];
      w[i] += 0.5 * h;
      w[i + 1] += 0.5 * h;
    }
    Eigen::MatrixXd F(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) F(i, j) = gamma * ufun(mesh[i]) * ufun(mesh[j]) * w[j];
    return F;
  };
  SpectrumSlice pert = slEigenvalues(p, 4);
  LiouvilleProblem p0 = besselProblem();
  SpectrumSlice base = slEigenvalues(p0, 4);
  for (int n = 1; n <= 4; ++n) {
    SLFunction yb = slEigenfunction(p0, base, n);
    double inner = 0.0;
    for (std::size_t i = 0; i + 1 < yb.x.size(); ++i) {
      double h = yb.x[i + 1] - yb.x[i];
      inner += 0.5 * h * (yb.y[i] * ufun(yb.x[i]) + yb.y[i + 1] * ufun(yb.x[i + 1]));
    }
    double predicted = base.value(n) + gamma * inner * inner;
    // first-order perturbation theory at gamma <~ spacing
    CHECK(pert.value(n) == doctest::Approx(predicted).epsilon(5e-3));
  }
  // polished eigenfunction residual includes the perturbation term
  SLFunction yp = slEigenfunction(p, pert, 1);
  CHECK(yp.residual < 1e-5);
  CHECK(yp.nodes == 0);
}

TEST_CASE("inhomogeneous Green solve against a manufactured solution") {
  LiouvilleProblem p = besselProblem();
  double lam = -1.0;
  // y_ex = x^2 (pi - x) e^{-x} respects both decay classes (s=2 left, 1 right)
  auto yex = [](double x) { return x * x * (M_PI - x) * std::exp(-x); };
  auto d2yex = [](double x) {
    // second derivative of x^2 (pi - x) e^{-x}
    double ex = std::exp(-x);
    double u = x * x * (M_PI - x);
    double du = 2 * x * M_PI - 3 * x * x;
    double d2u = 2 * M_PI - 6 * x;
    return ex * (d2u - 2 * du + u);
  };
  auto rhs = [&](double x) { return -d2yex(x) + (2.0 / (x * x) - lam) * yex(x); };
  std::vector<double> xs;
  for (int i = 1; i < 40; ++i) xs.push_back(M_PI * i / 40.0);
  std::vector<double> y, dy;
  solveInhomogeneous(p, lam, rhs, xs, &y, &dy);
  for (std::size_t i = 0; i < xs.size(); ++i)
    CHECK(y[i] == doctest::Approx(yex(xs[i])).epsilon(5e-6));
}

TEST_CASE("eigenvalue is Lipschitz in a potential parameter") {
  // |Lambda_n(s + ds) - Lambda_n(s)| <= M |ds| (Lambda_n + K0) sampled
  auto make = [](double a) {
    LiouvilleProblem p;
    p.x_plus = M_PI;
    p.q_direct = [a](double x) { return 2.0 / (x * x) + a * std::cos(x); };
    p.K_lo = 2.0;
    p.K_hi = 0.0;
    return p;
  };
  SLOptions o;
  o.with_shooting = true;
  double a0 = 0.5, da = 0.01;
  SpectrumSlice s1 = slEigenvalues(make(a0), 3, o);
  SpectrumSlice s2 = slEigenvalues(make(a0 + da), 3, o);
  for (int n = 1; n <= 3; ++n) {
    double diff = std::abs(s2.value(n) - s1.value(n));
    CHECK(diff <= 2.0 * da * (std::abs(s1.value(n)) + 1.0));
    CHECK(diff > 0.0);
  }
}
