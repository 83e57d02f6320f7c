#include <cmath>

#include "starosc/errors.hpp"
#include "starosc/grid.hpp"
#include "starosc/sl_problem.hpp"

namespace starosc {

LiouvilleTransform::LiouvilleTransform(SLCoeffs coeffs, std::size_t table_n)
    : co_(std::move(coeffs)) {
  if (!(co_.r_hi > co_.r_lo)) throw DomainError("LiouvilleTransform: empty interval");
  if (co_.exp_hi != 0.0 && co_.exp_hi != -1.0)
    throw TransformError("LiouvilleTransform: unsupported surface exponent of c/a");
  // clustered break points; x(r) accumulated per panel
  rt_ = clusteredGrid(co_.r_hi - co_.r_lo, table_n);
  for (auto& r : rt_) r += co_.r_lo;
  rt_.front() = co_.r_lo;
  rt_.back() = co_.r_hi;
  xt_.assign(rt_.size(), 0.0);
  for (std::size_t i = 1; i < rt_.size(); ++i) {
    double seg = panelIntegral(rt_[i - 1], rt_[i]);
    if (!std::isfinite(seg)) throw TransformError("LiouvilleTransform: sqrt(c/a) not integrable");
    xt_[i] = xt_[i - 1] + seg;
  }
  x_plus_ = xt_.back();
  if (!std::isfinite(x_plus_) || x_plus_ <= 0.0)
    throw TransformError("LiouvilleTransform: transformed length not finite");
}

double LiouvilleTransform::sqrtCoverA(double r) const {
  double c = co_.c(r);
  double a = co_.a ? co_.a(r) : 1.0;
  if (!(c > 0.0) || !(a > 0.0))
    throw TransformError("LiouvilleTransform: coefficients must be positive inside");
  return std::sqrt(c / a);
}

double LiouvilleTransform::panelIntegral(double ra, double rb) const {
  // substitute t = sqrt(r_hi - r) when c/a carries the (r_hi - r)^-1 class
  if (co_.exp_hi == -1.0 && rb > co_.r_hi - 0.2 * (co_.r_hi - co_.r_lo)) {
    double ta = std::sqrt(co_.r_hi - rb), tb = std::sqrt(co_.r_hi - ra);
    auto f = [&](double t) { return 2.0 * t * sqrtCoverA(co_.r_hi - t * t); };
    return gaussLegendre16(f, ta, tb);
  }
  auto f = [&](double r) { return sqrtCoverA(r); };
  return gaussLegendre16(f, ra, rb);
}

double LiouvilleTransform::xOfR(double r) const {
  if (r <= co_.r_lo) return 0.0;
  if (r >= co_.r_hi) return x_plus_;
  std::size_t i = lowerIndex(rt_, r);
  return xt_[i] + panelIntegral(rt_[i], r);
}

double LiouvilleTransform::rOfX(double x) const {
  if (x <= 0.0) return co_.r_lo;
  if (x >= x_plus_) return co_.r_hi;
  std::size_t i = lowerIndex(xt_, x);
  double lo = rt_[i], hi = rt_[i + 1];
  double xlo = xt_[i];
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    double xm = xlo + panelIntegral(rt_[i], mid);
    if (xm < x)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15 * (co_.r_hi - co_.r_lo)) break;
  }
  return 0.5 * (lo + hi);
}

double LiouvilleTransform::qAtR(double r) const {
  double a = co_.a ? co_.a(r) : 1.0;
  double da = co_.da ? co_.da(r) : 0.0;
  double d2a = co_.d2a ? co_.d2a(r) : 0.0;
  double c = co_.c(r), dc = co_.dc(r), d2c = co_.d2c(r);
  double la = da / a;                                 // (log a)'
  double lc = dc / c;                                 // (log c)'
  double L1 = la + lc;                                // (log ac)'
  double L2 = d2a / a - la * la + d2c / c - lc * lc;  // (log ac)''
  double Q = L2 - 0.25 * L1 * L1 + la * L1;
  return co_.q00(r) + 0.25 * (a / c) * Q;
}

double LiouvilleTransform::yFromPsi(double r, double psi) const {
  double a = co_.a ? co_.a(r) : 1.0;
  return std::pow(a * co_.c(r), 0.25) * psi;
}

double LiouvilleTransform::psiFromY(double r, double y) const {
  double a = co_.a ? co_.a(r) : 1.0;
  return y / std::pow(a * co_.c(r), 0.25);
}

double computeK0(const LiouvilleProblem& p, std::size_t probe_n) {
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < probe_n; ++i) {
    double t = static_cast<double>(i) / (probe_n - 1);
    double x = 0.5 * p.x_plus * (1.0 - std::cos(M_PI * t));
    double walls = p.K_lo / (x * x) + p.K_hi / ((p.x_plus - x) * (p.x_plus - x));
    double q = p.qAt(x);
    worst = std::min(worst, q - walls - 1.0);
  }
  return std::max(0.0, -worst);
}

}  // namespace starosc
