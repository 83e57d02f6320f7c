#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

#include "starosc/errors.hpp"

namespace starosc {

// Dense truncated Taylor series sum_{k<=K} c_k X^k with real coefficients.
// All binary operations truncate to the shorter of the two orders.
class Series {
public:
  Series() : c_(1, 0.0) {}
  explicit Series(std::size_t order) : c_(order + 1, 0.0) {}
  Series(std::initializer_list<double> c) : c_(c) {
    if (c_.empty()) c_.assign(1, 0.0);
  }
  static Series constant(double v, std::size_t order) {
    Series s(order);
    s.c_[0] = v;
    return s;
  }
  // X itself, truncated at `order`.
  static Series identity(std::size_t order) {
    Series s(order);
    if (order >= 1) s.c_[1] = 1.0;
    return s;
  }

  std::size_t order() const { return c_.size() - 1; }
  double operator[](std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }
  double& at(std::size_t k) {
    assert(k < c_.size());
    return c_[k];
  }
  const std::vector<double>& coeffs() const { return c_; }

  Series truncated(std::size_t order) const {
    Series s(order);
    for (std::size_t k = 0; k <= order && k < c_.size(); ++k) s.c_[k] = c_[k];
    return s;
  }

  double eval(double x) const {
    double acc = 0.0;
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k];
    return acc;
  }
  double evalDeriv(double x) const {
    double acc = 0.0;
    for (std::size_t k = c_.size(); k-- > 1;) acc = acc * x + static_cast<double>(k) * c_[k];
    return acc;
  }

  Series operator-() const {
    Series s = *this;
    for (auto& v : s.c_) v = -v;
    return s;
  }
  friend Series operator+(const Series& a, const Series& b) {
    Series s(std::min(a.order(), b.order()));
    for (std::size_t k = 0; k <= s.order(); ++k) s.c_[k] = a[k] + b[k];
    return s;
  }
  friend Series operator-(const Series& a, const Series& b) {
    Series s(std::min(a.order(), b.order()));
    for (std::size_t k = 0; k <= s.order(); ++k) s.c_[k] = a[k] - b[k];
    return s;
  }
  friend Series operator*(const Series& a, const Series& b) {
    Series s(std::min(a.order(), b.order()));
    for (std::size_t i = 0; i <= s.order(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j <= i; ++j) acc += a[j] * b[i - j];
      s.c_[i] = acc;
    }
    return s;
  }
  friend Series operator*(double v, const Series& a) {
    Series s = a;
    for (auto& c : s.c_) c *= v;
    return s;
  }
  friend Series operator*(const Series& a, double v) { return v * a; }
  friend Series operator+(const Series& a, double v) {
    Series s = a;
    s.c_[0] += v;
    return s;
  }
  friend Series operator+(double v, const Series& a) { return a + v; }
  friend Series operator-(const Series& a, double v) { return a + (-v); }
  friend Series operator-(double v, const Series& a) { return (-a) + v; }

  // 1/a, requires a[0] != 0.
  Series reciprocal() const {
    if (c_[0] == 0.0) throw NumericError("Series::reciprocal: zero constant term");
    Series s(order());
    s.c_[0] = 1.0 / c_[0];
    for (std::size_t i = 1; i <= order(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 1; j <= i; ++j) acc += c_[j] * s.c_[i - j];
      s.c_[i] = -acc / c_[0];
    }
    return s;
  }
  friend Series operator/(const Series& a, const Series& b) { return a * b.truncated(a.order()).reciprocal(); }

  Series derivative() const {
    if (order() == 0) return Series(0);
    Series s(order() - 1);
    for (std::size_t k = 1; k <= order(); ++k) s.c_[k - 1] = static_cast<double>(k) * c_[k];
    return s;
  }
  // Antiderivative with zero constant term; order grows by one.
  Series integral() const {
    Series s(order() + 1);
    for (std::size_t k = 0; k <= order(); ++k) s.c_[k + 1] = c_[k] / static_cast<double>(k + 1);
    return s;
  }

  // exp(a) via the ODE s' = a' s.
  Series exp() const {
    Series s(order());
    s.c_[0] = std::exp(c_[0]);
    for (std::size_t i = 1; i <= order(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 1; j <= i; ++j) acc += static_cast<double>(j) * c_[j] * s.c_[i - j];
      s.c_[i] = acc / static_cast<double>(i);
    }
    return s;
  }
  // log(a), requires a[0] > 0; via s' = a'/a.
  Series log() const {
    if (c_[0] <= 0.0) throw NumericError("Series::log: non-positive constant term");
    Series d = derivative().truncated(order() == 0 ? 0 : order() - 1);
    Series s = (order() == 0) ? Series(0) : (d / truncated(order() - 1)).integral().truncated(order());
    s.c_[0] = std::log(c_[0]);
    return s;
  }
  // a^p for real p, requires a[0] > 0.
  Series pow(double p) const {
    if (c_[0] <= 0.0) throw NumericError("Series::pow: non-positive constant term");
    return (p * log()).exp();
  }

  // a(b(X)) with b[0] == 0 (Horner composition).
  Series compose(const Series& inner) const {
    if (inner[0] != 0.0) throw NumericError("Series::compose: inner constant term must vanish");
    std::size_t n = inner.order();
    Series acc = Series::constant(c_.back(), n);
    for (std::size_t k = c_.size() - 1; k-- > 0;) acc = acc * inner + c_[k];
    return acc;
  }

  // Compositional inverse of a with a[0] == 0 and a[1] != 0:
  // returns g with a(g(X)) = X + O(X^{K+1}).
  Series inverse() const {
    if (c_[0] != 0.0 || c_[1] == 0.0)
      throw NumericError("Series::inverse: need a[0]=0, a[1]!=0");
    std::size_t n = order();
    Series g(n);
    if (n >= 1) g.c_[1] = 1.0 / c_[1];
    // Newton orderwise: match coefficients one at a time.
    for (std::size_t m = 2; m <= n; ++m) {
      Series comp = truncated(m).compose(g.truncated(m));
      // comp[m] + c_[1]*g_m = delta_{m,1}; solve the m-th coefficient.
      g.c_[m] = -comp[m] / c_[1];
    }
    return g;
  }

  // Largest |c_k|.
  double maxAbsCoeff() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
  }

private:
  std::vector<double> c_;
};

}  // namespace starosc
