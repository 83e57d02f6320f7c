#include "starosc/eos.hpp"

#include <algorithm>
#include <cmath>

#include "starosc/errors.hpp"

namespace starosc {

SigmaLaw SigmaLaw::zero() { return polynomial({0.0}); }

SigmaLaw SigmaLaw::polynomial(std::vector<double> coeff) {
  SigmaLaw s;
  s.kind_ = Kind::Polynomial;
  if (coeff.empty()) coeff.assign(1, 0.0);
  s.coeff_ = std::move(coeff);
  return s;
}

SigmaLaw SigmaLaw::table(std::vector<double> omega, std::vector<double> sigma) {
  if (omega.size() != sigma.size() || omega.size() < 3)
    throw DomainError("SigmaLaw::table: need >= 3 matching samples");
  for (std::size_t i = 1; i < omega.size(); ++i)
    if (omega[i] <= omega[i - 1]) throw DomainError("SigmaLaw::table: omega must increase");
  SigmaLaw s;
  s.kind_ = Kind::Table;
  s.omega_ = std::move(omega);
  s.sigma_ = std::move(sigma);
  s.buildSpline();
  return s;
}

void SigmaLaw::buildSpline() {
  // natural cubic spline second derivatives
  const std::size_t n = omega_.size();
  y2_.assign(n, 0.0);
  std::vector<double> u(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double sig = (omega_[i] - omega_[i - 1]) / (omega_[i + 1] - omega_[i - 1]);
    double p = sig * y2_[i - 1] + 2.0;
    y2_[i] = (sig - 1.0) / p;
    double d = (sigma_[i + 1] - sigma_[i]) / (omega_[i + 1] - omega_[i]) -
               (sigma_[i] - sigma_[i - 1]) / (omega_[i] - omega_[i - 1]);
    u[i] = (6.0 * d / (omega_[i + 1] - omega_[i - 1]) - sig * u[i - 1]) / p;
  }
  for (std::size_t k = n - 1; k-- > 0;) y2_[k] = y2_[k] * y2_[k + 1] + u[k];
}

std::size_t SigmaLaw::seg(double omega) const {
  std::size_t i = lowerIndex(omega_, std::clamp(omega, omega_.front(), omega_.back()));
  return std::min(i, omega_.size() - 2);
}

double SigmaLaw::value(double omega) const {
  if (kind_ == Kind::Polynomial) {
    double acc = 0.0;
    for (std::size_t k = coeff_.size(); k-- > 0;) acc = acc * omega + coeff_[k];
    return acc;
  }
  std::size_t i = seg(omega);
  double h = omega_[i + 1] - omega_[i];
  double a = (omega_[i + 1] - omega) / h, b = (omega - omega_[i]) / h;
  return a * sigma_[i] + b * sigma_[i + 1] +
         ((a * a * a - a) * y2_[i] + (b * b * b - b) * y2_[i + 1]) * h * h / 6.0;
}

double SigmaLaw::deriv(double omega) const {
  if (kind_ == Kind::Polynomial) {
    double acc = 0.0;
    for (std::size_t k = coeff_.size(); k-- > 1;) acc = acc * omega + static_cast<double>(k) * coeff_[k];
    return acc;
  }
  std::size_t i = seg(omega);
  double h = omega_[i + 1] - omega_[i];
  double a = (omega_[i + 1] - omega) / h, b = (omega - omega_[i]) / h;
  return (sigma_[i + 1] - sigma_[i]) / h -
         (3.0 * a * a - 1.0) / 6.0 * h * y2_[i] + (3.0 * b * b - 1.0) / 6.0 * h * y2_[i + 1];
}

double SigmaLaw::deriv2(double omega) const {
  if (kind_ == Kind::Polynomial) {
    double acc = 0.0;
    for (std::size_t k = coeff_.size(); k-- > 2;)
      acc = acc * omega + static_cast<double>(k) * static_cast<double>(k - 1) * coeff_[k];
    return acc;
  }
  std::size_t i = seg(omega);
  double h = omega_[i + 1] - omega_[i];
  double a = (omega_[i + 1] - omega) / h, b = (omega - omega_[i]) / h;
  return a * y2_[i] + b * y2_[i + 1];
}

double SigmaLaw::deriv3(double omega) const {
  if (kind_ == Kind::Polynomial) {
    double acc = 0.0;
    for (std::size_t k = coeff_.size(); k-- > 3;)
      acc = acc * omega + static_cast<double>(k) * static_cast<double>(k - 1) *
                              static_cast<double>(k - 2) * coeff_[k];
    return acc;
  }
  std::size_t i = seg(omega);
  return (y2_[i + 1] - y2_[i]) / (omega_[i + 1] - omega_[i]);
}

Series SigmaLaw::taylorAt(double omega0, std::size_t order) const {
  Series s(order);
  if (kind_ == Kind::Polynomial) {
    // shift the polynomial: evaluate derivatives exactly
    std::vector<double> c = coeff_;
    for (std::size_t k = 0; k <= order; ++k) {
      double acc = 0.0;
      for (std::size_t j = c.size(); j-- > k;) {
        double binom = 1.0;
        for (std::size_t m = 0; m < k; ++m) binom *= static_cast<double>(j - m) / static_cast<double>(m + 1);
        acc += c[j] * binom * std::pow(omega0, static_cast<double>(j - k));
      }
      s.at(k) = acc;
    }
    return s;
  }
  s.at(0) = value(omega0);
  if (order >= 1) s.at(1) = deriv(omega0);
  if (order >= 2) s.at(2) = deriv2(omega0) / 2.0;
  if (order >= 3) s.at(3) = deriv3(omega0) / 6.0;
  return s;
}

Eos::Eos(EosSpec spec, double omega_max_hint) : spec_(std::move(spec)) {
  if (!(spec_.gamma > 1.0 && spec_.gamma < 2.0))
    throw DomainError("Eos: adiabatic exponent must satisfy 1 < gamma < 2");
  if (spec_.c_v <= 0.0) throw DomainError("Eos: c_v must be positive");
  if (spec_.grav_const < 0.0) throw DomainError("Eos: negative gravitational constant");
  // prefix table for I(omega); partial panels are re-integrated by GL16
  double cap = std::max(omega_max_hint * 2.0, 1e-6);
  const std::size_t n = 768;
  iKnots_.resize(n + 1);
  iPrefix_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i <= n; ++i) iKnots_[i] = cap * static_cast<double>(i) / n;
  auto f = [this](double w) { return expSigmaOverCv(w); };
  for (std::size_t i = 1; i <= n; ++i)
    iPrefix_[i] = iPrefix_[i - 1] + gaussLegendre16(f, iKnots_[i - 1], iKnots_[i]);
}

double Eos::expSigmaOverCv(double omega) const {
  return std::exp(spec_.sigma.value(omega) / spec_.c_v);
}

double Eos::ellipticFactor(double omega) const {
  return spec_.gamma + (spec_.gamma - 1.0) / spec_.c_v * omega * spec_.sigma.deriv(omega);
}

bool Eos::elliptic(double omega_max, double* worst) const {
  double w = ellipticFactor(0.0);
  const int n = 512;
  for (int i = 1; i <= n; ++i) w = std::min(w, ellipticFactor(omega_max * i / n));
  if (worst) *worst = w;
  return w > 0.0;
}

double Eos::iOf(double omega) const {
  if (omega <= 0.0) return 0.0;
  auto f = [this](double w) { return expSigmaOverCv(w); };
  if (omega >= iKnots_.back())
    return iPrefix_.back() + integrateAdaptive(f, iKnots_.back(), omega);
  std::size_t i = lowerIndex(iKnots_, omega);
  return iPrefix_[i] + gaussLegendre16(f, iKnots_[i], omega);
}

double Eos::pressure(double rho) const {
  if (rho < 0.0) throw DomainError("Eos::pressure: negative density");
  if (rho == 0.0) return 0.0;
  double omega = std::pow(rho, spec_.gamma - 1.0);
  return std::pow(rho, spec_.gamma) * expSigmaOverCv(omega);
}

double Eos::dPressureDRho(double rho) const {
  if (rho <= 0.0) return 0.0;
  double omega = std::pow(rho, spec_.gamma - 1.0);
  return ellipticFactor(omega) * pressure(rho) / rho;
}

double Eos::uOfOmega(double omega) const {
  if (omega <= 0.0) return 0.0;
  return omega * expSigmaOverCv(omega) + iOf(omega) / (spec_.gamma - 1.0);
}

double Eos::uOfRho(double rho) const {
  if (rho < 0.0) throw DomainError("Eos::uOfRho: negative density");
  if (rho == 0.0) return 0.0;
  return uOfOmega(std::pow(rho, spec_.gamma - 1.0));
}

double Eos::J(double omega) const {
  return expSigmaOverCv(omega) * ellipticFactor(omega) / (spec_.gamma - 1.0);
}

double Eos::dJ(double omega) const {
  double g = spec_.gamma, cv = spec_.c_v;
  double sp = spec_.sigma.deriv(omega), spp = spec_.sigma.deriv2(omega);
  double ell = ellipticFactor(omega);
  double dell = (g - 1.0) / cv * (sp + omega * spp);
  return expSigmaOverCv(omega) * (sp / cv * ell + dell) / (g - 1.0);
}

double Eos::d2J(double omega) const {
  double g = spec_.gamma, cv = spec_.c_v;
  double sp = spec_.sigma.deriv(omega), spp = spec_.sigma.deriv2(omega),
         sppp = spec_.sigma.deriv3(omega);
  double ell = ellipticFactor(omega);
  double dell = (g - 1.0) / cv * (sp + omega * spp);
  double d2ell = (g - 1.0) / cv * (2.0 * spp + omega * sppp);
  double e = expSigmaOverCv(omega);
  return e * ((sp / cv) * (sp / cv) * ell + spp / cv * ell + 2.0 * sp / cv * dell + d2ell) /
         (g - 1.0);
}

double Eos::omegaOfU(double u) const {
  if (u <= 0.0) return 0.0;
  // initial guess from the leading behavior, then safeguarded Newton
  double w = u * (spec_.gamma - 1.0) / (spec_.gamma * expSigmaOverCv(0.0));
  double lo = 0.0, hi = std::max(w * 4.0, 1e-300);
  while (uOfOmega(hi) < u) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericError("Eos::omegaOfU: no bracket");
  }
  w = std::clamp(w, lo, hi);
  for (int it = 0; it < 80; ++it) {
    double f = uOfOmega(w) - u;
    if (f > 0.0) hi = w; else lo = w;
    double step = f / J(w);
    double wn = w - step;
    if (!(wn > lo && wn < hi)) wn = 0.5 * (lo + hi);
    if (std::abs(wn - w) <= 1e-15 * std::max(1.0, std::abs(w))) return wn;
    w = wn;
  }
  if ((hi - lo) > 1e-10 * std::max(1.0, hi))
    throw NumericError("Eos::omegaOfU: Newton failed to converge, bracket [" +
                       std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return w;
}

double Eos::rhoOfU(double u) const {
  if (u <= 0.0) return 0.0;
  return std::pow(omegaOfU(u), nu());
}

Series Eos::uSeriesAtOmega(double omega0, std::size_t order) const {
  Series sig = spec_.sigma.taylorAt(omega0, order) * (1.0 / spec_.c_v);
  Series e = sig.exp();
  Series w = Series::identity(order) + omega0;
  Series integral = e.integral().truncated(order);  // Int_{omega0}^{omega0+d} e
  Series u = w * e + (1.0 / (spec_.gamma - 1.0)) * (integral + iOf(omega0));
  return u;
}

Series Eos::omegaDeltaSeriesInU(double omega0, std::size_t order) const {
  Series u = uSeriesAtOmega(omega0, order);
  Series du = u - u[0];  // zero constant term
  return du.inverse();
}

}  // namespace starosc
