#include "starosc/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "starosc/errors.hpp"

namespace starosc {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Dopri5 {
  // Dormand-Prince 5(4) tableau
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
};

struct State2 {
  double u, v;
};

}  // namespace

// ---------------------------------------------------------------------------
// quintic two-point Hermite on (u, u', u'') data

void EquilibriumStar::evalSegment(const Segment& s, double r, double* u, double* du) const {
  double h = s.r1 - s.r0;
  double t = (r - s.r0) / h;
  double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  double H0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
  double H1 = t - 6 * t3 + 8 * t4 - 3 * t5;
  double H2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
  double H3 = 10 * t3 - 15 * t4 + 6 * t5;
  double H4 = -4 * t3 + 7 * t4 - 3 * t5;
  double H5 = 0.5 * (t3 - 2 * t4 + t5);
  double d0 = -30 * t2 + 60 * t3 - 30 * t4;
  double d1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
  double d2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4);
  double d3 = 30 * t2 - 60 * t3 + 30 * t4;
  double d4 = -12 * t2 + 28 * t3 - 15 * t4;
  double d5 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
  double p = s.u0 * H0 + h * s.du0 * H1 + h * h * s.d2u0 * H2 + s.u1 * H3 + h * s.du1 * H4 +
             h * h * s.d2u1 * H5;
  double dp = (s.u0 * d0 + h * s.du0 * d1 + h * h * s.d2u0 * d2 + s.u1 * d3 + h * s.du1 * d4 +
               h * h * s.d2u1 * d5) /
              h;
  *u = p;
  *du = dp;
}

void EquilibriumStar::uAt(double r, double* u, double* du) const {
  if (r <= r_center_) {
    double z = r * r;
    *u = center_z_.eval(z);
    *du = 2.0 * r * center_z_.evalDeriv(z);
    return;
  }
  // binary search over segments
  std::size_t lo = 0, hi = segments_.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (segments_[mid].r1 < r)
      lo = mid + 1;
    else
      hi = mid;
  }
  evalSegment(segments_[lo], std::min(r, R_), u, du);
}

// ---------------------------------------------------------------------------
// analytic derivative chain

PointState EquilibriumStar::chainFrom(double r, double u, double du) const {
  const Eos& e = *eos_;
  const double gamma = e.spec().gamma, cv = e.spec().c_v, Gc = e.spec().grav_const;
  const double nu = e.nu();
  const double fourPiG = 4.0 * kPi * Gc;

  PointState p;
  p.r = r;
  p.u = u;
  p.du = du;

  const bool vacuum = (u <= 0.0);
  double w = vacuum ? 0.0 : e.omegaOfU(u);
  p.omega = w;
  p.rho = vacuum ? 0.0 : std::pow(w, nu);

  double Jw = e.J(w), dJw = e.dJ(w), d2Jw = e.d2J(w);
  p.d2u = -2.0 * du / r - fourPiG * p.rho;
  p.domega = du / Jw;
  double wn1 = std::pow(w, nu - 1.0);
  p.drho = nu * wn1 * p.domega;
  p.d3u = -2.0 * p.d2u / r + 2.0 * du / (r * r) - fourPiG * p.drho;
  p.d2omega = (p.d2u - dJw * p.domega * p.domega) / Jw;
  double wn2 = std::pow(w, nu - 2.0);
  p.d2rho = nu * (nu - 1.0) * wn2 * p.domega * p.domega + nu * wn1 * p.d2omega;
  p.d4u = -2.0 * p.d3u / r + 4.0 * p.d2u / (r * r) - 4.0 * du / (r * r * r) - fourPiG * p.d2rho;
  p.d3omega =
      (p.d3u - 3.0 * dJw * p.domega * p.d2omega - d2Jw * p.domega * p.domega * p.domega) / Jw;
  double wn3 = std::pow(w, nu - 3.0);
  p.d3rho = nu * (nu - 1.0) * (nu - 2.0) * wn3 * p.domega * p.domega * p.domega +
            3.0 * nu * (nu - 1.0) * wn2 * p.domega * p.d2omega + nu * wn1 * p.d3omega;

  double es = e.expSigmaOverCv(w);
  p.P = p.rho * w * es;
  p.dP = p.rho * du;
  p.d2P = p.drho * du + p.rho * p.d2u;
  p.d3P = p.d2rho * du + 2.0 * p.drho * p.d2u + p.rho * p.d3u;

  const SigmaLaw& sig = e.spec().sigma;
  double s1 = sig.deriv(w), s2 = sig.deriv2(w), s3 = sig.deriv3(w);
  p.S = sig.value(w);
  p.dS = s1 * p.domega;
  p.d2S = s2 * p.domega * p.domega + s1 * p.d2omega;
  p.d3S = s3 * p.domega * p.domega * p.domega + 3.0 * s2 * p.domega * p.d2omega + s1 * p.d3omega;

  p.g = -du;
  p.dg = -p.d2u;
  p.d2g = -p.d3u;
  p.d3g = -p.d4u;
  p.gOverR = p.g / r;
  p.dgOverR = (p.dg - p.gOverR) / r;
  p.d2gOverR = (p.d2g - 2.0 * p.dgOverR) / r;
  p.d3gOverR = (p.d3g - 3.0 * p.d2gOverR) / r;
  p.meanRho = Gc > 0.0 ? p.gOverR / Gc : 0.0;

  double c2w = gamma * es * (1.0 + w * s1 / cv);
  double c2ww = gamma * es * (2.0 * s1 / cv + w * ((s1 / cv) * (s1 / cv) + s2 / cv));
  p.c2 = gamma * w * es;
  p.dc2 = c2w * p.domega;
  p.d2c2 = c2ww * p.domega * p.domega + c2w * p.d2omega;

  p.A = -p.dS / (gamma * cv);
  p.dA = -p.d2S / (gamma * cv);
  p.d2A = -p.d3S / (gamma * cv);
  p.N2 = p.A * du;  // = -A g
  p.dN2 = p.dA * du + p.A * p.d2u;
  p.d2N2 = p.d2A * du + 2.0 * p.dA * p.d2u + p.A * p.d3u;
  return p;
}

PointState EquilibriumStar::state(double r) const {
  if (r < 0.0 || r > R_ * (1.0 + 1e-12))
    throw DomainError("EquilibriumStar::state: radius outside [0, R]");
  r = std::min(r, R_);
  if (r > r_center_) {
    double u, du;
    uAt(r, &u, &du);
    return chainFrom(r, u, du);
  }
  // series region: evaluate u-derivatives from the center series, then chain
  const Eos& e = *eos_;
  const double cv = e.spec().c_v, gamma = e.spec().gamma, Gc = e.spec().grav_const;
  const double nu = e.nu();
  double z = r * r;
  Series uz = center_z_;
  double u = uz.eval(z);
  Series uz1 = uz.derivative();
  Series uz2 = uz1.derivative();
  Series uz3 = uz2.derivative();
  Series uz4 = uz3.derivative();
  double u1 = uz1.eval(z), u2 = uz2.eval(z), u3 = uz3.eval(z), u4 = uz4.eval(z);
  PointState p;
  p.r = r;
  p.u = u;
  p.du = 2.0 * r * u1;
  p.d2u = 2.0 * u1 + 4.0 * z * u2;
  p.d3u = 12.0 * r * u2 + 8.0 * r * z * u3;
  p.d4u = 12.0 * u2 + 48.0 * z * u3 + 16.0 * z * z * u4;

  double w = e.omegaOfU(u);
  p.omega = w;
  p.rho = std::pow(w, nu);
  double Jw = e.J(w), dJw = e.dJ(w), d2Jw = e.d2J(w);
  p.domega = p.du / Jw;
  p.d2omega = (p.d2u - dJw * p.domega * p.domega) / Jw;
  p.d3omega =
      (p.d3u - 3.0 * dJw * p.domega * p.d2omega - d2Jw * p.domega * p.domega * p.domega) / Jw;
  double wn1 = std::pow(w, nu - 1.0), wn2 = std::pow(w, nu - 2.0), wn3 = std::pow(w, nu - 3.0);
  p.drho = nu * wn1 * p.domega;
  p.d2rho = nu * (nu - 1.0) * wn2 * p.domega * p.domega + nu * wn1 * p.d2omega;
  p.d3rho = nu * (nu - 1.0) * (nu - 2.0) * wn3 * p.domega * p.domega * p.domega +
            3.0 * nu * (nu - 1.0) * wn2 * p.domega * p.d2omega + nu * wn1 * p.d3omega;

  double es = e.expSigmaOverCv(w);
  p.P = p.rho * w * es;
  p.dP = p.rho * p.du;
  p.d2P = p.drho * p.du + p.rho * p.d2u;
  p.d3P = p.d2rho * p.du + 2.0 * p.drho * p.d2u + p.rho * p.d3u;

  const SigmaLaw& sig = e.spec().sigma;
  double s1 = sig.deriv(w), s2 = sig.deriv2(w), s3 = sig.deriv3(w);
  p.S = sig.value(w);
  p.dS = s1 * p.domega;
  p.d2S = s2 * p.domega * p.domega + s1 * p.d2omega;
  p.d3S = s3 * p.domega * p.domega * p.domega + 3.0 * s2 * p.domega * p.d2omega + s1 * p.d3omega;

  p.g = -p.du;
  p.dg = -p.d2u;
  p.d2g = -p.d3u;
  p.d3g = -p.d4u;
  // g/r = -2 u_z(z) is even-analytic; its chain avoids the 0/0 at r = 0
  p.gOverR = -2.0 * u1;
  p.dgOverR = -4.0 * r * u2;
  p.d2gOverR = -4.0 * u2 - 8.0 * z * u3;
  p.d3gOverR = -24.0 * r * u3 - 16.0 * r * z * u4;
  p.meanRho = Gc > 0.0 ? p.gOverR / Gc : 0.0;

  double c2w = gamma * es * (1.0 + w * s1 / cv);
  double c2ww = gamma * es * (2.0 * s1 / cv + w * ((s1 / cv) * (s1 / cv) + s2 / cv));
  p.c2 = gamma * w * es;
  p.dc2 = c2w * p.domega;
  p.d2c2 = c2ww * p.domega * p.domega + c2w * p.d2omega;

  p.A = -p.dS / (gamma * cv);
  p.dA = -p.d2S / (gamma * cv);
  p.d2A = -p.d3S / (gamma * cv);
  p.N2 = p.A * p.du;
  p.dN2 = p.dA * p.du + p.A * p.d2u;
  p.d2N2 = p.d2A * p.du + 2.0 * p.dA * p.d2u + p.A * p.d3u;
  return p;
}

// ---------------------------------------------------------------------------
// construction

namespace {

// Center series of u in z = r^2 from the recursion
//   2k(2k+1) a_k = -4 pi G [rho(u(z))]_{z^{k-1}},  a_0 = u_O.
Series buildCenterSeries(const Eos& eos, double u_O, double omega_O, std::size_t K) {
  const double fourPiG = 4.0 * kPi * eos.spec().grav_const;
  const double nu = eos.nu();
  Series omegaDelta = eos.omegaDeltaSeriesInU(omega_O, K);  // delta-omega(u - u_O)
  Series rhoOfU = (omegaDelta + omega_O).pow(nu);           // series in (u - u_O)
  Series u(K);
  u.at(0) = u_O;
  for (std::size_t k = 1; k <= K; ++k) {
    Series inner = (u - u_O).truncated(K);
    Series rho = rhoOfU.compose(inner);
    double rhs = -fourPiG * rho[k - 1];
    u.at(k) = rhs / (2.0 * k * (2.0 * k + 1.0));
  }
  return u;
}

// Surface series of u in s = (R-r)^{1/D} from
//   k(k-D) b_k - [Q u_s]_{k-1} = -4 pi G D^2 rhoHat_{k-N-2D},  b_D = g_R.
Series buildSurfaceSeries(const Eos& eos, double R, double g_R, long long Nl, long long Dl,
                          std::size_t K) {
  const double fourPiG4 = 4.0 * kPi * eos.spec().grav_const;
  const double nu = eos.nu();
  const std::size_t N = static_cast<std::size_t>(Nl), D = static_cast<std::size_t>(Dl);
  // omega(u) at u=0 and the analytic factor Phi with rho = w1^nu u^nu Phi(u)
  std::size_t uOrder = K / D + 2;
  Series omegaOfU = eos.omegaDeltaSeriesInU(0.0, uOrder);
  double w1 = omegaOfU[1];
  Series T(uOrder);
  T.at(0) = 1.0;
  for (std::size_t j = 2; j <= uOrder; ++j)
    if (j <= omegaOfU.order()) T.at(j - 1) = omegaOfU[j] / w1;
  Series Phi = T.pow(nu);

  // Q(s) = 2D s^D / (R - s^D)
  Series Q(K);
  for (std::size_t m = 1; m * D <= K; ++m)
    Q.at(m * D) = 2.0 * static_cast<double>(D) / std::pow(R, static_cast<double>(m));

  Series b(K);
  b.at(D) = g_R;
  for (std::size_t k = D + 1; k <= K; ++k) {
    // [Q u_s]_{k-1}
    Series us = b.derivative();  // coefficient of s^{j-1} is j b_j
    double qus = 0.0;
    for (std::size_t m = D; m <= k - 1; ++m) qus += Q[m] * us[k - 1 - m];
    double rhs = qus;
    if (k >= N + 2 * D) {
      std::size_t idx = k - N - 2 * D;
      // rhoHat = w1^nu U^nu Phi(u(s)) with u = s^D U(s)
      Series U(K);
      for (std::size_t j = D; j <= K; ++j) U.at(j - D) = b[j];
      Series Unu = U.pow(nu);
      Series PhiU = Phi.compose(b.truncated(K));
      Series rhoHat = std::pow(w1, nu) * Unu * PhiU;
      rhs -= fourPiG4 * static_cast<double>(D) * static_cast<double>(D) * rhoHat[idx];
    }
    double denom = static_cast<double>(k) * (static_cast<double>(k) - static_cast<double>(D));
    b.at(k) = rhs / denom;
  }
  return b;
}

double seriesValidRadius(const Series& s, double scale, double tol) {
  // largest X with |c_K| X^K <= tol*scale, conservatively over the top terms
  double X = 1e300;
  for (std::size_t k = s.order() / 2; k <= s.order(); ++k) {
    double c = std::abs(s[k]);
    if (c <= 0.0) continue;
    X = std::min(X, std::pow(tol * scale / c, 1.0 / static_cast<double>(k)));
  }
  return X;
}

}  // namespace

EquilibriumStar buildEquilibrium(const EosSpec& spec, double rho_center, const GridSpec& grid) {
  if (rho_center <= 0.0) throw DomainError("buildEquilibrium: central density must be positive");
  if (spec.grav_const <= 0.0)
    throw NoFiniteRadius("buildEquilibrium: no self-gravity, u never reaches zero");
  if (spec.gamma <= 4.0 / 3.0) {
    if (!grid.rho_center_bound)
      throw DomainError(
          "buildEquilibrium: for gamma <= 4/3 a central-density smallness bound must be supplied");
    if (rho_center > *grid.rho_center_bound)
      throw DomainError("buildEquilibrium: central density exceeds the supplied smallness bound");
  }

  auto eos = std::make_shared<Eos>(spec, std::pow(rho_center, spec.gamma - 1.0));
  double omega_O = std::pow(rho_center, spec.gamma - 1.0);
  double worst = 0.0;
  if (!eos->elliptic(omega_O * 1.05, &worst))
    throw EosError("buildEquilibrium: ellipticity condition violated, min factor = " +
                   std::to_string(worst));

  const double fourPiG = 4.0 * kPi * spec.grav_const;
  double u_O = eos->uOfOmega(omega_O);
  double alpha = std::sqrt(u_O / (fourPiG * rho_center));  // length scale

  EquilibriumStar star;
  star.eos_ = eos;
  star.center_z_ = buildCenterSeries(*eos, u_O, omega_O, grid.center_order_z);
  double z_valid = seriesValidRadius(star.center_z_, u_O, 1e-13);
  double r0 = std::min(std::sqrt(z_valid), 0.05 * alpha);
  star.r_center_ = r0;

  // adaptive DOPRI5 with the event u = 0
  auto rhs = [&](double r, const State2& y) {
    return State2{y.v, -2.0 * y.v / r - fourPiG * eos->rhoOfU(y.u)};
  };
  auto d2 = [&](double r, const State2& y) { return -2.0 * y.v / r - fourPiG * eos->rhoOfU(y.u); };

  State2 y{star.center_z_.eval(r0 * r0), 2.0 * r0 * star.center_z_.evalDeriv(r0 * r0)};
  double r = r0;
  double h = r0;
  const double hmax = alpha / 40.0;
  const double rmax = grid.r_max_over_alpha * alpha;
  bool found = false;
  std::vector<EquilibriumStar::Segment> segs;

  while (r < rmax) {
    h = std::min(h, hmax);
    State2 k1 = rhs(r, y);
    State2 k2 = rhs(r + Dopri5::c2 * h, {y.u + h * Dopri5::a21 * k1.u, y.v + h * Dopri5::a21 * k1.v});
    State2 k3 = rhs(r + Dopri5::c3 * h, {y.u + h * (Dopri5::a31 * k1.u + Dopri5::a32 * k2.u),
                                         y.v + h * (Dopri5::a31 * k1.v + Dopri5::a32 * k2.v)});
    State2 k4 = rhs(r + Dopri5::c4 * h,
                    {y.u + h * (Dopri5::a41 * k1.u + Dopri5::a42 * k2.u + Dopri5::a43 * k3.u),
                     y.v + h * (Dopri5::a41 * k1.v + Dopri5::a42 * k2.v + Dopri5::a43 * k3.v)});
    State2 k5 = rhs(r + Dopri5::c5 * h, {y.u + h * (Dopri5::a51 * k1.u + Dopri5::a52 * k2.u +
                                                    Dopri5::a53 * k3.u + Dopri5::a54 * k4.u),
                                         y.v + h * (Dopri5::a51 * k1.v + Dopri5::a52 * k2.v +
                                                    Dopri5::a53 * k3.v + Dopri5::a54 * k4.v)});
    State2 k6 = rhs(r + h, {y.u + h * (Dopri5::a61 * k1.u + Dopri5::a62 * k2.u + Dopri5::a63 * k3.u +
                                       Dopri5::a64 * k4.u + Dopri5::a65 * k5.u),
                            y.v + h * (Dopri5::a61 * k1.v + Dopri5::a62 * k2.v + Dopri5::a63 * k3.v +
                                       Dopri5::a64 * k4.v + Dopri5::a65 * k5.v)});
    State2 y5{y.u + h * (Dopri5::b1 * k1.u + Dopri5::b3 * k3.u + Dopri5::b4 * k4.u +
                         Dopri5::b5 * k5.u + Dopri5::b6 * k6.u),
              y.v + h * (Dopri5::b1 * k1.v + Dopri5::b3 * k3.v + Dopri5::b4 * k4.v +
                         Dopri5::b5 * k5.v + Dopri5::b6 * k6.v)};
    State2 k7 = rhs(r + h, y5);
    double erru = h * (Dopri5::e1 * k1.u + Dopri5::e3 * k3.u + Dopri5::e4 * k4.u +
                       Dopri5::e5 * k5.u + Dopri5::e6 * k6.u + Dopri5::e7 * k7.u);
    double errv = h * (Dopri5::e1 * k1.v + Dopri5::e3 * k3.v + Dopri5::e4 * k4.v +
                       Dopri5::e5 * k5.v + Dopri5::e6 * k6.v + Dopri5::e7 * k7.v);
    double scu = grid.rel_tol * std::max({std::abs(y.u), std::abs(y5.u), u_O * 1e-6});
    double scv = grid.rel_tol * std::max({std::abs(y.v), std::abs(y5.v), u_O / alpha * 1e-6});
    double err = std::sqrt(0.5 * ((erru / scu) * (erru / scu) + (errv / scv) * (errv / scv)));
    if (err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      continue;
    }
    EquilibriumStar::Segment s;
    s.r0 = r;
    s.r1 = r + h;
    s.u0 = y.u;
    s.du0 = y.v;
    s.d2u0 = d2(r, y);
    s.u1 = y5.u;
    s.du1 = y5.v;
    s.d2u1 = d2(r + h, y5);
    segs.push_back(s);
    r += h;
    y = y5;
    h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
    if (y.u <= 0.0) {
      found = true;
      break;
    }
  }
  if (!found)
    throw NoFiniteRadius("buildEquilibrium: u has no zero before r_max = " + std::to_string(rmax));

  // locate u(R) = 0 on the last segment by bisection on the dense output
  star.segments_ = std::move(segs);
  {
    const auto& s = star.segments_.back();
    double lo = s.r0, hi = s.r1;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      double u, du;
      star.evalSegment(s, mid, &u, &du);
      if (u > 0.0)
        lo = mid;
      else
        hi = mid;
      if (std::abs(u) <= grid.event_tol * u_O || (hi - lo) <= 1e-16 * s.r1) break;
    }
    star.R_ = 0.5 * (lo + hi);
    // clip the final segment at R with fresh endpoint data
    double uR, duR;
    star.evalSegment(s, star.R_, &uR, &duR);
    auto& last = star.segments_.back();
    last.r1 = star.R_;
    last.u1 = 0.0;  // enforce the vacuum boundary exactly
    last.du1 = duR;
    last.d2u1 = -2.0 * duR / star.R_;
  }

  star.grid_ = clusteredGrid(star.R_, grid.n_nodes);

  // limit constants from the construction itself
  StarLimits lim;
  lim.rho_O = rho_center;
  lim.u_O = u_O;
  lim.P_O = eos->pressure(rho_center);
  lim.P_O1 = (4.0 * kPi / 3.0) * spec.grav_const * rho_center * rho_center;
  lim.g_O = lim.P_O1 / rho_center;
  lim.rho_O1 = lim.P_O1 / eos->dPressureDRho(rho_center);
  double g_R = -star.segments_.back().du1;
  lim.g_R = g_R;
  lim.mass = g_R * star.R_ * star.R_ / (spec.grav_const > 0 ? spec.grav_const : 1.0);
  lim.S_R = spec.sigma.value(0.0);
  double w1 = (spec.gamma - 1.0) / (spec.gamma * eos->expSigmaOverCv(0.0));
  lim.C_rho = std::pow(w1 * g_R, eos->nu());
  lim.c_R2 = g_R / eos->nu();
  // N^2 at the surface: (g/(gamma c_v)) dS/dr with dS/dr = Sigma'(0) omega'(R)
  double omega_prime_R = -g_R / eos->J(0.0);
  lim.N2_R = g_R / (spec.gamma * spec.c_v) * spec.sigma.deriv(0.0) * omega_prime_R;
  // N^2 ~ (N2_O1/2) r^2 near the center
  {
    PointState p = star.state(std::min(0.5 * star.r_center_, 1e-3 * star.R_));
    lim.N2_O1 = 2.0 * p.N2 / (p.r * p.r);
  }
  star.limits_ = lim;

  star.rational_nu_ = rationalApprox(eos->nu(), 64);
  if (star.rational_nu_.exact) {
    std::size_t K = static_cast<std::size_t>(star.rational_nu_.num + 2 * star.rational_nu_.den) +
                    grid.surface_extra_order;
    star.surface_s_ = buildSurfaceSeries(*eos, star.R_, g_R, star.rational_nu_.num,
                                         star.rational_nu_.den, K);
    star.has_surface_series_ = true;
  }

  star.admissibility_ = checkAdmissible(star);
  return star;
}

// ---------------------------------------------------------------------------

EquilibriumStar EquilibriumStar::fromSamples(const EosSpec& spec, const std::vector<double>& r,
                                             const std::vector<double>& u,
                                             const std::vector<double>& du) {
  if (r.size() < 4 || r.size() != u.size() || r.size() != du.size())
    throw DomainError("EquilibriumStar::fromSamples: need >= 4 matching samples");
  EquilibriumStar star;
  star.eos_ = std::make_shared<Eos>(spec, std::pow(u[0], 2.0));
  star.R_ = r.back();
  // second derivatives by central differences of du
  std::vector<double> d2(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    std::size_t a = (i == 0) ? 0 : i - 1;
    std::size_t b = (i + 1 == r.size()) ? i : i + 1;
    d2[i] = (du[b] - du[a]) / (r[b] - r[a]);
  }
  for (std::size_t i = 0; i + 1 < r.size(); ++i)
    star.segments_.push_back({r[i], r[i + 1], u[i], du[i], d2[i], u[i + 1], du[i + 1], d2[i + 1]});
  // crude even fit for the innermost region
  std::vector<double> xs(r.begin(), r.begin() + 4), ys(u.begin(), u.begin() + 4);
  auto c = polyFit(xs, ys, {0.0, 2.0});
  Series cz(1);
  cz.at(0) = c[0];
  cz.at(1) = c[1];
  star.center_z_ = cz;
  star.r_center_ = r.front();
  star.grid_ = clusteredGrid(star.R_, 241);
  StarLimits lim;
  lim.u_O = c[0];
  lim.rho_O = star.eos_->rhoOfU(c[0]);
  lim.g_R = -du.back();
  lim.S_R = spec.sigma.value(0.0);
  star.limits_ = lim;
  star.rational_nu_ = rationalApprox(1.0 / (spec.gamma - 1.0), 64);
  return star;
}

AdmissibilityReport checkAdmissible(const EquilibriumStar& star) {
  AdmissibilityReport rep;
  const auto& grid = star.grid();
  const double R = star.radius();
  const double nu = star.nuIndex();

  rep.positive_interior = true;
  rep.drho_negative = true;
  rep.dP_negative = true;
  std::vector<PointState> ps(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) ps[i] = star.state(grid[i]);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (ps[i].rho <= 0.0) rep.positive_interior = false;
    if (i > 0) {
      if (ps[i].drho >= 0.0) rep.drho_negative = false;
      if (ps[i].dP >= 0.0) rep.dP_negative = false;
    }
  }
  rep.surface_zero = ps.back().rho == 0.0;
  {
    PointState p = star.state(1e-3 * R);
    rep.center_signs = (p.drho / p.r < 0.0) && (p.dP / p.r < 0.0);
  }
  // physical vacuum: finite negative slope of rho^{gamma-1} = omega at R
  {
    PointState p = star.state(R);
    rep.eta_slope_R = p.domega;
    rep.physical_vacuum = std::isfinite(p.domega) && p.domega < 0.0;
  }
  // even-power center fit of u: residual of the odd r^3 coefficient
  {
    std::vector<double> xs, ys;
    for (int i = 0; i <= 24; ++i) {
      double r = (0.02 + 0.10 * i / 24.0) * R;
      PointState p = star.state(r);
      xs.push_back(r);
      ys.push_back(p.u);
    }
    auto c = polyFit(xs, ys, {0.0, 2.0, 3.0, 4.0, 6.0, 8.0});
    double u_O = star.limits().u_O;
    rep.center_even_residual = std::abs(c[2]) * std::pow(0.1 * R, 3.0) / u_O;
  }
  // surface fit of rho against C_rho (R-r)^nu (+ corrections) over the
  // outer 5%
  {
    std::vector<double> xs, ys;
    for (int i = 0; i <= 24; ++i) {
      double d = (0.001 + 0.049 * i / 24.0) * R;
      PointState p = star.state(R - d);
      xs.push_back(d);
      ys.push_back(p.rho);
    }
    std::vector<double> pw = {nu, nu + 1.0, nu + 2.0, nu + 3.0};
    auto c = polyFit(xs, ys, pw);
    double resid = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double fit = 0.0;
      for (std::size_t j = 0; j < pw.size(); ++j) fit += c[j] * std::pow(xs[i], pw[j]);
      resid = std::max(resid, std::abs(fit - ys[i]) / std::max(std::abs(ys[i]), 1e-300));
    }
    rep.surface_fit_residual = resid;
  }
  // finite-difference residuals of hydrostatic balance and the Poisson
  // identity; fourth-order stencils with a step shrinking near the surface
  {
    auto fd4 = [&](auto&& f, double x, double h) {
      return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
    };
    auto Pof = [&](double r) { return star.state(r).P; };
    auto r2g = [&](double r) {
      PointState p = star.state(r);
      return p.r * p.r * p.g;
    };
    double hyd = 0.0, poi = 0.0, dPmax = 0.0;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      double r = grid[i];
      double h = std::min({1e-3 * R, r / 4.0, (R - r) / 8.0});
      if (h <= 0.0) continue;
      PointState p0 = ps[i];
      dPmax = std::max(dPmax, std::abs(p0.dP));
      hyd = std::max(hyd, std::abs(fd4(Pof, r, h) + p0.rho * p0.g));
      if (r > 0.05 * R && r < 0.95 * R) {
        double lhs = fd4(r2g, r, h) / (r * r);
        double rhs = 4.0 * kPi * star.G() * p0.rho;
        poi = std::max(poi, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300));
      }
    }
    rep.hydrostatic_residual = hyd / std::max(dPmax, 1e-300);
    rep.poisson_residual = poi;
  }
  return rep;
}

BoundaryCoefficients boundaryCoefficients(const EquilibriumStar& star, double fit_tol) {
  BoundaryCoefficients bc;
  const double R = star.radius();
  const double nu = star.nuIndex();
  const auto& lim = star.limits();

  // center fits on an annulus clear of the series region; (Q - Q(0))/r^2
  // against even powers keeps the leading coefficient well conditioned
  std::vector<double> xs, yr, yp, yg, yn;
  for (int i = 0; i <= 32; ++i) {
    double r = (0.02 + 0.07 * i / 32.0) * R;
    PointState p = star.state(r);
    xs.push_back(r);
    yr.push_back((p.rho - lim.rho_O) / (r * r));
    yp.push_back((p.P - lim.P_O) / (r * r));
    yg.push_back(p.gOverR);
    yn.push_back(p.N2 / (r * r));
  }
  auto cr = polyFit(xs, yr, {0.0, 2.0, 4.0, 6.0});
  auto cp = polyFit(xs, yp, {0.0, 2.0, 4.0, 6.0});
  auto cg = polyFit(xs, yg, {0.0, 2.0, 4.0, 6.0});
  auto cn = polyFit(xs, yn, {0.0, 2.0, 4.0});
  bc.rho_O1 = -2.0 * cr[0];
  bc.P_O1 = -2.0 * cp[0];
  bc.g_O = cg[0];
  bc.N2_O1 = 2.0 * cn[0];
  double center_resid = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double fit = cp[0] + cp[1] * xs[i] * xs[i] + cp[2] * std::pow(xs[i], 4.0) +
                 cp[3] * std::pow(xs[i], 6.0);
    center_resid = std::max(center_resid, std::abs(fit - yp[i]) * xs[i] * xs[i] / lim.P_O);
  }
  bc.center_fit_residual = center_resid;

  // surface fits over the outer 5%
  std::vector<double> ds, yrho, yn2;
  for (int i = 0; i <= 32; ++i) {
    double d = (0.001 + 0.049 * i / 32.0) * R;
    PointState p = star.state(R - d);
    ds.push_back(d);
    yrho.push_back(p.rho);
    yn2.push_back(p.N2);
  }
  auto cs = polyFit(ds, yrho, {nu, nu + 1.0, nu + 2.0});
  bc.C_rho = cs[0];
  auto cn2 = polyFit(ds, yn2, {0.0, 1.0});
  bc.N2_R = cn2[0];
  bc.c_R2 = star.gamma() * std::pow(bc.C_rho, star.gamma() - 1.0) *
            std::exp(lim.S_R / star.eosSpec().c_v);
  bc.g_R = lim.g_R;
  double surf_resid = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    double fit = cs[0] * std::pow(ds[i], nu) + cs[1] * std::pow(ds[i], nu + 1.0) +
                 cs[2] * std::pow(ds[i], nu + 2.0);
    surf_resid = std::max(surf_resid, std::abs(fit - yrho[i]) / std::max(yrho[i], 1e-300));
  }
  bc.surface_fit_residual = surf_resid;
  if (surf_resid > fit_tol)
    throw SurfaceFitError("boundaryCoefficients: surface fit residual " +
                          std::to_string(surf_resid));

  bc.P_O1_identity = (4.0 * kPi / 3.0) * star.G() * lim.rho_O * lim.rho_O;
  bc.g_R_identity = nu * bc.c_R2;
  return bc;
}

EquilibriumStar rescaleTau(const EquilibriumStar& star, double tau) {
  if (tau <= 0.0) throw DomainError("rescaleTau: tau must be positive");
  const EosSpec& s0 = star.eosSpec();
  EosSpec s = s0;
  double gm1 = s0.gamma - 1.0;
  double shift = -s0.gamma * s0.c_v * std::log(tau);
  if (s0.sigma.isPolynomial()) {
    // Sigma~(w) = Sigma(w tau^{1-gamma}) - gamma c_v log tau
    std::vector<double> c = s0.sigma.coefficients();
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= std::pow(tau, -gm1 * static_cast<double>(k));
    c[0] += shift;
    s.sigma = SigmaLaw::polynomial(std::move(c));
  } else {
    std::vector<double> w = s0.sigma.tableOmega(), v = s0.sigma.tableSigma();
    for (auto& x : w) x *= std::pow(tau, gm1);
    for (auto& x : v) x += shift;
    s.sigma = SigmaLaw::table(std::move(w), std::move(v));
  }
  GridSpec g;
  if (s.gamma <= 4.0 / 3.0) g.rho_center_bound = tau * star.rhoCenter() * 1.0001;
  EquilibriumStar out = buildEquilibrium(s, tau * star.rhoCenter(), g);
  // sanity: radius must transform as R/tau
  double expect = star.radius() / tau;
  if (std::abs(out.radius() - expect) > 1e-6 * expect)
    throw NumericError("rescaleTau: rebuilt radius violates the scaling law");
  return out;
}

}  // namespace starosc
