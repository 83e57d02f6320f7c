#include "starosc/profiles.hpp"

#include <cmath>
#include <limits>

#include "starosc/errors.hpp"

namespace starosc {

namespace {
constexpr double kPi = 3.14159265358979323846;

// 4-point Gauss-Legendre panel
constexpr double kGL4x[2] = {0.3399810435848563, 0.8611363115940526};
constexpr double kGL4w[2] = {0.6521451548625461, 0.3478548451374538};

double drhoOverR(const PointState& p) { return p.r > 0.0 ? p.drho / p.r : p.d2rho; }
}  // namespace

double invScaleHeight(const PointState& p, std::span<const FieldPower> q) {
  double acc = 0.0;
  for (const auto& fp : q) {
    double v = 0.0;
    switch (fp.field) {
      case Field::Rho:
        if (p.rho <= 0.0) throw DomainError("invScaleHeight: rho <= 0 at r");
        v = -p.drho / p.rho;
        break;
      case Field::Pressure:
        if (p.P <= 0.0) throw DomainError("invScaleHeight: P <= 0 at r");
        v = -p.dP / p.P;
        break;
      case Field::Gravity:
        if (p.g <= 0.0) throw DomainError("invScaleHeight: g <= 0 at r");
        v = -p.dg / p.g;
        break;
      case Field::SoundSpeed2:
        if (p.c2 <= 0.0) throw DomainError("invScaleHeight: c2 <= 0 at r");
        v = -p.dc2 / p.c2;
        break;
      case Field::Radius:
        v = -1.0 / p.r;
        break;
    }
    acc += fp.power * v;
  }
  return acc;
}

double invScaleHeight(const EquilibriumStar& star, std::span<const FieldPower> q, double r) {
  PointState p = star.state(r);
  return invScaleHeight(p, q);
}

Profiles backgroundProfiles(const EquilibriumStar& star) {
  Profiles out;
  const auto& grid = star.grid();
  const double R = star.radius();
  const double GM_over_R = star.limits().g_R * R;
  out.r = grid;
  out.rho.reserve(grid.size());
  for (double r : grid) {
    PointState p = star.state(r);
    out.rho.push_back(p.rho);
    out.P.push_back(p.P);
    out.S.push_back(p.S);
    out.Phi.push_back(-p.u - GM_over_R);
    out.g.push_back(p.g);
    out.c2.push_back(p.c2);
    out.A.push_back(p.A);
    out.N2.push_back(p.N2);
    out.meanRho.push_back(p.meanRho);
  }
  out.rho_O = star.limits().rho_O;
  out.g_O = star.limits().g_O;
  return out;
}

// ---------------------------------------------------------------------------

ModeAux::ModeAux(std::shared_ptr<const EquilibriumStar> star, int l, double param, Branch b)
    : star_(std::move(star)), l_(l), param_(param), branch_(b) {
  if (l_ < 1) throw DomainError("ModeAux: spherical degree must be >= 1");
  if (param_ < 0.0) throw DomainError("ModeAux: parameter must be >= 0");
}

double ModeAux::lambdaPhys() const {
  if (branch_ == Branch::G) return param_;
  return param_ > 0.0 ? 1.0 / param_ : std::numeric_limits<double>::infinity();
}

void ModeAux::buildWTable() {
  const auto& grid = star_->grid();
  std::vector<double> wint(grid.size(), 0.0), wder(grid.size(), 0.0);
  auto bintAt = [this](double r) {
    AuxPoint a;
    fill(star_->state(r), &a);
    return a.bint;
  };
  for (std::size_t i = 0; i < grid.size(); ++i) wder[i] = bintAt(grid[i]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double a = grid[i - 1], b = grid[i];
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int k = 0; k < 2; ++k)
      s += kGL4w[k] * (bintAt(mid - half * kGL4x[k]) + bintAt(mid + half * kGL4x[k]));
    wint[i] = wint[i - 1] + s * half;
  }
  wint_ = std::move(wint);
  wder_ = std::move(wder);
  wgrid_ = grid;
}

double ModeAux::wExponent(double r) const {
  if (wgrid_.empty()) const_cast<ModeAux*>(this)->buildWTable();
  if (r <= 0.0) return 0.0;
  if (r >= wgrid_.back()) return wint_.back();
  std::size_t i = lowerIndex(wgrid_, r);
  double h = wgrid_[i + 1] - wgrid_[i];
  double t = (r - wgrid_[i]) / h;
  double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * wint_[i] + h10 * h * wder_[i] + h01 * wint_[i + 1] + h11 * h * wder_[i + 1];
}

AuxPoint ModeAux::at(double r) const {
  PointState p = star_->state(r);
  AuxPoint a;
  fill(p, &a);
  double twoPiG = 2.0 * kPi * star_->G();
  double Qw;  // frakQ * r^2
  if (branch_ == Branch::G)
    Qw = p.rho * p.gOverR * p.gOverR * a.E;
  else
    Qw = p.rho * a.E;
  double sqrtQ = (r > 0.0) ? std::sqrt(Qw) / r : std::numeric_limits<double>::infinity();
  a.W = sqrtQ * std::exp(twoPiG * wExponent(r));
  a.invHW = 0.5 * a.Acoef;
  return a;
}

// ---------------------------------------------------------------------------
// g-branch

GoughAux::GoughAux(std::shared_ptr<const EquilibriumStar> star, int l, double lambda)
    : ModeAux(std::move(star), l, lambda, Branch::G) {
  double m = std::numeric_limits<double>::infinity();
  for (double r : star_->grid()) {
    double E, dE, d2E, d3E;
    eChain(star_->state(r), &E, &dE, &d2E, &d3E);
    m = std::min(m, E);
  }
  minE_ = m;
}

double GoughAux::E1(const PointState& p) const {
  double w = 1.0 / p.gOverR;
  return -4.0 * w + 4.0 * kPi * star_->G() * p.rho * w * w;
}

double GoughAux::E2(const PointState& p) const {
  double w = 1.0 / p.gOverR;
  return -w * w;
}

void GoughAux::eChain(const PointState& p, double* E, double* dE, double* d2E,
                      double* d3E) const {
  const double C4 = 4.0 * kPi * star_->G();
  double gr = p.gOverR, dgr = p.dgOverR, d2gr = p.d2gOverR, d3gr = p.d3gOverR;
  double w = 1.0 / gr;
  double w1 = -dgr / (gr * gr);
  double w2 = -d2gr / (gr * gr) + 2.0 * dgr * dgr / (gr * gr * gr);
  double w3 = -d3gr / (gr * gr) + 6.0 * dgr * d2gr / (gr * gr * gr) -
              6.0 * dgr * dgr * dgr / (gr * gr * gr * gr);
  double ww1 = 2.0 * w * w1;
  double ww2 = 2.0 * (w1 * w1 + w * w2);
  double ww3 = 6.0 * w1 * w2 + 2.0 * w * w3;
  double e1p = -4.0 * w1 + C4 * (p.drho * w * w + p.rho * ww1);
  double e1pp = -4.0 * w2 + C4 * (p.d2rho * w * w + 2.0 * p.drho * ww1 + p.rho * ww2);
  double e1ppp = -4.0 * w3 + C4 * (p.d3rho * w * w + 3.0 * p.d2rho * ww1 + 3.0 * p.drho * ww2 +
                                   p.rho * ww3);
  double e1 = -4.0 * w + C4 * p.rho * w * w;
  double e2 = -w * w, e2p = -ww1, e2pp = -ww2, e2ppp = -ww3;
  double lam = param_, s = lam / ll1();
  *E = 1.0 + (e1 + e2 * lam) * s;
  *dE = (e1p + e2p * lam) * s;
  *d2E = (e1pp + e2pp * lam) * s;
  *d3E = (e1ppp + e2ppp * lam) * s;
}

void GoughAux::fill(const PointState& p, AuxPoint* a) const {
  const double C4 = 4.0 * kPi * star_->G();
  const double L1 = ll1();
  const double lam = param_;
  a->r = p.r;
  a->lambda_phys = lam;
  eChain(p, &a->E, &a->dE, &a->d2E, &a->d3E);
  double E = a->E;
  a->invHE = -a->dE / E;
  a->dinvHE = -a->d2E / E + a->dE * a->dE / (E * E);

  double N = p.g * a->dE;
  double N1 = p.dg * a->dE + p.g * a->d2E;
  double N2d = p.d2g * a->dE + 2.0 * p.dg * a->d2E + p.g * a->d3E;
  double F = -N / E;
  double F1 = -N1 / E + N * a->dE / (E * E);
  double F2 = -N2d / E + 2.0 * N1 * a->dE / (E * E) + N * a->d2E / (E * E) -
              2.0 * N * a->dE * a->dE / (E * E * E);
  a->frakN2 = p.N2 + F;
  a->dfrakN2 = p.dN2 + F1;
  a->d2frakN2 = p.d2N2 + F2;
  if (p.r > 0.0) {
    double r = p.r, r2 = r * r;
    a->kappa = L1 * a->frakN2 / r2;
    a->dkappa = L1 * (a->dfrakN2 / r2 - 2.0 * a->frakN2 / (r2 * r));
    a->d2kappa =
        L1 * (a->d2frakN2 / r2 - 4.0 * a->dfrakN2 / (r2 * r) + 6.0 * a->frakN2 / (r2 * r2));
  } else {
    a->kappa = L1 * 0.5 * a->d2frakN2;
    a->dkappa = 0.0;
    a->d2kappa = 0.0;
  }
  a->Sl2 = p.r > 0.0 ? L1 * p.c2 / (p.r * p.r) : std::numeric_limits<double>::infinity();

  double dOr = drhoOverR(p);
  double gr = p.gOverR;
  a->aCoup = -dOr / (gr * E);
  a->bCoup = -dOr * lam / (L1 * gr * gr * E);
  a->bint = a->bCoup * p.r;

  a->invHgE2r2 = -2.0 * p.dgOverR / gr + a->invHE;
  a->invHEorig = a->invHE;
  double invHrho = p.rho > 0.0 ? -p.drho / p.rho : std::numeric_limits<double>::infinity();
  double twoOverR = p.r > 0.0 ? 2.0 / p.r : std::numeric_limits<double>::infinity();
  a->Acoef = invHrho + a->invHgE2r2 + twoOverR - C4 * a->bint;
  if (p.r > 0.0 && p.rho > 0.0) {
    double dinvHrho = -p.d2rho / p.rho + (p.drho / p.rho) * (p.drho / p.rho);
    double dinvHgE = -2.0 * (p.d2gOverR * gr - p.dgOverR * p.dgOverR) / (gr * gr) + a->dinvHE;
    double g2E = p.g * p.g * E;
    double dbint = -(lam / L1) * ((p.d2rho * p.r * p.r + 2.0 * p.r * p.drho) / g2E -
                                  p.drho * p.r * p.r * (2.0 * p.dg / p.g + a->dE / E) / g2E);
    a->dAcoef = dinvHrho + dinvHgE - 2.0 / (p.r * p.r) - C4 * dbint;
  } else {
    a->dAcoef = 0.0;
  }
}

// ---------------------------------------------------------------------------
// p-branch

PModeAux::PModeAux(std::shared_ptr<const EquilibriumStar> star, int l, double mu)
    : ModeAux(std::move(star), l, mu, Branch::P) {
  double m = std::numeric_limits<double>::infinity();
  for (double r : star_->grid()) {
    double E, dE, d2E, d3E;
    eChain(star_->state(r), &E, &dE, &d2E, &d3E);
    m = std::min(m, E);
  }
  minE_ = m;
}

double PModeAux::Ep1(const PointState& p) const {
  return 4.0 * p.gOverR - 4.0 * kPi * star_->G() * p.rho;
}

double PModeAux::Ep2(const PointState& p) const { return -ll1() * p.gOverR * p.gOverR; }

void PModeAux::eChain(const PointState& p, double* E, double* dE, double* d2E,
                      double* d3E) const {
  const double C4 = 4.0 * kPi * star_->G();
  const double L1 = ll1();
  double gr = p.gOverR, dgr = p.dgOverR, d2gr = p.d2gOverR, d3gr = p.d3gOverR;
  double e1 = 4.0 * gr - C4 * p.rho;
  double e1p = 4.0 * dgr - C4 * p.drho;
  double e1pp = 4.0 * d2gr - C4 * p.d2rho;
  double e1ppp = 4.0 * d3gr - C4 * p.d3rho;
  double e2 = -L1 * gr * gr;
  double e2p = -L1 * 2.0 * gr * dgr;
  double e2pp = -L1 * 2.0 * (dgr * dgr + gr * d2gr);
  double e2ppp = -L1 * (6.0 * dgr * d2gr + 2.0 * gr * d3gr);
  double mu = param_;
  *E = 1.0 + (e1 + e2 * mu) * mu;
  *dE = (e1p + e2p * mu) * mu;
  *d2E = (e1pp + e2pp * mu) * mu;
  *d3E = (e1ppp + e2ppp * mu) * mu;
}

void PModeAux::fill(const PointState& p, AuxPoint* a) const {
  const double C4 = 4.0 * kPi * star_->G();
  const double L1 = ll1();
  const double mu = param_;
  a->r = p.r;
  a->lambda_phys = mu > 0.0 ? 1.0 / mu : std::numeric_limits<double>::infinity();
  eChain(p, &a->E, &a->dE, &a->d2E, &a->d3E);
  double E = a->E;
  a->invHE = -a->dE / E;
  a->dinvHE = -a->d2E / E + a->dE * a->dE / (E * E);

  double gr = p.gOverR;
  double N = p.g * a->dE;
  double N1 = p.dg * a->dE + p.g * a->d2E;
  double N2d = p.d2g * a->dE + 2.0 * p.dg * a->d2E + p.g * a->d3E;
  double F = -N / E;
  double F1 = -N1 / E + N * a->dE / (E * E);
  double F2 = -N2d / E + 2.0 * N1 * a->dE / (E * E) + N * a->d2E / (E * E) -
              2.0 * N * a->dE * a->dE / (E * E * E);
  a->frakN2 = p.N2 + 2.0 * p.r * p.dgOverR + F;
  a->dfrakN2 = p.dN2 + 2.0 * p.dgOverR + 2.0 * p.r * p.d2gOverR + F1;
  a->d2frakN2 = p.d2N2 + 4.0 * p.d2gOverR + 2.0 * p.r * p.d3gOverR + F2;

  a->kappa = 1.0 / p.c2;
  a->dkappa = -p.dc2 / (p.c2 * p.c2);
  a->d2kappa = -p.d2c2 / (p.c2 * p.c2) + 2.0 * p.dc2 * p.dc2 / (p.c2 * p.c2 * p.c2);
  a->Sl2 = p.r > 0.0 ? L1 * p.c2 / (p.r * p.r) : std::numeric_limits<double>::infinity();

  double dOr = drhoOverR(p);
  a->aCoup = L1 * mu * mu * dOr * gr / E;
  a->bCoup = dOr * mu / E;
  a->bint = a->bCoup * p.r;

  a->invHgE2r2 = a->invHE;
  a->invHEorig = a->invHE + 2.0 * p.dgOverR / gr;
  double invHrho = p.rho > 0.0 ? -p.drho / p.rho : std::numeric_limits<double>::infinity();
  double twoOverR = p.r > 0.0 ? 2.0 / p.r : std::numeric_limits<double>::infinity();
  a->Acoef = invHrho + a->invHgE2r2 + twoOverR - C4 * a->bint;
  if (p.r > 0.0 && p.rho > 0.0) {
    double dinvHrho = -p.d2rho / p.rho + (p.drho / p.rho) * (p.drho / p.rho);
    double dbint = mu * (p.d2rho / E - p.drho * a->dE / (E * E));
    a->dAcoef = dinvHrho + a->dinvHE - 2.0 / (p.r * p.r) - C4 * dbint;
  } else {
    a->dAcoef = 0.0;
  }
}

// ---------------------------------------------------------------------------

GoughAux goughFactors(std::shared_ptr<const EquilibriumStar> star, int l, double lambda) {
  GoughAux aux(std::move(star), l, lambda);
  if (aux.minE() <= 0.0)
    throw LambdaTooLarge("goughFactors: E <= 0 on the grid at lambda = " + std::to_string(lambda));
  return aux;
}

PModeAux pmodeFactors(std::shared_ptr<const EquilibriumStar> star, int l, double mu) {
  PModeAux aux(std::move(star), l, mu);
  if (aux.minE() <= 0.0)
    throw MuTooLarge("pmodeFactors: E^p <= 0 on the grid at mu = " + std::to_string(mu));
  return aux;
}

namespace {
template <typename AuxT>
double param0Bisect(const std::shared_ptr<const EquilibriumStar>& star, int l, double eps,
                    double hi0) {
  auto ok = [&](double v) { return AuxT(star, l, v).minE() >= 1.0 - eps; };
  double lo = 0.0, hi = hi0;
  while (ok(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e14) return lo;
  }
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}
}  // namespace

double lambda0Default(const std::shared_ptr<const EquilibriumStar>& star, int l, double eps) {
  double seed = star->limits().g_R / star->radius();
  return param0Bisect<GoughAux>(star, l, eps, seed * 0.01);
}

double mu0Default(const std::shared_ptr<const EquilibriumStar>& star, int l, double eps) {
  double seed = star->radius() / star->limits().g_R;
  return param0Bisect<PModeAux>(star, l, eps, seed * 0.01);
}

}  // namespace starosc
