#include "sabrlab/smile.hpp"

#include <cmath>

// Evaluation notes
// ----------------
// The expansion is assembled as
//     vol = sigma * cev_mean(F, K) * [zeta / D(zeta)] * (1 + Gamma * eps),
// which is the textbook alpha (F-K)/D(zeta) * (1 + Gamma eps) rewritten with
// zeta = alpha (F-K) / (sigma * cev_mean).  Every factor has a removable
// singularity at the money, handled as follows:
//
//  * cev_mean = (F-K)/J with J = integral_K^F dx/C(x).  The exact J is
//    computed as 2 exp(p S/2) sinh(p L/2)/p  (p = 1-beta, S = log(Fs Ks),
//    L = log(Fs/Ks)), which is stable for any p in (0, 1] and any moneyness;
//    for |u| < 1e-4, u = (F-K)/(Fs+Ks), the even series
//    m^beta / (1 + b(1+b)/6 u^2 + b(1+b)(2+b)(3+b)/120 u^4) is used instead
//    (truncation ~u^6), removing the 0/0 at K == F.
//  * zeta/D(zeta) uses the series 1/(1 + rho z/2) below |z| = 1e-6; the exact
//    branch evaluates D through log1p to avoid cancellation.
//  * Gamma * eps is computed as a polynomial in alpha (the alpha-division in
//    Gamma cancels against eps = alpha^2 tau), so alpha = 0 needs no special
//    casing in the correction term; per the interface contract the alpha = 0
//    vol is defined as the pure CEV mean sigma * cev_mean with no correction.

namespace sabr {

namespace {

void check_domain(double fs, double ks) {
  if (!(fs > 0.0)) throw domain_error("forward + shift must be > 0");
  if (!(ks > 0.0)) throw domain_error("strike + shift must be > 0");
}

double shifted_midpoint(double fs, double ks, MidpointRule rule) {
  return rule == MidpointRule::arithmetic ? 0.5 * (fs + ks) : std::sqrt(fs * ks);
}

// Gamma * eps as a polynomial in alpha; exact for all alpha >= 0.
double gamma_times_eps(double fs, double ks, const SabrParams& p, double tau,
                       MidpointRule rule) {
  const double ms = shifted_midpoint(fs, ks, rule);
  const double g1 = p.beta / ms;
  const double g2 = -p.beta * (1.0 - p.beta) / (ms * ms);
  const double sc = p.sigma * std::pow(ms, p.beta);
  return (2.0 * g2 - g1 * g1) / 24.0 * sc * sc * tau +
         0.25 * p.rho * g1 * sc * p.alpha * tau +
         (2.0 - 3.0 * p.rho * p.rho) / 24.0 * p.alpha * p.alpha * tau;
}

}  // namespace

double backbone(double forward, const SabrParams& p) {
  const double fs = forward + p.shift;
  if (!(fs > 0.0)) throw domain_error("forward + shift must be > 0");
  return std::pow(fs, p.beta);
}

double backbone_slope(double forward, const SabrParams& p) {
  const double fs = forward + p.shift;
  if (!(fs > 0.0)) throw domain_error("forward + shift must be > 0");
  return p.beta * std::pow(fs, p.beta - 1.0);
}

double backbone_curvature(double forward, const SabrParams& p) {
  const double fs = forward + p.shift;
  if (!(fs > 0.0)) throw domain_error("forward + shift must be > 0");
  return p.beta * (p.beta - 1.0) * std::pow(fs, p.beta - 2.0);
}

double cev_mean(double forward, double strike, const SabrParams& p) {
  const double fs = forward + p.shift;
  const double ks = strike + p.shift;
  check_domain(fs, ks);
  const double b = p.beta;
  const double u = (forward - strike) / (fs + ks);
  if (std::fabs(u) < kMoneynessSeriesThreshold) {
    const double m = 0.5 * (fs + ks);
    const double u2 = u * u;
    const double c2 = b * (1.0 + b) / 6.0;
    const double c4 = b * (1.0 + b) * (2.0 + b) * (3.0 + b) / 120.0;
    return std::pow(m, b) / (1.0 + u2 * (c2 + u2 * c4));
  }
  const double pexp = 1.0 - b;
  const double big_l = std::log(fs / ks);
  double j;
  if (pexp <= kBetaOneEpsilon) {
    j = big_l;  // beta == 1
  } else {
    const double big_s = std::log(fs) + std::log(ks);
    j = 2.0 * std::exp(0.5 * pexp * big_s) * std::sinh(0.5 * pexp * big_l) / pexp;
  }
  return (forward - strike) / j;
}

double zeta(double forward, double strike, const SabrParams& p) {
  // alpha/sigma * J, with J recovered from the stabilized mean
  return p.alpha / p.sigma * (forward - strike) / cev_mean(forward, strike, p);
}

double i_func(double z, double rho) { return std::sqrt(1.0 + z * (z - 2.0 * rho)); }

double distance(double z, double rho) {
  if (std::fabs(z) < kZetaSeriesThreshold) return z * (1.0 + 0.5 * rho * z);
  const double i = i_func(z, rho);
  // (I + z - rho)/(1 - rho) = 1 + (I - 1 + z)/(1 - rho), with
  // I - 1 = z(z - 2 rho)/(1 + I) to avoid cancellation near z = 0
  return std::log1p((z * (z - 2.0 * rho) / (1.0 + i) + z) / (1.0 - rho));
}

double zeta_over_distance(double z, double rho) {
  if (std::fabs(z) < kZetaSeriesThreshold) return 1.0 / (1.0 + 0.5 * rho * z);
  return z / distance(z, rho);
}

double gamma_correction(double forward, double strike, const SabrParams& p,
                        MidpointRule rule) {
  if (p.alpha <= 0.0)
    throw degenerate_parameter("gamma_correction requires alpha > 0");
  const double fs = forward + p.shift;
  const double ks = strike + p.shift;
  check_domain(fs, ks);
  const double ms = shifted_midpoint(fs, ks, rule);
  const double g1 = p.beta / ms;
  const double g2 = -p.beta * (1.0 - p.beta) / (ms * ms);
  const double q = p.sigma * std::pow(ms, p.beta) / p.alpha;
  return (2.0 * g2 - g1 * g1) / 24.0 * q * q + 0.25 * p.rho * g1 * q +
         (2.0 - 3.0 * p.rho * p.rho) / 24.0;
}

SmilePoint smile_point(double expiry, double forward, double strike, const SabrParams& p,
                       MidpointRule rule) {
  if (!(expiry > 0.0)) throw invalid_input("expiry must be > 0");
  const double fs = forward + p.shift;
  const double ks = strike + p.shift;
  check_domain(fs, ks);

  SmilePoint pt;
  const double mean = cev_mean(forward, strike, p);
  pt.zeta = p.alpha / p.sigma * (forward - strike) / mean;
  pt.i_of_zeta = i_func(pt.zeta, p.rho);
  pt.distance = distance(pt.zeta, p.rho);
  pt.epsilon = p.alpha * p.alpha * expiry;

  const double zd = zeta_over_distance(pt.zeta, p.rho);
  if (p.alpha > 0.0) {
    pt.gamma_corr = gamma_correction(forward, strike, p, rule);
    pt.implied_vol =
        p.sigma * mean * zd * (1.0 + gamma_times_eps(fs, ks, p, expiry, rule));
  } else {
    pt.gamma_corr = 0.0;
    pt.implied_vol = p.sigma * mean;
  }
  return pt;
}

double implied_normal_vol(double expiry, double forward, double strike,
                          const SabrParams& p, MidpointRule rule) {
  return smile_point(expiry, forward, strike, p, rule).implied_vol;
}

double atm_vol(double forward, const SabrParams& p) {
  return p.sigma * backbone(forward, p);
}

double atm_skew(double forward, const SabrParams& p) {
  return p.sigma * backbone_slope(forward, p);
}

}  // namespace sabr
