#include "sabrlab/greeks.hpp"

#include <algorithm>
#include <cmath>

namespace sabr {

namespace {

struct FdSteps {
  double f = 0.0;
  double sigma = 0.0;
  double tau = 0.0;
};

// Central-difference steps: nominal 1e-4 relative (absolute floors for tiny
// arguments), capped at a quarter of the distance to the domain boundary.
FdSteps fd_steps(double forward, const SabrParams& p, double expiry) {
  FdSteps h;
  h.f = std::min(std::max(1e-7, 1e-4 * std::fabs(forward)), 0.25 * (forward + p.shift));
  h.sigma = std::min(std::max(1e-9, 1e-4 * p.sigma), 0.25 * p.sigma);
  h.tau = std::min(std::max(1e-9, 1e-4 * expiry), 0.25 * expiry);
  return h;
}

double vol_at(double expiry, double forward, double strike, const SabrParams& p,
              double dsigma = 0.0) {
  SabrParams q = p;
  q.sigma += dsigma;
  return implied_normal_vol(expiry, forward, strike, q);
}

struct FirstOrder {
  double vol = 0.0;
  double dF = 0.0;
  double dsigma = 0.0;
};

FirstOrder first_order_fd(double forward, const OptionSpec& o, const SabrParams& p) {
  const FdSteps h = fd_steps(forward, p, o.expiry);
  FirstOrder r;
  r.vol = vol_at(o.expiry, forward, o.strike, p);
  r.dF = (vol_at(o.expiry, forward + h.f, o.strike, p) -
          vol_at(o.expiry, forward - h.f, o.strike, p)) /
         (2.0 * h.f);
  r.dsigma = (vol_at(o.expiry, forward, o.strike, p, h.sigma) -
              vol_at(o.expiry, forward, o.strike, p, -h.sigma)) /
             (2.0 * h.sigma);
  return r;
}

VolSensitivities analytic_sensitivities(double forward, const OptionSpec& o,
                                        const SabrParams& p) {
  const double m = cev_mean(forward, o.strike, p);
  const double dF = forward - o.strike;
  const double z = p.alpha / p.sigma * dF / m;
  const double i = i_func(z, p.rho);
  const double zd = zeta_over_distance(z, p.rho);
  const double c = backbone(forward, p);

  VolSensitivities s;
  s.mode = SensMode::analytic;
  s.dvol_dsigma = m * zd * zd / i;
  const double u = dF / (forward + o.strike + 2.0 * p.shift);
  if (std::fabs(z) >= kZetaSeriesThreshold || std::fabs(u) >= kMoneynessSeriesThreshold) {
    // leading-order alpha/D * (1 - vol0/(sigma C I)); exact at alpha == 0
    s.dvol_dF = p.sigma * m / dF * zd * (1.0 - m * zd / (c * i));
  } else {
    // removable-singularity limit, valid through K == F
    s.dvol_dF = zd * (0.5 * p.sigma * m * backbone_slope(forward, p) / c -
                      0.5 * p.rho * p.alpha);
  }
  s.dvol_dtau = p.alpha > 0.0
                    ? p.sigma * m * zd * gamma_correction(forward, o.strike, p) *
                          p.alpha * p.alpha
                    : 0.0;
  return s;
}

VolSensitivities finite_difference_sensitivities(double forward, const OptionSpec& o,
                                                 const SabrParams& p) {
  const FdSteps h = fd_steps(forward, p, o.expiry);
  const FirstOrder first = first_order_fd(forward, o, p);

  VolSensitivities s;
  s.mode = SensMode::finite_difference;
  s.dvol_dF = first.dF;
  s.dvol_dsigma = first.dsigma;
  s.dvol_dtau = (vol_at(o.expiry + h.tau, forward, o.strike, p) -
                 vol_at(o.expiry - h.tau, forward, o.strike, p)) /
                (2.0 * h.tau);

  // Second-order steps 10x the first-order ones: the quotient divides the
  // vol's own rounding noise by H^2, so a larger H buys accuracy here.
  const double hf = std::min(10.0 * h.f, 0.25 * (forward + p.shift));
  const double hs = std::min(10.0 * h.sigma, 0.25 * p.sigma);
  const double v0 = first.vol;
  s.d2vol_dF2 = (vol_at(o.expiry, forward + hf, o.strike, p) - 2.0 * v0 +
                 vol_at(o.expiry, forward - hf, o.strike, p)) /
                (hf * hf);
  s.d2vol_dsigma2 = (vol_at(o.expiry, forward, o.strike, p, hs) - 2.0 * v0 +
                     vol_at(o.expiry, forward, o.strike, p, -hs)) /
                    (hs * hs);
  s.d2vol_dFdsigma = (vol_at(o.expiry, forward + hf, o.strike, p, hs) -
                      vol_at(o.expiry, forward + hf, o.strike, p, -hs) -
                      vol_at(o.expiry, forward - hf, o.strike, p, hs) +
                      vol_at(o.expiry, forward - hf, o.strike, p, -hs)) /
                     (4.0 * hf * hs);
  return s;
}

}  // namespace

VolSensitivities vol_sensitivities(double forward, const OptionSpec& option,
                                   const SabrParams& params, SensMode mode) {
  params.validate();
  return mode == SensMode::analytic
             ? analytic_sensitivities(forward, option, params)
             : finite_difference_sensitivities(forward, option, params);
}

GreekReport greeks(double forward, const OptionSpec& option, const SabrParams& params,
                   SensMode mode) {
  const VolSensitivities s = vol_sensitivities(forward, option, params, mode);
  const double vol = implied_normal_vol(option.expiry, forward, option.strike, params);
  const BsGreeks b =
      bachelier_greeks(BachelierInputs(option.expiry, forward, option.strike, vol, option.kind));
  const double c = backbone(forward, params);

  GreekReport g;
  g.mode = mode;
  g.price = b.price;
  g.implied_vol = vol;
  g.delta_classic = b.delta + b.vega * s.dvol_dF;
  g.vega = b.vega * s.dvol_dsigma;
  g.delta_bartlett = g.delta_classic + g.vega * params.rho * params.alpha / c;
  g.theta = b.theta + b.vega * s.dvol_dtau;
  if (params.alpha > 0.0)
    g.vega_modified = g.vega + g.delta_classic * params.rho * c / params.alpha;
  if (mode == SensMode::finite_difference) {
    g.gamma = b.gamma + 2.0 * b.vanna * s.dvol_dF + b.volga * s.dvol_dF * s.dvol_dF +
              b.vega * *s.d2vol_dF2;
    g.vanna = b.vanna * s.dvol_dsigma + b.volga * s.dvol_dF * s.dvol_dsigma +
              b.vega * *s.d2vol_dFdsigma;
    g.volga = b.volga * s.dvol_dsigma * s.dvol_dsigma + b.vega * *s.d2vol_dsigma2;
  }
  return g;
}

DeltaPair hedge_deltas(double forward, const OptionSpec& option, const SabrParams& params) {
  const FirstOrder f = first_order_fd(forward, option, params);
  const double rt = std::sqrt(option.expiry);
  const double s = f.vol * rt;
  const double d = (forward - option.strike) / s;
  const double vega = rt * normal_pdf(d);
  const double delta =
      option.kind == OptionKind::call ? normal_cdf(d) : -normal_cdf(-d);

  DeltaPair out;
  out.implied_vol = f.vol;
  out.classic = delta + vega * f.dF;
  out.bartlett = out.classic + vega * f.dsigma * params.rho * params.alpha /
                                   backbone(forward, params);
  return out;
}

double asymptotic_delta(double forward, const OptionSpec& option, const SabrParams& params,
                        DeltaKind kind) {
  const double vol = implied_normal_vol(option.expiry, forward, option.strike, params);
  const BsGreeks b =
      bachelier_greeks(BachelierInputs(option.expiry, forward, option.strike, vol, option.kind));
  const double eta = params.sigma * backbone_slope(forward, params);
  const double signed_alpha =
      kind == DeltaKind::bartlett ? params.rho * params.alpha : -params.rho * params.alpha;
  return b.delta + b.vega * 0.5 * (eta + signed_alpha);
}

double sigma_residual(const SabrParams& params, double forward, double dF, double dsigma) {
  return dsigma - params.rho * params.alpha / backbone(forward, params) * dF;
}

double forward_residual(const SabrParams& params, double forward, double dF, double dsigma) {
  if (!(params.alpha > 0.0))
    throw degenerate_parameter("forward residual requires alpha > 0");
  return dF - params.rho * backbone(forward, params) / params.alpha * dsigma;
}

double predict_pnl(const GreekReport& report, const SabrParams& params, double forward,
                   double dt, double dF, double dsigma, Decomposition which) {
  if (!(dt >= 0.0)) throw invalid_input("predict_pnl needs dt >= 0");
  if (!report.gamma || !report.vanna || !report.volga)
    throw unavailable_field("predict_pnl needs second-order greeks (finite-difference mode)");
  const double c = backbone(forward, params);
  const double drift =
      -report.theta +
      0.5 * params.sigma * params.sigma *
          (c * c * *report.gamma + 2.0 * params.rho * params.alpha * c * *report.vanna +
           params.alpha * params.alpha * *report.volga);
  if (which == Decomposition::modified_delta) {
    return drift * dt + report.delta_bartlett * dF +
           report.vega * sigma_residual(params, forward, dF, dsigma);
  }
  if (!report.vega_modified)
    throw degenerate_parameter("modified-vega decomposition requires alpha > 0");
  return drift * dt + report.delta_classic * forward_residual(params, forward, dF, dsigma) +
         *report.vega_modified * dsigma;
}

}  // namespace sabr
