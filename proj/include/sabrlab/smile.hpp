#pragma once

#include "sabrlab/types.hpp"

namespace sabr {

// Midpoint convention for the curvature correction term.
enum class MidpointRule { arithmetic, geometric };

// Branch thresholds (see evaluation notes in smile.cpp).
inline constexpr double kZetaSeriesThreshold = 1e-6;
inline constexpr double kMoneynessSeriesThreshold = 1e-4;
// The CEV integral is evaluated through a sinh rewrite that is stable
// uniformly in beta, so the log form is needed only at beta == 1 exactly.
inline constexpr double kBetaOneEpsilon = 0.0;

double backbone(double forward, const SabrParams& p);            // C(F)
double backbone_slope(double forward, const SabrParams& p);      // C'(F)
double backbone_curvature(double forward, const SabrParams& p);  // C''(F)

// (F - K) / integral_K^F dx/C(x), extended continuously to K == F where it
// equals C(F).  Even series in u = (F - K)/(Fs + Ks) near the money.
double cev_mean(double forward, double strike, const SabrParams& p);

// zeta = (alpha/sigma) * integral_K^F dx/C(x)
double zeta(double forward, double strike, const SabrParams& p);

double i_func(double z, double rho);  // sqrt(1 - 2 rho z + z^2)

// D(z) = log((I(z) + z - rho)/(1 - rho)); series z (1 + rho z / 2) for small z.
double distance(double z, double rho);
double zeta_over_distance(double z, double rho);  // -> 1 as z -> 0

// Order-epsilon correction coefficient Gamma evaluated at the midpoint of
// (F, K).  The formula divides by alpha; alpha == 0 raises
// degenerate_parameter (the implied vol bypasses it, see smile.cpp).
double gamma_correction(double forward, double strike, const SabrParams& p,
                        MidpointRule rule = MidpointRule::arithmetic);

struct SmilePoint {
  double zeta = 0.0;
  double i_of_zeta = 1.0;
  double distance = 0.0;
  double gamma_corr = 0.0;  // stored as 0 when alpha == 0 (undefined there)
  double implied_vol = 0.0;
  double epsilon = 0.0;     // expansion parameter alpha^2 * tau
};

// Normal (Bachelier) implied vol of the expansion,
//   vol = alpha (F - K) / D(zeta) * (1 + Gamma * epsilon),
// with the alpha = 0 case defined as the pure CEV mean sigma*(F-K)/J.
// Epsilon is reported but not bounded; callers decide whether epsilon > 1
// deserves a warning.
SmilePoint smile_point(double expiry, double forward, double strike, const SabrParams& p,
                       MidpointRule rule = MidpointRule::arithmetic);
double implied_normal_vol(double expiry, double forward, double strike, const SabrParams& p,
                          MidpointRule rule = MidpointRule::arithmetic);

double atm_vol(double forward, const SabrParams& p);   // sigma * C(F), leading order
double atm_skew(double forward, const SabrParams& p);  // eta = sigma * C'(F)

}  // namespace sabr
