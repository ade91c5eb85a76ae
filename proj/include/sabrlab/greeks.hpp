#pragma once

#include <optional>

#include "sabrlab/bachelier.hpp"
#include "sabrlab/smile.hpp"

namespace sabr {

enum class SensMode { analytic, finite_difference };

// Partials of the implied normal vol in the model state (forward, sigma) and
// in expiry.  Analytic mode carries the leading-order first-order formulas
// only; the second-order fields are populated in finite-difference mode.
struct VolSensitivities {
  double dvol_dF = 0.0;
  double dvol_dsigma = 0.0;
  double dvol_dtau = 0.0;
  std::optional<double> d2vol_dF2;
  std::optional<double> d2vol_dFdsigma;
  std::optional<double> d2vol_dsigma2;
  SensMode mode = SensMode::finite_difference;
};

VolSensitivities vol_sensitivities(double forward, const OptionSpec& option,
                                   const SabrParams& params, SensMode mode);

// Greeks of the composed price P = bachelier(implied vol).  delta_bartlett
// augments the classic delta with the correlated average vol response
// (dsigma = rho alpha / C(F) dF); vega_modified mirrors that on the vol side
// and needs alpha > 0.  theta is dP/dexpiry.  Second-order fields exist only
// in finite-difference mode.
struct GreekReport {
  double price = 0.0;
  double implied_vol = 0.0;
  double delta_classic = 0.0;
  double delta_bartlett = 0.0;
  double vega = 0.0;
  std::optional<double> vega_modified;
  double theta = 0.0;
  std::optional<double> gamma;
  std::optional<double> vanna;
  std::optional<double> volga;
  SensMode mode = SensMode::finite_difference;
};

GreekReport greeks(double forward, const OptionSpec& option, const SabrParams& params,
                   SensMode mode = SensMode::finite_difference);

// Hedge-ratio fast path: both deltas from the first-order sensitivities only,
// skipping the second-order sweep.  Identical values to greeks().
struct DeltaPair {
  double implied_vol = 0.0;
  double classic = 0.0;
  double bartlett = 0.0;
};
DeltaPair hedge_deltas(double forward, const OptionSpec& option, const SabrParams& params);

// Leading-order delta approximations, exact in the joint limit K -> F,
// epsilon -> 0:
//   bartlett: dB/dF + dB/dvol * (sigma C'(F) + rho alpha)/2
//   classic:  dB/dF + dB/dvol * (sigma C'(F) - rho alpha)/2
// with the bachelier partials evaluated at the full implied vol of K.
enum class DeltaKind { classic, bartlett };
double asymptotic_delta(double forward, const OptionSpec& option, const SabrParams& params,
                        DeltaKind kind);

// Orthogonal residuals of a joint (dF, dsigma) move under the model split
// dsigma = rho alpha / C(F) dF + dsigma_perp (and symmetrically for dF).
double sigma_residual(const SabrParams& params, double forward, double dF, double dsigma);
double forward_residual(const SabrParams& params, double forward, double dF, double dsigma);

// Which first-order pairing prices the move: modified delta with plain vega
// on the orthogonal vol residual, or plain delta on the orthogonal forward
// residual with modified vega.  Both are exact regroupings of the same
// differential and must agree.
enum class Decomposition { modified_delta, modified_vega };

// One-step P&L prediction: shared second-order drift bracket times dt plus
// the first-order terms of the chosen decomposition.  Requires second-order
// greeks (finite-difference mode).
double predict_pnl(const GreekReport& report, const SabrParams& params, double forward,
                   double dt, double dF, double dsigma, Decomposition which);

}  // namespace sabr
