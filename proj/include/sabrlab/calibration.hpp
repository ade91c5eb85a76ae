#pragma once

#include <optional>
#include <vector>

#include "sabrlab/smile.hpp"

namespace sabr {

struct SmileQuote {
  double strike = 0.0;
  double vol = 0.0;  // normal implied vol
};

// One expiry, one forward, a strike ladder of normal implied vols.
struct SmileQuotes {
  double expiry = 0.0;
  double forward = 0.0;
  std::vector<SmileQuote> points;  // strictly ascending strikes

  void validate(double shift, std::size_t min_points) const;
};

struct CalibrationOptions {
  double shift = 0.0;
  std::optional<SabrParams> init;  // default: initial_guess
  bool vega_weighted = false;      // weight squared residuals by bachelier vega
  int multi_starts = 5;            // jittered restarts around the initial point
  int max_evals = 10000;           // per restart
  double ftol = 1e-18;             // simplex collapse: value spread ...
  double xtol = 1e-12;             // ... or diameter in (log, log, atanh) space
};

struct CalibrationResult {
  SabrParams params;
  double rmse = 0.0;  // always the unweighted vol-space rmse
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  bool non_identifiable = false;        // alpha ~ 0: rho unresolved, reported as 0
  std::vector<double> residuals;        // model - market, per quote
};

// Fits (sigma, alpha, rho) with beta and shift held fixed, by simplex search
// on (log sigma, log alpha, atanh rho).  Deterministic for identical inputs.
CalibrationResult calibrate(const SmileQuotes& quotes, double beta,
                            const CalibrationOptions& options = {});

// Moment-style seed: ATM level, slope and curvature of the quoted smile
// mapped through the backbone.  Works from a single quote upward.
SabrParams initial_guess(const SmileQuotes& quotes, double beta, double shift = 0.0);

}  // namespace sabr
