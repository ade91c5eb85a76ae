#include "sabrlab/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "sabrlab/bachelier.hpp"
#include "sabrlab/nelder_mead.hpp"
#include "sabrlab/philox.hpp"

namespace sabr {

namespace {

constexpr uint64_t kJitterSeed = 0x5ab0ca11b5eedULL;  // fixed: calibrate stays deterministic
constexpr double kAlphaIdentifiable = 1e-6;

// Unconstrained search space: x = (log sigma, log alpha, atanh rho).
std::array<double, 3> to_search_space(const SabrParams& p) {
  const double alpha = std::max(p.alpha, 1e-3);  // keep log finite for degenerate seeds
  const double rho = std::clamp(p.rho, -0.999, 0.999);
  return {std::log(p.sigma), std::log(alpha), std::atanh(rho)};
}

SabrParams from_search_space(const std::array<double, 3>& x, double beta, double shift) {
  SabrParams p;
  p.sigma = std::exp(x[0]);
  p.alpha = std::exp(x[1]);
  p.rho = std::tanh(std::clamp(x[2], -18.0, 18.0));  // tanh(18) < 1 in double
  p.beta = beta;
  p.shift = shift;
  return p;
}

double quote_vol_interpolated(const SmileQuotes& q, double at_strike) {
  const auto& pts = q.points;
  if (at_strike <= pts.front().strike) return pts.front().vol;
  if (at_strike >= pts.back().strike) return pts.back().vol;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (at_strike <= pts[i].strike) {
      const double w = (at_strike - pts[i - 1].strike) / (pts[i].strike - pts[i - 1].strike);
      return (1.0 - w) * pts[i - 1].vol + w * pts[i].vol;
    }
  }
  return pts.back().vol;
}

}  // namespace

void SmileQuotes::validate(double shift, std::size_t min_points) const {
  if (!(expiry > 0.0)) throw invalid_input("quotes expiry must be > 0");
  if (!(forward + shift > 0.0)) throw invalid_input("quotes forward + shift must be > 0");
  if (points.size() < min_points)
    throw invalid_input("need at least " + std::to_string(min_points) + " quotes");
  double prev = -1e300;
  for (const auto& pt : points) {
    if (!(pt.strike + shift > 0.0)) throw invalid_input("quote strike + shift must be > 0");
    if (!(pt.strike > prev)) throw invalid_input("quote strikes must be strictly ascending");
    if (!(pt.vol > 0.0)) throw invalid_input("quote vols must be > 0");
    prev = pt.strike;
  }
}

SabrParams initial_guess(const SmileQuotes& quotes, double beta, double shift) {
  quotes.validate(shift, 1);
  if (!(beta >= 0.0 && beta <= 1.0)) throw invalid_input("beta must lie in [0, 1]");

  SabrParams probe;
  probe.sigma = 1.0;
  probe.beta = beta;
  probe.shift = shift;
  const double c = backbone(quotes.forward, probe);
  const double vol_atm = quote_vol_interpolated(quotes, quotes.forward);
  const double sigma0 = vol_atm / c;

  double alpha0 = 0.3;
  double rho0 = 0.0;
  if (quotes.points.size() >= 3) {
    // ATM slope and curvature from the three quotes nearest the forward.
    const auto& pts = quotes.points;
    std::size_t j = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
      if (std::fabs(pts[i].strike - quotes.forward) < std::fabs(pts[j].strike - quotes.forward))
        j = i;
    j = std::clamp<std::size_t>(j, 1, pts.size() - 2);
    const double dl = pts[j].strike - pts[j - 1].strike;
    const double dr = pts[j + 1].strike - pts[j].strike;
    const double slope = (pts[j + 1].vol - pts[j - 1].vol) / (dl + dr);
    const double curv =
        2.0 * ((pts[j + 1].vol - pts[j].vol) / dr - (pts[j].vol - pts[j - 1].vol) / dl) /
        (dl + dr);

    // Smile curvature beyond the backbone's own sets the vol-of-vol scale;
    // the ATM slope in excess of the backbone slope sets the correlation.
    probe.sigma = sigma0;
    const double excess_curv = curv - sigma0 * backbone_curvature(quotes.forward, probe) / 4.0;
    alpha0 = std::clamp(std::sqrt(3.0 * vol_atm * std::max(excess_curv, 1e-8)), 0.05, 2.0);
    rho0 = std::clamp((2.0 * slope - sigma0 * backbone_slope(quotes.forward, probe)) / alpha0,
                      -0.9, 0.9);
  }
  return SabrParams(sigma0, alpha0, beta, rho0, shift);
}

CalibrationResult calibrate(const SmileQuotes& quotes, double beta,
                            const CalibrationOptions& options) {
  quotes.validate(options.shift, 3);
  if (!(beta >= 0.0 && beta <= 1.0)) throw invalid_input("beta must lie in [0, 1]");

  const std::size_t n = quotes.points.size();
  std::vector<double> weights(n, 1.0);
  if (options.vega_weighted) {
    const double rt = std::sqrt(quotes.expiry);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& pt = quotes.points[i];
      weights[i] = rt * normal_pdf((quotes.forward - pt.strike) / (pt.vol * rt));
    }
  }
  double weight_sum = 0.0;
  for (double w : weights) weight_sum += w;

  const auto rmse_at = [&](const SabrParams& p, const std::vector<double>& w,
                           double wsum) -> double {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r =
          implied_normal_vol(quotes.expiry, quotes.forward, quotes.points[i].strike, p) -
          quotes.points[i].vol;
      acc += w[i] * r * r;
    }
    const double value = std::sqrt(acc / wsum);
    return std::isfinite(value) ? value : 1e100;
  };
  const auto objective = [&](const std::array<double, 3>& x) {
    return rmse_at(from_search_space(x, beta, options.shift), weights, weight_sum);
  };

  SabrParams init = options.init.value_or(initial_guess(quotes, beta, options.shift));
  init.beta = beta;
  init.shift = options.shift;
  const std::array<double, 3> x0 = to_search_space(init);

  SimplexOptions simplex;
  simplex.max_evals = options.max_evals;
  simplex.ftol = options.ftol;
  simplex.xtol = options.xtol;

  CalibrationResult out;
  bool have_best = false;
  SimplexResult best;
  double best_alpha = 0.0;
  for (int leg = 0; leg < std::max(options.multi_starts, 1); ++leg) {
    std::array<double, 3> x = x0;
    if (leg > 0) {
      const auto z01 = path_step_normals(kJitterSeed, uint64_t(leg), 0, kStreamCalibration);
      const auto z2 = path_step_normals(kJitterSeed, uint64_t(leg), 1, kStreamCalibration);
      x[0] += 0.35 * z01[0];
      x[1] += 0.35 * z01[1];
      x[2] += 0.35 * z2[0];
    }
    const SimplexResult leg_result = nelder_mead3(objective, x, simplex);
    out.iterations += leg_result.iterations;
    out.evaluations += leg_result.evaluations;
    const double leg_alpha = from_search_space(leg_result.x, beta, options.shift).alpha;
    if (!have_best || leg_result.value < best.value ||
        (leg_result.value == best.value && leg_alpha < best_alpha)) {
      have_best = true;
      best = leg_result;
      best_alpha = leg_alpha;
    }
  }

  out.params = from_search_space(best.x, beta, options.shift);
  out.converged = best.converged;
  if (out.params.alpha < kAlphaIdentifiable) {
    out.non_identifiable = true;
    out.params.rho = 0.0;  // correlation has no effect without vol-of-vol
  }
  out.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.residuals[i] =
        implied_normal_vol(quotes.expiry, quotes.forward, quotes.points[i].strike, out.params) -
        quotes.points[i].vol;
  }
  const std::vector<double> unit(n, 1.0);
  out.rmse = rmse_at(out.params, unit, double(n));
  return out;
}

}  // namespace sabr
