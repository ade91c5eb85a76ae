#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sabrlab/calibration.hpp"
#include "sabrlab/greeks.hpp"

namespace sabr {

// Caps worker threads for path-sliced loops (0 = hardware concurrency).
// Results are identical under any cap: threads own disjoint path slices and
// reductions run in fixed path order.
void set_thread_cap(unsigned cap);
unsigned thread_cap();

struct SimConfig {
  int64_t n_paths = 0;
  int64_t n_steps = 0;   // over the whole horizon
  double horizon = 0.0;  // years
  uint64_t seed = 0;
  void validate() const;
};

// Flat row-major state: entry(path, step) = data[path * (n_steps + 1) + step].
struct PathSet {
  int64_t n_paths = 0;
  int64_t n_steps = 0;
  double dt = 0.0;
  std::vector<double> times;         // n_steps + 1 entries
  std::vector<double> forwards;      // n_paths x (n_steps + 1)
  std::vector<double> sigmas;        // n_paths x (n_steps + 1)
  std::vector<int32_t> absorbed_at;  // step at which the forward froze, or -1

  double forward_at(int64_t path, int64_t step) const {
    return forwards[std::size_t(path * (n_steps + 1) + step)];
  }
  double sigma_at(int64_t path, int64_t step) const {
    return sigmas[std::size_t(path * (n_steps + 1) + step)];
  }
  bool absorbed_by(int64_t path, int64_t step) const {
    return absorbed_at[std::size_t(path)] >= 0 && absorbed_at[std::size_t(path)] <= step;
  }
};

// Euler forward step with absorption at the shifted-zero boundary; exact
// lognormal sigma step.  path_offset shifts the RNG path index so chunked
// runs reproduce one big run bit-for-bit.
PathSet simulate(const SabrParams& params, double f0, const SimConfig& config,
                 int64_t path_offset = 0);

enum class HedgeStrategy { classic, bartlett, bachelier };
std::string to_string(HedgeStrategy strategy);

struct HedgeConfig {
  OptionSpec option{};          // expiry must lie on the simulation grid
  SabrParams true_params;       // generates paths / drives sigma recalibration
  SabrParams hedger_params;     // possibly a misspecified beta
  int64_t rebalance_steps = 1;  // grid steps between delta refreshes
  // Hedger maps the observed sigma_t into its own parameterization by
  // matching the ATM backbone level: sigma_h = sigma_t C_true(F)/C_hedger(F).
  bool recalibrate_sigma = true;
};

struct HedgeStats {
  std::string strategy;
  double mean_pnl = 0.0;
  double pnl_std = 0.0;
  double pnl_mae = 0.0;
  int64_t n_paths = 0;
  int64_t rebalance_steps = 1;
};

// Short one option at the hedger's implied vol, hold the strategy delta in
// forwards, zero financing.  All strategies share the PathSet (common random
// numbers).
std::vector<double> hedge_pnls(const PathSet& paths, const HedgeConfig& config,
                               HedgeStrategy strategy);
HedgeStats hedge_backtest(const PathSet& paths, const HedgeConfig& config,
                          HedgeStrategy strategy);
HedgeStats hedge_backtest(const OptionSpec& option, const SabrParams& true_params,
                          const SabrParams& hedger_params, HedgeStrategy strategy,
                          int64_t rebalance_steps, double f0, const SimConfig& config);

// Per-beta calibration to one reference smile plus both delta curves on a
// strike grid (expiry and forward taken from the smile).
struct BetaSweepLeg {
  double beta = 0.0;
  CalibrationResult fit;
  std::vector<double> delta_classic;
  std::vector<double> delta_bartlett;
};
struct BetaSweepResult {
  std::vector<double> strikes;
  std::vector<BetaSweepLeg> legs;
};
BetaSweepResult beta_sweep(const SmileQuotes& smile, const std::vector<double>& betas,
                           const std::vector<double>& strikes, double shift = 0.0);

struct RegressionResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_std_error = 0.0;
  int64_t n_observations = 0;
};

// OLS of dsigma on x = rho alpha / C(F_t) dF over simulated increments; the
// model's own dsigma split makes the population slope 1 and R^2 = rho^2.
// window = 0 pools every step; otherwise only the most recent `window` steps
// of each path enter.  Increments after absorption are excluded.
RegressionResult regression_experiment(const SabrParams& params, double f0,
                                       const SimConfig& config, int64_t window = 0);

struct McPrice {
  double price = 0.0;
  double std_error = 0.0;
  int64_t n_paths = 0;
};

// Expected payoff under the simulated dynamics (zero rates).  Paths are
// simulated in batches of batch_paths via path_offset, so memory stays flat
// and the result is independent of the batch size.
std::vector<McPrice> mc_option_prices(const SabrParams& params, double f0,
                                      const std::vector<OptionSpec>& options,
                                      const SimConfig& config, int64_t batch_paths = 10000);
McPrice mc_option_price(const SabrParams& params, double f0, const OptionSpec& option,
                        const SimConfig& config, int64_t batch_paths = 10000);

// Bootstrap standard errors for hedging-gap significance: resample paths,
// recompute the standard deviation (or the paired difference of two
// strategies' standard deviations) per replicate.
double bootstrap_std_error_of_std(const std::vector<double>& sample, int n_resamples,
                                  uint64_t seed);
double paired_bootstrap_std_gap_se(const std::vector<double>& a, const std::vector<double>& b,
                                   int n_resamples, uint64_t seed);

}  // namespace sabr
