#include "sabrlab/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "sabrlab/bachelier.hpp"
#include "sabrlab/philox.hpp"

namespace sabr {

namespace {

std::atomic<unsigned> g_thread_cap{0};

// Runs work(begin, end) over disjoint contiguous path slices.  Callers make
// per-path writes only, so results cannot depend on the worker count.
void parallel_over_paths(int64_t n, const std::function<void(int64_t, int64_t)>& work) {
  const unsigned cap = thread_cap();
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      unsigned(std::min<int64_t>(n, cap == 0 ? hw : std::min(cap, hw)));
  if (workers <= 1) {
    work(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const int64_t begin = n * w / workers;
    const int64_t end = n * (w + 1) / workers;
    pool.emplace_back(work, begin, end);
  }
  for (auto& t : pool) t.join();
}

double shifted_pow(double fs, double beta) {
  if (beta == 0.0) return 1.0;
  if (beta == 1.0) return fs;
  if (beta == 0.5) return std::sqrt(fs);
  return std::pow(fs, beta);
}

double payoff(double forward, double strike, OptionKind kind) {
  const double s = kind == OptionKind::call ? forward - strike : strike - forward;
  return std::max(s, 0.0);
}

double sample_mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / double(v.size());
}

double sample_std(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / double(v.size() - 1));
}

// Maps an option expiry to its simulation-grid step.
int64_t expiry_step_on_grid(const PathSet& paths, double expiry) {
  const int64_t step = llround(expiry / paths.dt);
  if (step < 1 || step > paths.n_steps ||
      std::fabs(step * paths.dt - expiry) > 1e-9 * std::max(1.0, expiry))
    throw invalid_input("option expiry must lie on the simulation time grid");
  return step;
}

// Hedger's view of the current state: its own sigma, optionally re-anchored
// to the observed instantaneous vol through the backbone ratio.
double hedger_sigma(const HedgeConfig& cfg, double observed_sigma, double forward) {
  if (!cfg.recalibrate_sigma) return cfg.hedger_params.sigma;
  const double fs_true = forward + cfg.true_params.shift;
  const double fs_hedge = forward + cfg.hedger_params.shift;
  const double mapped = observed_sigma * shifted_pow(fs_true, cfg.true_params.beta) /
                        shifted_pow(fs_hedge, cfg.hedger_params.beta);
  return std::max(mapped, 1e-12);
}

double strategy_delta(HedgeStrategy strategy, double forward, const OptionSpec& option,
                      const SabrParams& hedger) {
  if (strategy == HedgeStrategy::bachelier) {
    const double vol = implied_normal_vol(option.expiry, forward, option.strike, hedger);
    const double d = (forward - option.strike) / (vol * std::sqrt(option.expiry));
    return option.kind == OptionKind::call ? normal_cdf(d) : -normal_cdf(-d);
  }
  const DeltaPair deltas = hedge_deltas(forward, option, hedger);
  return strategy == HedgeStrategy::classic ? deltas.classic : deltas.bartlett;
}

// Shared bootstrap core: per replicate, resample path indices (common across
// both series) and evaluate the statistic.
template <typename Stat>
double bootstrap_se(std::size_t n, int n_resamples, uint64_t seed, const Stat& stat) {
  if (n < 2) throw invalid_input("bootstrap needs at least 2 observations");
  if (n_resamples < 2) throw invalid_input("bootstrap needs at least 2 resamples");
  std::vector<double> values(std::size_t(n_resamples), 0.0);
  std::vector<std::size_t> idx(n);
  for (int rep = 0; rep < n_resamples; ++rep) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto pair = random_u64_pair(seed, uint64_t(rep), uint64_t(i >> 1), kStreamBootstrap);
      idx[i] = std::size_t(pair[i & 1] % n);
    }
    values[std::size_t(rep)] = stat(idx);
  }
  return sample_std(values);
}

}  // namespace

void set_thread_cap(unsigned cap) { g_thread_cap.store(cap); }
unsigned thread_cap() { return g_thread_cap.load(); }

void SimConfig::validate() const {
  if (n_paths < 1) throw invalid_input("n_paths must be >= 1");
  if (n_steps < 1) throw invalid_input("n_steps must be >= 1");
  if (!(horizon > 0.0)) throw invalid_input("horizon must be > 0");
}

PathSet simulate(const SabrParams& params, double f0, const SimConfig& config,
                 int64_t path_offset) {
  params.validate();
  config.validate();
  if (!(f0 + params.shift > 0.0)) throw domain_error("f0 + shift must be > 0");

  PathSet ps;
  ps.n_paths = config.n_paths;
  ps.n_steps = config.n_steps;
  ps.dt = config.horizon / double(config.n_steps);
  ps.times.resize(std::size_t(config.n_steps + 1));
  for (int64_t i = 0; i <= config.n_steps; ++i) ps.times[std::size_t(i)] = double(i) * ps.dt;
  ps.forwards.resize(std::size_t(config.n_paths * (config.n_steps + 1)));
  ps.sigmas.resize(ps.forwards.size());
  ps.absorbed_at.assign(std::size_t(config.n_paths), -1);

  const double sqrth = std::sqrt(ps.dt);
  const double rho_perp = std::sqrt(1.0 - params.rho * params.rho);
  const double sigma_drift = -0.5 * params.alpha * params.alpha * ps.dt;

  parallel_over_paths(config.n_paths, [&](int64_t begin, int64_t end) {
    for (int64_t p = begin; p < end; ++p) {
      double* frow = ps.forwards.data() + p * (config.n_steps + 1);
      double* srow = ps.sigmas.data() + p * (config.n_steps + 1);
      double f = f0;
      double sig = params.sigma;
      int32_t absorbed = -1;
      frow[0] = f;
      srow[0] = sig;
      for (int64_t s = 0; s < config.n_steps; ++s) {
        const auto [w1, w2] =
            path_step_normals(config.seed, uint64_t(p + path_offset), uint64_t(s), kStreamPaths);
        if (absorbed < 0) {
          const double c = shifted_pow(f + params.shift, params.beta);
          double fn = f + sig * c * sqrth * w1;
          if (fn + params.shift <= 0.0) {  // Euler overshoot: clamp and freeze
            fn = -params.shift;
            absorbed = int32_t(s + 1);
          }
          f = fn;
        }
        sig *= std::exp(params.alpha * sqrth * (params.rho * w1 + rho_perp * w2) + sigma_drift);
        frow[s + 1] = f;
        srow[s + 1] = sig;
      }
      ps.absorbed_at[std::size_t(p)] = absorbed;
    }
  });
  return ps;
}

std::string to_string(HedgeStrategy strategy) {
  switch (strategy) {
    case HedgeStrategy::classic: return "classic";
    case HedgeStrategy::bartlett: return "bartlett";
    case HedgeStrategy::bachelier: return "bachelier";
  }
  return "unknown";
}

std::vector<double> hedge_pnls(const PathSet& paths, const HedgeConfig& cfg,
                               HedgeStrategy strategy) {
  cfg.true_params.validate();
  cfg.hedger_params.validate();
  if (cfg.rebalance_steps < 1) throw invalid_input("rebalance_steps must be >= 1");
  const int64_t expiry_step = expiry_step_on_grid(paths, cfg.option.expiry);

  std::vector<double> pnls(std::size_t(paths.n_paths));
  parallel_over_paths(paths.n_paths, [&](int64_t begin, int64_t end) {
    for (int64_t p = begin; p < end; ++p) {
      SabrParams hedger = cfg.hedger_params;
      hedger.sigma = hedger_sigma(cfg, paths.sigma_at(p, 0), paths.forward_at(p, 0));
      const double premium = bachelier_price(BachelierInputs(
          cfg.option.expiry, paths.forward_at(p, 0), cfg.option.strike,
          implied_normal_vol(cfg.option.expiry, paths.forward_at(p, 0), cfg.option.strike,
                             hedger),
          cfg.option.kind));

      double account = 0.0;
      double delta = 0.0;
      for (int64_t s = 0; s < expiry_step; s += cfg.rebalance_steps) {
        const double f = paths.forward_at(p, s);
        if (!paths.absorbed_by(p, s)) {  // frozen forward: keep the last delta
          hedger.sigma = hedger_sigma(cfg, paths.sigma_at(p, s), f);
          const OptionSpec remaining{cfg.option.strike,
                                     paths.times[std::size_t(expiry_step)] -
                                         paths.times[std::size_t(s)],
                                     cfg.option.kind};
          delta = strategy_delta(strategy, f, remaining, hedger);
        }
        const int64_t next = std::min(s + cfg.rebalance_steps, expiry_step);
        account += delta * (paths.forward_at(p, next) - f);
      }
      const double terminal = paths.forward_at(p, expiry_step);
      pnls[std::size_t(p)] =
          premium + account - payoff(terminal, cfg.option.strike, cfg.option.kind);
    }
  });
  return pnls;
}

HedgeStats hedge_backtest(const PathSet& paths, const HedgeConfig& cfg,
                          HedgeStrategy strategy) {
  const std::vector<double> pnls = hedge_pnls(paths, cfg, strategy);
  HedgeStats stats;
  stats.strategy = to_string(strategy);
  stats.n_paths = paths.n_paths;
  stats.rebalance_steps = cfg.rebalance_steps;
  stats.mean_pnl = sample_mean(pnls);
  stats.pnl_std = paths.n_paths > 1 ? sample_std(pnls) : 0.0;
  double mae = 0.0;
  for (double x : pnls) mae += std::fabs(x);
  stats.pnl_mae = mae / double(pnls.size());
  return stats;
}

HedgeStats hedge_backtest(const OptionSpec& option, const SabrParams& true_params,
                          const SabrParams& hedger_params, HedgeStrategy strategy,
                          int64_t rebalance_steps, double f0, const SimConfig& config) {
  const PathSet paths = simulate(true_params, f0, config);
  HedgeConfig cfg;
  cfg.option = option;
  cfg.true_params = true_params;
  cfg.hedger_params = hedger_params;
  cfg.rebalance_steps = rebalance_steps;
  return hedge_backtest(paths, cfg, strategy);
}

BetaSweepResult beta_sweep(const SmileQuotes& smile, const std::vector<double>& betas,
                           const std::vector<double>& strikes, double shift) {
  if (betas.empty()) throw invalid_input("beta sweep needs at least one beta");
  if (strikes.empty()) throw invalid_input("beta sweep needs a strike grid");

  BetaSweepResult out;
  out.strikes = strikes;
  out.legs.reserve(betas.size());
  CalibrationOptions opts;
  opts.shift = shift;
  for (double beta : betas) {
    BetaSweepLeg leg;
    leg.beta = beta;
    leg.fit = calibrate(smile, beta, opts);
    leg.delta_classic.reserve(strikes.size());
    leg.delta_bartlett.reserve(strikes.size());
    for (double strike : strikes) {
      const OptionSpec option{strike, smile.expiry, OptionKind::call};
      const GreekReport report = greeks(smile.forward, option, leg.fit.params);
      leg.delta_classic.push_back(report.delta_classic);
      leg.delta_bartlett.push_back(report.delta_bartlett);
    }
    out.legs.push_back(std::move(leg));
  }
  return out;
}

RegressionResult regression_experiment(const SabrParams& params, double f0,
                                       const SimConfig& config, int64_t window) {
  if (window < 0) throw invalid_input("window must be >= 0");
  const PathSet paths = simulate(params, f0, config);
  const int64_t first_step =
      window == 0 ? 0 : std::max<int64_t>(0, config.n_steps - window);

  std::vector<double> xs, ys;
  xs.reserve(std::size_t(config.n_paths * (config.n_steps - first_step)));
  ys.reserve(xs.capacity());
  for (int64_t p = 0; p < config.n_paths; ++p) {
    for (int64_t s = first_step; s < config.n_steps; ++s) {
      if (paths.absorbed_by(p, s + 1)) continue;  // frozen forwards carry no signal
      const double f = paths.forward_at(p, s);
      const double c = shifted_pow(f + params.shift, params.beta);
      xs.push_back(params.rho * params.alpha / c * (paths.forward_at(p, s + 1) - f));
      ys.push_back(paths.sigma_at(p, s + 1) - paths.sigma_at(p, s));
    }
  }

  const int64_t n = int64_t(xs.size());
  if (n < 30) throw invalid_input("regression needs at least 30 increments");

  double mx = 0.0, my = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    mx += xs[std::size_t(i)];
    my += ys[std::size_t(i)];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const double dx = xs[std::size_t(i)] - mx;
    const double dy = ys[std::size_t(i)] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }

  RegressionResult res;
  res.n_observations = n;
  if (sxx == 0.0) {  // degenerate regressor (rho or alpha is 0)
    res.intercept = my;
    res.slope_std_error = std::numeric_limits<double>::infinity();
    return res;
  }
  res.slope = sxy / sxx;
  res.intercept = my - res.slope * mx;
  const double rss = std::max(syy - res.slope * sxy, 0.0);
  res.r_squared = syy > 0.0 ? 1.0 - rss / syy : 0.0;
  res.slope_std_error = std::sqrt(rss / double(n - 2) / sxx);
  return res;
}

std::vector<McPrice> mc_option_prices(const SabrParams& params, double f0,
                                      const std::vector<OptionSpec>& options,
                                      const SimConfig& config, int64_t batch_paths) {
  config.validate();
  if (options.empty()) throw invalid_input("mc pricing needs at least one option");
  if (batch_paths < 1) throw invalid_input("batch_paths must be >= 1");

  std::vector<double> sums(options.size(), 0.0);
  std::vector<double> sumsqs(options.size(), 0.0);
  for (int64_t start = 0; start < config.n_paths; start += batch_paths) {
    SimConfig batch = config;
    batch.n_paths = std::min(batch_paths, config.n_paths - start);
    const PathSet paths = simulate(params, f0, batch, start);
    std::vector<int64_t> steps(options.size());
    for (std::size_t o = 0; o < options.size(); ++o)
      steps[o] = expiry_step_on_grid(paths, options[o].expiry);
    for (int64_t p = 0; p < batch.n_paths; ++p) {
      for (std::size_t o = 0; o < options.size(); ++o) {
        const double v =
            payoff(paths.forward_at(p, steps[o]), options[o].strike, options[o].kind);
        sums[o] += v;
        sumsqs[o] += v * v;
      }
    }
  }

  std::vector<McPrice> out(options.size());
  const double n = double(config.n_paths);
  for (std::size_t o = 0; o < options.size(); ++o) {
    out[o].n_paths = config.n_paths;
    out[o].price = sums[o] / n;
    const double var = std::max(sumsqs[o] / n - out[o].price * out[o].price, 0.0);
    out[o].std_error = std::sqrt(var / std::max(n - 1.0, 1.0));
  }
  return out;
}

McPrice mc_option_price(const SabrParams& params, double f0, const OptionSpec& option,
                        const SimConfig& config, int64_t batch_paths) {
  return mc_option_prices(params, f0, {option}, config, batch_paths)[0];
}

double bootstrap_std_error_of_std(const std::vector<double>& sample, int n_resamples,
                                  uint64_t seed) {
  return bootstrap_se(sample.size(), n_resamples, seed, [&](const std::vector<std::size_t>& idx) {
    double m = 0.0;
    for (std::size_t i : idx) m += sample[i];
    m /= double(idx.size());
    double acc = 0.0;
    for (std::size_t i : idx) acc += (sample[i] - m) * (sample[i] - m);
    return std::sqrt(acc / double(idx.size() - 1));
  });
}

double paired_bootstrap_std_gap_se(const std::vector<double>& a, const std::vector<double>& b,
                                   int n_resamples, uint64_t seed) {
  if (a.size() != b.size())
    throw invalid_input("paired bootstrap needs equally sized samples");
  return bootstrap_se(a.size(), n_resamples, seed, [&](const std::vector<std::size_t>& idx) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t i : idx) {
      ma += a[i];
      mb += b[i];
    }
    ma /= double(idx.size());
    mb /= double(idx.size());
    double va = 0.0, vb = 0.0;
    for (std::size_t i : idx) {
      va += (a[i] - ma) * (a[i] - ma);
      vb += (b[i] - mb) * (b[i] - mb);
    }
    const double denom = double(idx.size() - 1);
    return std::sqrt(va / denom) - std::sqrt(vb / denom);
  });
}

}  // namespace sabr
