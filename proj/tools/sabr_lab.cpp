// sabr-lab: command-line front end for the smile, greeks, calibration and
// Monte Carlo hedging library.  All numerics live in the library; this file
// is flag parsing, file I/O and formatting only.

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sabrlab/bachelier.hpp"
#include "sabrlab/calibration.hpp"
#include "sabrlab/greeks.hpp"
#include "sabrlab/mc.hpp"
#include "sabrlab/smile.hpp"
#include "sabrlab/version.hpp"

using nlohmann::json;

namespace {

constexpr int kOkExit = 0;
constexpr int kValidationExit = 2;
constexpr int kNoConvergenceExit = 3;
constexpr int kIoExit = 4;

// Filesystem problems (anything else user-facing maps to validation).
struct io_error : std::runtime_error {
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Shortest round-trip decimal form; locale-independent, so outputs are
// byte-identical across runs and machines.
std::string fmt(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw io_error("write failed: " + path);
}

json params_json(const sabr::SabrParams& p) {
  return json{{"sigma", p.sigma}, {"alpha", p.alpha}, {"beta", p.beta},
              {"rho", p.rho},     {"shift", p.shift}};
}

sabr::SabrParams params_from_json(const json& j) {
  return sabr::SabrParams(j.at("sigma").get<double>(), j.at("alpha").get<double>(),
                          j.at("beta").get<double>(), j.at("rho").get<double>(),
                          j.value("shift", 0.0));
}

sabr::OptionKind kind_from(const std::string& name) {
  if (name == "call") return sabr::OptionKind::call;
  if (name == "put") return sabr::OptionKind::put;
  throw sabr::invalid_input("option kind must be 'call' or 'put', got '" + name + "'");
}

sabr::HedgeStrategy strategy_from(const std::string& name) {
  if (name == "classic") return sabr::HedgeStrategy::classic;
  if (name == "bartlett") return sabr::HedgeStrategy::bartlett;
  if (name == "bachelier") return sabr::HedgeStrategy::bachelier;
  throw sabr::invalid_input("unknown hedge strategy '" + name + "'");
}

json parse_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw sabr::invalid_input(std::string("bad JSON in ") + path + ": " + e.what());
  }
}

// Quotes file: header `strike,normal_vol`, one row per strike; the shared
// forward and expiry come from flags.
sabr::SmileQuotes read_quotes_csv(const std::string& path, double forward, double expiry) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open quotes file: " + path);
  auto chomp = [](std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
  };
  std::string line;
  if (!std::getline(in, line)) throw sabr::invalid_input("quotes file is empty: " + path);
  chomp(line);
  if (line != "strike,normal_vol")
    throw sabr::invalid_input("quotes header must be 'strike,normal_vol', got '" + line + "'");

  sabr::SmileQuotes quotes;
  quotes.forward = forward;
  quotes.expiry = expiry;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw sabr::invalid_input("quotes line " + std::to_string(line_no) + " needs two fields");
    try {
      quotes.points.push_back(
          {std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
    } catch (const std::exception&) {
      throw sabr::invalid_input("quotes line " + std::to_string(line_no) + " is not numeric");
    }
  }
  return quotes;
}

void warn_if_epsilon_large(const sabr::SabrParams& p, double expiry) {
  const double eps = p.alpha * p.alpha * expiry;
  if (eps > 1.0)
    std::cerr << "warning: alpha^2 * expiry = " << fmt(eps)
              << " exceeds 1; the vol expansion is unreliable this far out\n";
}

// "a,b,c" -> values; "lo:hi:n" -> n evenly spaced values.
std::vector<double> parse_grid(const std::string& spec, const char* what) {
  std::vector<double> out;
  try {
    if (spec.find(':') != std::string::npos) {
      std::istringstream ss(spec);
      std::string lo_s, hi_s, n_s;
      if (!std::getline(ss, lo_s, ':') || !std::getline(ss, hi_s, ':') ||
          !std::getline(ss, n_s))
        throw sabr::invalid_input(std::string(what) + " range must be lo:hi:count");
      const double lo = std::stod(lo_s), hi = std::stod(hi_s);
      const long n = std::stol(n_s);
      if (n < 1) throw sabr::invalid_input(std::string(what) + " count must be >= 1");
      for (long i = 0; i < n; ++i)
        out.push_back(n == 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1));
    } else {
      std::istringstream ss(spec);
      std::string tok;
      while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    }
  } catch (const sabr::invalid_input&) {
    throw;
  } catch (const std::exception&) {
    throw sabr::invalid_input(std::string("cannot parse ") + what + " spec '" + spec + "'");
  }
  if (out.empty()) throw sabr::invalid_input(std::string(what) + " spec is empty");
  return out;
}

void write_manifest(const std::string& subcommand, const json& parameters, uint64_t seed,
                    const std::vector<std::string>& outputs) {
  json manifest{{"subcommand", subcommand},
                {"version", sabr::kVersion},
                {"seed", seed},
                {"parameters", parameters},
                {"outputs", outputs}};
  write_text_file(outputs.front() + ".manifest.json", manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------- vol

struct VolArgs {
  double forward = 0.0, strike = 0.0, expiry = 0.0;
  double sigma = 0.0, alpha = 0.0, beta = 0.0, rho = 0.0, shift = 0.0;
  bool as_json = false;
};

int run_vol(const VolArgs& a) {
  const sabr::SabrParams p(a.sigma, a.alpha, a.beta, a.rho, a.shift);
  warn_if_epsilon_large(p, a.expiry);
  const sabr::SmilePoint pt = sabr::smile_point(a.expiry, a.forward, a.strike, p);
  if (a.as_json) {
    const json out{{"forward", a.forward},
                   {"strike", a.strike},
                   {"expiry", a.expiry},
                   {"params", params_json(p)},
                   {"implied_vol", pt.implied_vol},
                   {"smile_point",
                    {{"zeta", pt.zeta},
                     {"i_of_zeta", pt.i_of_zeta},
                     {"distance", pt.distance},
                     {"gamma_corr", pt.gamma_corr},
                     {"epsilon", pt.epsilon}}}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "implied_vol " << fmt(pt.implied_vol) << "\n"
              << "zeta        " << fmt(pt.zeta) << "\n"
              << "i_of_zeta   " << fmt(pt.i_of_zeta) << "\n"
              << "distance    " << fmt(pt.distance) << "\n"
              << "gamma_corr  " << fmt(pt.gamma_corr) << "\n"
              << "epsilon     " << fmt(pt.epsilon) << "\n";
  }
  return kOkExit;
}

// ---------------------------------------------------------------- greeks

struct GreeksArgs {
  VolArgs base;
  std::string kind = "call";
  std::string mode = "fd";
  std::string format = "table";
};

int run_greeks(const GreeksArgs& a) {
  const sabr::SabrParams p(a.base.sigma, a.base.alpha, a.base.beta, a.base.rho, a.base.shift);
  warn_if_epsilon_large(p, a.base.expiry);
  const sabr::OptionSpec option(a.base.strike, a.base.expiry, kind_from(a.kind));
  const sabr::SensMode mode =
      a.mode == "analytic" ? sabr::SensMode::analytic : sabr::SensMode::finite_difference;
  const sabr::GreekReport g = sabr::greeks(a.base.forward, option, p, mode);

  auto opt_str = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  auto opt_json = [](const std::optional<double>& v) { return v ? json(*v) : json(); };
  const std::string mode_name = g.mode == sabr::SensMode::analytic ? "analytic" : "fd";

  if (a.format == "json") {
    const json out{{"forward", a.base.forward},
                   {"strike", a.base.strike},
                   {"expiry", a.base.expiry},
                   {"kind", a.kind},
                   {"mode", mode_name},
                   {"params", params_json(p)},
                   {"report",
                    {{"price", g.price},
                     {"implied_vol", g.implied_vol},
                     {"delta_classic", g.delta_classic},
                     {"delta_bartlett", g.delta_bartlett},
                     {"vega", g.vega},
                     {"vega_modified", opt_json(g.vega_modified)},
                     {"theta", g.theta},
                     {"gamma", opt_json(g.gamma)},
                     {"vanna", opt_json(g.vanna)},
                     {"volga", opt_json(g.volga)}}}};
    std::cout << out.dump(2) << "\n";
  } else if (a.format == "csv") {
    std::cout << "price,implied_vol,delta_classic,delta_bartlett,vega,vega_modified,theta,"
                 "gamma,vanna,volga,mode\n"
              << fmt(g.price) << ',' << fmt(g.implied_vol) << ',' << fmt(g.delta_classic)
              << ',' << fmt(g.delta_bartlett) << ',' << fmt(g.vega) << ','
              << opt_str(g.vega_modified) << ',' << fmt(g.theta) << ',' << opt_str(g.gamma)
              << ',' << opt_str(g.vanna) << ',' << opt_str(g.volga) << ',' << mode_name << "\n";
  } else {
    auto row = [&](const char* name, const std::string& value) {
      std::cout << name << (value.empty() ? "n/a" : value) << "\n";
    };
    row("price           ", fmt(g.price));
    row("implied_vol     ", fmt(g.implied_vol));
    row("delta_classic   ", fmt(g.delta_classic));
    row("delta_bartlett  ", fmt(g.delta_bartlett));
    row("vega            ", fmt(g.vega));
    row("vega_modified   ", opt_str(g.vega_modified));
    row("theta           ", fmt(g.theta));
    row("gamma           ", opt_str(g.gamma));
    row("vanna           ", opt_str(g.vanna));
    row("volga           ", opt_str(g.volga));
    row("mode            ", mode_name);
  }
  return kOkExit;
}

// ---------------------------------------------------------------- calibrate

struct CalibrateArgs {
  std::string quotes_path;
  double forward = 0.0, expiry = 0.0, beta = 0.0, shift = 0.0;
  bool vega_weighted = false;
  std::string out_path;        // empty: stdout
  std::string residuals_path;  // empty: skip
};

json calibration_json(const sabr::CalibrationResult& r) {
  return json{{"params", params_json(r.params)},
              {"rmse", r.rmse},
              {"iterations", r.iterations},
              {"evaluations", r.evaluations},
              {"converged", r.converged},
              {"non_identifiable", r.non_identifiable},
              {"residuals", r.residuals}};
}

int run_calibrate(const CalibrateArgs& a) {
  const sabr::SmileQuotes quotes = read_quotes_csv(a.quotes_path, a.forward, a.expiry);
  sabr::CalibrationOptions opts;
  opts.shift = a.shift;
  opts.vega_weighted = a.vega_weighted;
  const sabr::CalibrationResult r = sabr::calibrate(quotes, a.beta, opts);
  warn_if_epsilon_large(r.params, a.expiry);

  const std::string payload = calibration_json(r).dump(2) + "\n";
  if (a.out_path.empty())
    std::cout << payload;
  else
    write_text_file(a.out_path, payload);

  if (!a.residuals_path.empty()) {
    std::string csv = "strike,normal_vol,model_vol,residual\n";
    for (std::size_t i = 0; i < quotes.points.size(); ++i) {
      const auto& pt = quotes.points[i];
      csv += fmt(pt.strike) + ',' + fmt(pt.vol) + ',' + fmt(pt.vol + r.residuals[i]) + ',' +
             fmt(r.residuals[i]) + '\n';
    }
    write_text_file(a.residuals_path, csv);
  }
  if (!r.converged) {
    std::cerr << "error: calibration did not converge\n";
    return kNoConvergenceExit;
  }
  return kOkExit;
}

// ---------------------------------------------------------------- beta-sweep

struct BetaSweepArgs {
  std::string quotes_path;
  double forward = 0.0, expiry = 0.0, shift = 0.0;
  std::string betas_spec, strikes_spec;
  std::string out_path;
};

int run_beta_sweep(const BetaSweepArgs& a) {
  const sabr::SmileQuotes quotes = read_quotes_csv(a.quotes_path, a.forward, a.expiry);
  const std::vector<double> betas = parse_grid(a.betas_spec, "betas");
  const std::vector<double> strikes = parse_grid(a.strikes_spec, "strikes");
  const sabr::BetaSweepResult sweep = sabr::beta_sweep(quotes, betas, strikes, a.shift);

  std::string csv = "beta,strike,delta_classic,delta_bartlett\n";
  bool all_converged = true;
  for (const auto& leg : sweep.legs) {
    all_converged = all_converged && leg.fit.converged;
    for (std::size_t i = 0; i < sweep.strikes.size(); ++i)
      csv += fmt(leg.beta) + ',' + fmt(sweep.strikes[i]) + ',' + fmt(leg.delta_classic[i]) +
             ',' + fmt(leg.delta_bartlett[i]) + '\n';
  }
  write_text_file(a.out_path, csv);

  const json params{{"quotes", a.quotes_path}, {"forward", a.forward},
                    {"expiry", a.expiry},      {"shift", a.shift},
                    {"betas", betas},          {"strikes", strikes}};
  write_manifest("beta-sweep", params, 0, {a.out_path});
  if (!all_converged) {
    std::cerr << "error: at least one calibration leg did not converge\n";
    return kNoConvergenceExit;
  }
  return kOkExit;
}

// ---------------------------------------------------------------- hedge

struct HedgeArgs {
  std::string config_path;
  std::string out_path;
};

int run_hedge(const HedgeArgs& a) {
  const json cfg = parse_json_file(a.config_path);

  const double f0 = cfg.at("f0").get<double>();
  const json& opt = cfg.at("option");
  const sabr::OptionSpec option(opt.at("strike").get<double>(), opt.at("expiry").get<double>(),
                                kind_from(opt.at("kind").get<std::string>()));
  const sabr::SabrParams true_params = params_from_json(cfg.at("true_params"));

  sabr::SimConfig sim;
  const json& sim_j = cfg.at("sim");
  sim.n_paths = sim_j.at("n_paths").get<int64_t>();
  sim.n_steps = sim_j.at("n_steps").get<int64_t>();
  sim.horizon = sim_j.at("horizon").get<double>();
  sim.seed = sim_j.at("seed").get<uint64_t>();

  sabr::HedgeConfig hedge;
  hedge.option = option;
  hedge.true_params = true_params;
  hedge.rebalance_steps = cfg.value("rebalance_steps", int64_t(1));
  hedge.recalibrate_sigma = cfg.value("recalibrate_sigma", true);

  const sabr::PathSet paths = sabr::simulate(true_params, f0, sim);

  std::string csv = "hedger,strategy,mean_pnl,pnl_std,pnl_mae,n_paths,rebalance_steps\n";
  for (const json& h : cfg.at("hedgers")) {
    const std::string label = h.at("label").get<std::string>();
    hedge.hedger_params = params_from_json(h.at("params"));
    for (const json& strat : h.at("strategies")) {
      const sabr::HedgeStats stats =
          sabr::hedge_backtest(paths, hedge, strategy_from(strat.get<std::string>()));
      csv += label + ',' + stats.strategy + ',' + fmt(stats.mean_pnl) + ',' +
             fmt(stats.pnl_std) + ',' + fmt(stats.pnl_mae) + ',' +
             std::to_string(stats.n_paths) + ',' + std::to_string(stats.rebalance_steps) +
             '\n';
    }
  }
  write_text_file(a.out_path, csv);

  const json params{{"config", a.config_path}, {"config_echo", cfg}};
  write_manifest("hedge", params, sim.seed, {a.out_path});
  return kOkExit;
}

// ---------------------------------------------------------------- regress

struct RegressArgs {
  std::string config_path;
  std::string out_path;
};

int run_regress(const RegressArgs& a) {
  const json cfg = parse_json_file(a.config_path);
  const sabr::SabrParams params = params_from_json(cfg.at("params"));
  const double f0 = cfg.at("f0").get<double>();

  sabr::SimConfig sim;
  const json& sim_j = cfg.at("sim");
  sim.n_paths = sim_j.at("n_paths").get<int64_t>();
  sim.n_steps = sim_j.at("n_steps").get<int64_t>();
  sim.horizon = sim_j.at("horizon").get<double>();
  sim.seed = sim_j.at("seed").get<uint64_t>();
  const int64_t window = cfg.value("window", int64_t(0));

  const sabr::RegressionResult r = sabr::regression_experiment(params, f0, sim, window);
  const json out{{"slope", r.slope},
                 {"intercept", r.intercept},
                 {"r_squared", r.r_squared},
                 {"slope_std_error", r.slope_std_error},
                 {"n_observations", r.n_observations}};
  write_text_file(a.out_path, out.dump(2) + "\n");

  const json manifest_params{{"config", a.config_path}, {"config_echo", cfg}};
  write_manifest("regress", manifest_params, sim.seed, {a.out_path});
  return kOkExit;
}

void add_param_flags(CLI::App* cmd, VolArgs& a, bool needs_strike) {
  cmd->add_option("--forward", a.forward, "forward rate")->required();
  if (needs_strike) cmd->add_option("--strike", a.strike, "option strike")->required();
  cmd->add_option("--expiry", a.expiry, "time to expiry in years")->required();
  cmd->add_option("--sigma", a.sigma, "instantaneous vol parameter")->required();
  cmd->add_option("--alpha", a.alpha, "vol of vol")->required();
  cmd->add_option("--beta", a.beta, "backbone exponent in [0,1]")->required();
  cmd->add_option("--rho", a.rho, "spot/vol correlation in (-1,1)")->required();
  cmd->add_option("--shift", a.shift, "displacement for negative rates");
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("SABR_LAB_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (env[0] != '\0' && env[0] != '-' && end != nullptr && *end == '\0')
      sabr::set_thread_cap(unsigned(cap));
    else
      std::cerr << "warning: ignoring unparsable SABR_LAB_THREADS='" << env << "'\n";
  }

  CLI::App app{"SABR normal-vol smile, greeks, calibration and hedging toolkit"};
  app.set_version_flag("--version", sabr::kVersion);
  app.require_subcommand(1);

  VolArgs vol_args;
  CLI::App* vol_cmd = app.add_subcommand("vol", "implied normal vol and smile internals");
  add_param_flags(vol_cmd, vol_args, true);
  vol_cmd->add_flag("--json", vol_args.as_json, "emit JSON instead of text");

  GreeksArgs greeks_args;
  CLI::App* greeks_cmd = app.add_subcommand("greeks", "full greek report for one option");
  add_param_flags(greeks_cmd, greeks_args.base, true);
  greeks_cmd->add_option("--kind", greeks_args.kind, "call or put")
      ->check(CLI::IsMember({"call", "put"}));
  greeks_cmd->add_option("--mode", greeks_args.mode, "sensitivity engine")
      ->check(CLI::IsMember({"fd", "analytic"}));
  greeks_cmd->add_option("--format", greeks_args.format, "table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}));
  bool greeks_json = false;
  greeks_cmd->add_flag("--json", greeks_json, "shorthand for --format json");

  CalibrateArgs cal_args;
  CLI::App* cal_cmd = app.add_subcommand("calibrate", "fit sigma/alpha/rho at fixed beta");
  cal_cmd->add_option("--quotes", cal_args.quotes_path, "CSV with header strike,normal_vol")
      ->required();
  cal_cmd->add_option("--forward", cal_args.forward, "forward rate")->required();
  cal_cmd->add_option("--expiry", cal_args.expiry, "time to expiry in years")->required();
  cal_cmd->add_option("--beta", cal_args.beta, "fixed backbone exponent")->required();
  cal_cmd->add_option("--shift", cal_args.shift, "displacement for negative rates");
  cal_cmd->add_flag("--vega-weighted", cal_args.vega_weighted, "weight residuals by vega");
  cal_cmd->add_option("--out", cal_args.out_path, "result JSON path (default: stdout)");
  cal_cmd->add_option("--residuals", cal_args.residuals_path, "per-quote residuals CSV path");

  BetaSweepArgs sweep_args;
  CLI::App* sweep_cmd =
      app.add_subcommand("beta-sweep", "delta curves from per-beta calibrations");
  sweep_cmd->add_option("--quotes", sweep_args.quotes_path, "CSV with header strike,normal_vol")
      ->required();
  sweep_cmd->add_option("--forward", sweep_args.forward, "forward rate")->required();
  sweep_cmd->add_option("--expiry", sweep_args.expiry, "time to expiry in years")->required();
  sweep_cmd->add_option("--shift", sweep_args.shift, "displacement for negative rates");
  sweep_cmd->add_option("--betas", sweep_args.betas_spec, "comma list, e.g. 0,0.5,1")
      ->required();
  sweep_cmd->add_option("--strikes", sweep_args.strikes_spec, "comma list or lo:hi:count")
      ->required();
  sweep_cmd->add_option("--out", sweep_args.out_path, "output CSV path")->required();

  HedgeArgs hedge_args;
  CLI::App* hedge_cmd = app.add_subcommand("hedge", "delta-hedging backtest from a config");
  hedge_cmd->add_option("--config", hedge_args.config_path, "hedge config JSON")->required();
  hedge_cmd->add_option("--out", hedge_args.out_path, "output CSV path")->required();

  RegressArgs regress_args;
  CLI::App* regress_cmd =
      app.add_subcommand("regress", "vol-increment regression on simulated paths");
  regress_cmd->add_option("--config", regress_args.config_path, "regression config JSON")
      ->required();
  regress_cmd->add_option("--out", regress_args.out_path, "output JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidationExit;
  }
  if (greeks_json) greeks_args.format = "json";

  try {
    if (vol_cmd->parsed()) return run_vol(vol_args);
    if (greeks_cmd->parsed()) return run_greeks(greeks_args);
    if (cal_cmd->parsed()) return run_calibrate(cal_args);
    if (sweep_cmd->parsed()) return run_beta_sweep(sweep_args);
    if (hedge_cmd->parsed()) return run_hedge(hedge_args);
    if (regress_cmd->parsed()) return run_regress(regress_args);
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoExit;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationExit;
  }
  return kOkExit;
}
