#include "sabrlab/bachelier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sabr {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
// Beyond this the direct d*N(d) + phi(d) time value loses ~2 log10(d^2)
// digits to cancellation; switch to the Mills-ratio asymptotic tail.
constexpr double kTailThreshold = 8.0;

// phi(d) - d*N(-d) for d > 0, via N(-d) ~ phi(d)/d (1 - 1/d^2 + 3/d^4 - ...).
double tail_time_value(double d) {
  const double r = 1.0 / (d * d);
  return normal_pdf(d) * r * (1.0 - r * (3.0 - r * (15.0 - r * 105.0)));
}

double intrinsic_value(double forward, double strike, OptionKind kind) {
  const double s = kind == OptionKind::call ? forward - strike : strike - forward;
  return std::max(s, 0.0);
}

}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double bachelier_price(const BachelierInputs& in) {
  in.validate();
  const double s = in.vol * std::sqrt(in.expiry);
  const double sign = in.kind == OptionKind::call ? 1.0 : -1.0;
  const double d = sign * (in.forward - in.strike) / s;
  if (d > kTailThreshold) return sign * (in.forward - in.strike) + s * tail_time_value(d);
  if (d < -kTailThreshold) return s * tail_time_value(-d);
  return s * (d * normal_cdf(d) + normal_pdf(d));
}

BsGreeks bachelier_greeks(const BachelierInputs& in) {
  in.validate();
  const double rt = std::sqrt(in.expiry);
  const double s = in.vol * rt;
  const double d = (in.forward - in.strike) / s;  // call-convention d
  const double pdf = normal_pdf(d);

  BsGreeks g;
  g.price = bachelier_price(in);
  g.delta = in.kind == OptionKind::call ? normal_cdf(d) : -normal_cdf(-d);
  g.vega = rt * pdf;
  g.theta = in.vol * pdf / (2.0 * rt);
  g.gamma = pdf / s;
  g.vanna = -d * pdf / in.vol;
  g.volga = rt * d * d * pdf / in.vol;
  return g;
}

double bachelier_implied_vol(double expiry, double forward, double strike,
                             OptionKind kind, double target_price) {
  if (!(expiry > 0.0)) throw invalid_input("bachelier expiry must be > 0");
  const double intrinsic = intrinsic_value(forward, strike, kind);
  if (!(target_price > intrinsic))
    throw invalid_input("bachelier implied vol needs price above intrinsic value");

  const double rt = std::sqrt(expiry);
  const double time_value = target_price - intrinsic;
  // Time value is at most s*phi(0) (equality at the money), so this seed is a
  // lower bound on the root and exact for K == F.
  const double lo_seed = std::max(time_value / (kInvSqrt2Pi * rt), 1e-300);
  double lo = lo_seed;
  double hi = std::max(lo_seed, (std::fabs(forward - strike) + time_value) / rt);
  const auto value = [&](double vol) {
    return bachelier_price(BachelierInputs(expiry, forward, strike, vol, kind));
  };
  for (int i = 0; i < 300 && value(hi) < target_price; ++i) hi *= 2.0;

  // Price is increasing and convex in vol, so Newton from the upper bracket
  // end converges monotonically; geometric bisection guards degenerate vegas.
  double vol = hi;
  for (int i = 0; i < 200; ++i) {
    const double diff = value(vol) - target_price;
    if (diff > 0.0)
      hi = vol;
    else
      lo = vol;
    const double vega = rt * normal_pdf((forward - strike) / (vol * rt));
    double next = vega > 0.0 ? vol - diff / vega : std::sqrt(lo * hi);
    if (!(next >= lo && next <= hi)) next = std::sqrt(lo * hi);
    const bool done = std::fabs(next - vol) <= 1e-16 * vol || diff == 0.0;
    vol = next;
    if (done) break;
  }
  return vol;
}

}  // namespace sabr
