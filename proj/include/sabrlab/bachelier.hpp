#pragma once

#include "sabrlab/types.hpp"

namespace sabr {

double normal_pdf(double x);
double normal_cdf(double x);  // via erfc, accurate in both tails

// Normal-model (arithmetic Brownian forward) pricing inputs; unit notional,
// zero discounting.
struct BachelierInputs {
  double expiry = 0.0;   // years
  double forward = 0.0;  // rate
  double strike = 0.0;   // rate
  double vol = 0.0;      // normal vol, rate per sqrt-year
  OptionKind kind = OptionKind::call;

  BachelierInputs() = default;
  BachelierInputs(double expiry_, double forward_, double strike_, double vol_,
                  OptionKind kind_)
      : expiry(expiry_), forward(forward_), strike(strike_), vol(vol_), kind(kind_) {
    validate();
  }
  void validate() const {
    if (!(expiry > 0.0)) throw invalid_input("bachelier expiry must be > 0");
    if (!(vol > 0.0)) throw invalid_input("bachelier vol must be > 0");
  }
};

// Price and partials in (forward, vol, expiry).  theta is the derivative in
// time-to-expiry (positive; calendar decay is its negative).
struct BsGreeks {
  double price = 0.0;
  double delta = 0.0;  // dprice/dF
  double vega = 0.0;   // dprice/dvol
  double theta = 0.0;  // dprice/dexpiry
  double gamma = 0.0;  // d2price/dF2
  double vanna = 0.0;  // d2price/dFdvol
  double volga = 0.0;  // d2price/dvol2
};

double bachelier_price(const BachelierInputs& in);
BsGreeks bachelier_greeks(const BachelierInputs& in);

// Inverts bachelier_price in vol (increasing, convex); target must exceed
// intrinsic value.  Newton safeguarded by a bracket.
double bachelier_implied_vol(double expiry, double forward, double strike,
                             OptionKind kind, double target_price);

}  // namespace sabr
