#pragma once

#include "sabrlab/errors.hpp"

namespace sabr {

enum class OptionKind { call, put };

// Model parameters for dF = sigma * C(F) dW, dsigma = alpha * sigma dZ,
// d<W,Z> = rho dt, with backbone C(F) = (F + shift)^beta.
//
// Units: F and strikes are absolute rates (decimals), sigma is the CEV
// volatility (rate^(1-beta) per sqrt-year), alpha is per sqrt-year.
struct SabrParams {
  double sigma = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double rho = 0.0;
  double shift = 0.0;

  SabrParams() = default;
  SabrParams(double sigma_, double alpha_, double beta_, double rho_, double shift_ = 0.0)
      : sigma(sigma_), alpha(alpha_), beta(beta_), rho(rho_), shift(shift_) {
    validate();
  }

  void validate() const {
    if (!(sigma > 0.0)) throw invalid_input("sigma must be > 0");
    if (!(alpha >= 0.0)) throw invalid_input("alpha must be >= 0");
    if (!(beta >= 0.0 && beta <= 1.0)) throw invalid_input("beta must lie in [0, 1]");
    if (!(rho > -1.0 && rho < 1.0)) throw invalid_input("rho must lie in (-1, 1)");
    if (!(shift >= 0.0)) throw invalid_input("shift must be >= 0");
  }
};

// A vanilla option on the forward; expiry is the time to expiry in years.
struct OptionSpec {
  double strike = 0.0;
  double expiry = 0.0;
  OptionKind kind = OptionKind::call;

  OptionSpec() = default;
  OptionSpec(double strike_, double expiry_, OptionKind kind_)
      : strike(strike_), expiry(expiry_), kind(kind_) {
    if (!(expiry > 0.0)) throw invalid_input("option expiry must be > 0");
  }
};

}  // namespace sabr
