#pragma once

#include <array>
#include <functional>

namespace sabr {

// Derivative-free simplex minimizer in three dimensions (all our searches run
// in an unconstrained 3-parameter reparameterization).
struct SimplexOptions {
  int max_evals = 10000;
  double ftol = 1e-18;  // converged when the simplex value spread falls to this
  double xtol = 1e-12;  // ... or its diameter (max norm) does
  double initial_step = 0.25;
};

struct SimplexResult {
  std::array<double, 3> x{};
  double value = 0.0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
};

SimplexResult nelder_mead3(const std::function<double(const std::array<double, 3>&)>& objective,
                           const std::array<double, 3>& start, const SimplexOptions& options);

}  // namespace sabr
