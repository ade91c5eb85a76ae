#include "sabrlab/nelder_mead.hpp"

#include <algorithm>
#include <cmath>

namespace sabr {

namespace {

using Vec3 = std::array<double, 3>;

Vec3 combine(const Vec3& a, double wa, const Vec3& b, double wb) {
  return {wa * a[0] + wb * b[0], wa * a[1] + wb * b[1], wa * a[2] + wb * b[2]};
}

}  // namespace

SimplexResult nelder_mead3(const std::function<double(const Vec3&)>& objective,
                           const Vec3& start, const SimplexOptions& options) {
  constexpr int n = 3;
  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  SimplexResult res;
  std::array<Vec3, n + 1> xs;
  std::array<double, n + 1> fs;
  xs[0] = start;
  for (int i = 0; i < n; ++i) {
    xs[i + 1] = start;
    xs[i + 1][i] += options.initial_step;
  }
  for (int i = 0; i <= n; ++i) {
    fs[i] = objective(xs[i]);
    ++res.evaluations;
  }

  // Index sort with stable tie-break keeps results deterministic.
  std::array<int, n + 1> order = {0, 1, 2, 3};
  const auto sort_simplex = [&] {
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fs[a] < fs[b]; });
  };
  sort_simplex();

  // Converged means the simplex has collapsed: either all vertex values agree
  // to ftol or all vertices agree to xtol.  Stopping on a stalled best value
  // instead quits while the simplex is still large and far from the optimum.
  const auto collapsed = [&] {
    if (fs[order[n]] - fs[order[0]] <= options.ftol) return true;
    double diameter = 0.0;
    for (int i = 1; i <= n; ++i)
      for (int k = 0; k < n; ++k)
        diameter = std::max(diameter, std::fabs(xs[order[i]][k] - xs[order[0]][k]));
    return diameter <= options.xtol;
  };

  while (true) {
    if (collapsed()) {
      res.converged = true;
      break;
    }
    if (res.evaluations >= options.max_evals) break;
    ++res.iterations;
    const int lo = order[0], hi = order[n], second_hi = order[n - 1];
    Vec3 centroid = {0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) centroid[k] += xs[order[i]][k] / n;

    const Vec3 xr = combine(centroid, 1.0 + kReflect, xs[hi], -kReflect);
    const double fr = objective(xr);
    ++res.evaluations;

    if (fr < fs[lo]) {
      const Vec3 xe = combine(centroid, 1.0 + kReflect * kExpand, xs[hi], -kReflect * kExpand);
      const double fe = objective(xe);
      ++res.evaluations;
      if (fe < fr) {
        xs[hi] = xe;
        fs[hi] = fe;
      } else {
        xs[hi] = xr;
        fs[hi] = fr;
      }
    } else if (fr < fs[second_hi]) {
      xs[hi] = xr;
      fs[hi] = fr;
    } else {
      bool shrink = false;
      if (fr < fs[hi]) {
        const Vec3 xc =
            combine(centroid, 1.0 + kReflect * kContract, xs[hi], -kReflect * kContract);
        const double fc = objective(xc);
        ++res.evaluations;
        if (fc <= fr) {
          xs[hi] = xc;
          fs[hi] = fc;
        } else {
          shrink = true;
        }
      } else {
        const Vec3 xc = combine(centroid, 1.0 - kContract, xs[hi], kContract);
        const double fc = objective(xc);
        ++res.evaluations;
        if (fc < fs[hi]) {
          xs[hi] = xc;
          fs[hi] = fc;
        } else {
          shrink = true;
        }
      }
      if (shrink) {
        for (int i = 1; i <= n; ++i) {
          xs[order[i]] = combine(xs[lo], 1.0 - kShrink, xs[order[i]], kShrink);
          fs[order[i]] = objective(xs[order[i]]);
          ++res.evaluations;
        }
      }
    }

    sort_simplex();
  }

  res.x = xs[order[0]];
  res.value = fs[order[0]];
  return res;
}

}  // namespace sabr
