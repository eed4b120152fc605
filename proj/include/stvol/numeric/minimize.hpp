#pragma once

#include <functional>
#include <vector>

namespace stvol::numeric {

struct BrentResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  /// (x, f(x)) for every evaluation, kept for error reports.
  std::vector<std::pair<double, double>> trace;
};

/// Brent's golden-section/parabolic minimization of f on [lo, hi] starting
/// from `start`. Stops when the bracket half-width is below
/// rel_tol·|x| + abs_tol. Never returns a point worse than `start`.
BrentResult brent_minimize(const std::function<double(double)>& f, double lo, double hi, double start,
                           double rel_tol, double abs_tol, int max_iterations = 200);

}  // namespace stvol::numeric
