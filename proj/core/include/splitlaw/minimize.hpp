#pragma once

#include <functional>
#include <vector>

namespace splitlaw {

/// Objective callback: fills grad (same length as x) and returns f(x).
using ObjectiveFn = std::function<double(const std::vector<double>&, std::vector<double>&)>;

struct MinimizeOptions {
  int max_iter = 500;
  double grad_tolerance = 1e-6;  // stop when ||g||_inf <= tol * (1 + |f|)
  int history = 8;               // L-BFGS memory
};

struct MinimizeResult {
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;  // first-order stationarity reached before max_iter
};

/// L-BFGS with backtracking Armijo line search, unconstrained.
/// Never returns a point worse than the start. Throws ConvergenceError if the
/// objective is non-finite at the initial point or the search cannot recover
/// a finite value.
MinimizeResult minimize_lbfgs(const ObjectiveFn& fn, std::vector<double> x0,
                              const MinimizeOptions& options = {});

}  // namespace splitlaw
