#pragma once

#include <functional>
#include <vector>

#include "gbmap/types.hpp"

namespace gbmap {

struct OptimizerConfig {
  int max_iterations = 200;
  int memory = 10;                   // stored curvature pairs
  double gradient_tolerance = 1e-6;  // convergence: max-norm of gradient below this
  int line_search_max_steps = 30;    // backtracking halvings before giving up
  double initial_step = 1.0;
};

enum class Termination { GradientTolerance, MaxIterations, LineSearchFailure };

struct OptimizeResult {
  Vector solution;              // best-seen point, not necessarily the last iterate
  double objective_value = 0.0; // minimum value observed anywhere, x0 included
  int iterations_used = 0;
  bool converged = false;       // true only for Termination::GradientTolerance
  Termination termination = Termination::MaxIterations;
  std::vector<double> iterate_values;  // f at x0 and at each accepted iterate
};

/// Objective callback: returns f(x) and fills *grad when grad is non-null.
/// Line-search trials are value-only; gradients are requested at accepted
/// points.
using ObjectiveFn = std::function<double(const Vector&, Vector*)>;

/// Limited-memory BFGS with two-loop recursion and Armijo backtracking
/// (sufficient-decrease constant 1e-4). Curvature pairs with s'y <= 1e-10 are
/// skipped to keep the inverse-Hessian estimate positive definite. Non-finite
/// trial values shrink the step; an exhausted line search terminates with the
/// best-seen point. Deterministic: identical inputs give bit-identical output.
///
/// Throws std::invalid_argument for an invalid config, a non-finite starting
/// point, or a non-finite objective/gradient at x0.
OptimizeResult minimize(const ObjectiveFn& objective, const Vector& x0,
                        const OptimizerConfig& config);

}  // namespace gbmap
