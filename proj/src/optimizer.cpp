#include "gbmap/optimizer.hpp"

#include <cmath>
#include <deque>

namespace gbmap {

namespace {

constexpr double kArmijoC1 = 1e-4;
constexpr double kCurvatureFloor = 1e-10;
constexpr double kBacktrackFactor = 0.5;

struct CurvaturePair {
  Vector s;
  Vector y;
  double rho;  // 1 / s'y
};

// Two-loop recursion: applies the implicit inverse-Hessian estimate to g.
Vector search_direction(const Vector& g, const std::deque<CurvaturePair>& pairs) {
  Vector q = -g;
  if (pairs.empty()) return q;

  std::vector<double> alpha(pairs.size());
  for (size_t i = pairs.size(); i-- > 0;) {
    alpha[i] = pairs[i].rho * pairs[i].s.dot(q);
    q -= alpha[i] * pairs[i].y;
  }
  const CurvaturePair& last = pairs.back();
  const double gamma = last.s.dot(last.y) / last.y.squaredNorm();
  q *= gamma;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const double beta = pairs[i].rho * pairs[i].y.dot(q);
    q += (alpha[i] - beta) * pairs[i].s;
  }
  return q;
}

void validate(const OptimizerConfig& cfg, const Vector& x0) {
  if (cfg.max_iterations < 1) throw std::invalid_argument("minimize: max_iterations must be >= 1");
  if (cfg.memory < 1) throw std::invalid_argument("minimize: memory must be >= 1");
  if (!(cfg.gradient_tolerance > 0.0)) {
    throw std::invalid_argument("minimize: gradient_tolerance must be > 0");
  }
  if (cfg.line_search_max_steps < 1) {
    throw std::invalid_argument("minimize: line_search_max_steps must be >= 1");
  }
  if (!(cfg.initial_step > 0.0)) throw std::invalid_argument("minimize: initial_step must be > 0");
  if (x0.size() == 0 || !x0.allFinite()) {
    throw std::invalid_argument("minimize: starting point must be non-empty and finite");
  }
}

}  // namespace

OptimizeResult minimize(const ObjectiveFn& objective, const Vector& x0,
                        const OptimizerConfig& config) {
  validate(config, x0);

  Vector g(x0.size());
  double f = objective(x0, &g);
  if (!std::isfinite(f) || !g.allFinite()) {
    throw std::invalid_argument("minimize: objective or gradient non-finite at x0");
  }

  OptimizeResult result;
  result.solution = x0;
  result.objective_value = f;
  result.iterate_values.push_back(f);

  Vector x = x0;
  Vector best_x = x0;
  double best_f = f;
  const auto note_best = [&](const Vector& xt, double ft) {
    if (ft < best_f) {
      best_f = ft;
      best_x = xt;
    }
  };

  if (g.lpNorm<Eigen::Infinity>() < config.gradient_tolerance) {
    result.converged = true;
    result.termination = Termination::GradientTolerance;
    return result;
  }

  std::deque<CurvaturePair> pairs;
  Vector g_next(x0.size());

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    Vector d = search_direction(g, pairs);
    double slope = g.dot(d);
    if (!(slope < 0.0) || !d.allFinite()) {
      // Curvature memory produced a useless direction; fall back to steepest
      // descent rather than terminating.
      d = -g;
      slope = -g.squaredNorm();
    }

    // First iteration has no curvature scale yet, so normalize the step by
    // the gradient magnitude instead of trusting a raw unit step.
    double step = pairs.empty()
                      ? config.initial_step / std::max(1.0, g.lpNorm<Eigen::Infinity>())
                      : config.initial_step;

    bool accepted = false;
    Vector x_next;
    double f_next = 0.0;
    for (int ls = 0; ls < config.line_search_max_steps; ++ls) {
      Vector trial = x + step * d;
      const double f_trial = objective(trial, nullptr);
      if (std::isfinite(f_trial)) {
        note_best(trial, f_trial);
        if (f_trial <= f + kArmijoC1 * step * slope) {
          // Sufficient decrease reached; the gradient must exist here too.
          const double f_check = objective(trial, &g_next);
          if (std::isfinite(f_check) && g_next.allFinite()) {
            accepted = true;
            x_next = std::move(trial);
            f_next = f_check;
            note_best(x_next, f_next);
            break;
          }
        }
      }
      step *= kBacktrackFactor;
    }

    result.iterations_used = iter;
    if (!accepted) {
      result.solution = best_x;
      result.objective_value = best_f;
      result.termination = Termination::LineSearchFailure;
      return result;
    }

    Vector s = x_next - x;
    Vector yv = g_next - g;
    const double sy = s.dot(yv);
    if (sy > kCurvatureFloor) {
      pairs.push_back({std::move(s), std::move(yv), 1.0 / sy});
      if (static_cast<int>(pairs.size()) > config.memory) pairs.pop_front();
    }

    x = std::move(x_next);
    f = f_next;
    g = g_next;
    result.iterate_values.push_back(f);

    if (g.lpNorm<Eigen::Infinity>() < config.gradient_tolerance) {
      result.solution = best_x;
      result.objective_value = best_f;
      result.converged = true;
      result.termination = Termination::GradientTolerance;
      return result;
    }
  }

  result.solution = best_x;
  result.objective_value = best_f;
  result.termination = Termination::MaxIterations;
  return result;
}

}  // namespace gbmap
