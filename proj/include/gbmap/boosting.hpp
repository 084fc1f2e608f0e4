#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "gbmap/data.hpp"
#include "gbmap/objective.hpp"
#include "gbmap/optimizer.hpp"
#include "gbmap/rng.hpp"

namespace gbmap {

/// The ensemble's j=0 term. Zero by default. Linear holds fixed coefficients
/// over the preprocessed covariates (intercept column included). Callback
/// wraps an arbitrary external predictor; when the callback returns a
/// probability, it is mapped through the logit so the value lives on the
/// response scale that boosting expects.
struct InitialModel {
  enum class Kind { Zero, Linear, Callback };

  Kind kind = Kind::Zero;
  Vector coefficients;  // Linear only
  std::function<double(const Vector&)> callback;
  bool callback_is_probability = false;

  static InitialModel zero() { return {}; }
  static InitialModel linear(Vector coefficients);
  static InitialModel external(std::function<double(const Vector&)> fn,
                               bool is_probability = false);

  double evaluate(const Vector& x) const;
  Vector evaluate_rows(const Matrix& rows) const;

  /// Zero and Linear have an exact gradient; Callback does not.
  bool differentiable() const { return kind != Kind::Callback; }
  /// Gradient of the initial model at x (constant for Linear, zero for Zero).
  /// Throws std::logic_error for Callback.
  Vector gradient(Index p) const;
};

struct FitConfig {
  int m = 20;            // number of boosting stages
  double beta = 5.0;     // softplus sharpness
  double lambda = 1e-3;  // ridge weight
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  Task task = Task::Regression;
  double init_scale = 1e-2;   // half-width of the uniform initial w
  int retries_per_stage = 3;  // re-draws before falling back to a zero learner
  Nonlinearity nonlinearity = Nonlinearity::Softplus;  // Identity is a test/baseline hook
};

struct GbmapModel {
  std::vector<WeakLearner> learners;
  double beta = 5.0;
  Task task = Task::Regression;
  Nonlinearity nonlinearity = Nonlinearity::Softplus;
  InitialModel f0;
  PreprocessStats preprocessing;  // optional payload; may be empty
  Index p = 0;                    // covariate dimension, intercept included
  /// Unregularized training loss after each stage; element 0 is the loss of
  /// the initial model alone. Non-increasing by construction.
  std::vector<double> training_loss;

  Index stages() const { return static_cast<Index>(learners.size()); }
};

/// Starting point of one sign branch: w ~ U(-init_scale, +init_scale)^p and
/// a = -sign * g(0), so the stage begins as a (near) zero-contribution
/// learner.
std::pair<double, Vector> stage_initial_point(Index p, int sign, Rng& rng,
                                              const FitConfig& config);

/// Stage-wise boosting fit. Each stage solves the regularized stage objective
/// by LBFGS once per sign b in {+1, -1} and installs the branch with the
/// smaller objective (ties prefer b = +1). If the winner would raise the
/// unregularized training loss, the stage retries with fresh draws up to
/// retries_per_stage times and then installs an exact zero-contribution
/// learner, which keeps the loss trajectory non-increasing (tolerance 1e-12).
/// Deterministic for a fixed config.seed.
///
/// `data` must be preprocessed (intercept column present). Throws
/// std::invalid_argument for n < 2, non-finite values, classification targets
/// outside {-1,+1}, or invalid config.
GbmapModel fit(const Dataset& data, const FitConfig& config,
               InitialModel f0 = InitialModel::zero());

}  // namespace gbmap
