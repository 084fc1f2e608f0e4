#include "gbmap/boosting.hpp"

#include <cmath>

namespace gbmap {

InitialModel InitialModel::linear(Vector coefficients) {
  InitialModel f0;
  f0.kind = Kind::Linear;
  f0.coefficients = std::move(coefficients);
  return f0;
}

InitialModel InitialModel::external(std::function<double(const Vector&)> fn,
                                    bool is_probability) {
  InitialModel f0;
  f0.kind = Kind::Callback;
  f0.callback = std::move(fn);
  f0.callback_is_probability = is_probability;
  return f0;
}

double InitialModel::evaluate(const Vector& x) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Linear:
      if (coefficients.size() != x.size()) {
        throw std::invalid_argument("initial model: coefficient/input size mismatch");
      }
      return coefficients.dot(x);
    case Kind::Callback: {
      double v = callback(x);
      if (callback_is_probability) {
        // Probabilities move to the response scale through the logit.
        v = std::min(std::max(v, 1e-12), 1.0 - 1e-12);
        v = std::log(v / (1.0 - v));
      }
      return v;
    }
  }
  return 0.0;
}

Vector InitialModel::evaluate_rows(const Matrix& rows) const {
  if (kind == Kind::Zero) return Vector::Zero(rows.rows());
  if (kind == Kind::Linear) {
    if (coefficients.size() != rows.cols()) {
      throw std::invalid_argument("initial model: coefficient/input size mismatch");
    }
    return rows * coefficients;
  }
  Vector out(rows.rows());
  for (Index i = 0; i < rows.rows(); ++i) out[i] = evaluate(rows.row(i).transpose());
  return out;
}

Vector InitialModel::gradient(Index p) const {
  switch (kind) {
    case Kind::Zero:
      return Vector::Zero(p);
    case Kind::Linear:
      if (coefficients.size() != p) {
        throw std::invalid_argument("initial model: coefficient/input size mismatch");
      }
      return coefficients;
    case Kind::Callback:
      throw std::logic_error("initial model: callback has no exact gradient");
  }
  return Vector::Zero(p);
}

std::pair<double, Vector> stage_initial_point(Index p, int sign, Rng& rng,
                                              const FitConfig& config) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("stage_initial_point: sign must be +1 or -1");
  if (p < 1) throw std::invalid_argument("stage_initial_point: p must be >= 1");
  if (config.init_scale < 0.0) throw std::invalid_argument("stage_initial_point: init_scale must be >= 0");
  Vector w(p);
  for (Index k = 0; k < p; ++k) w[k] = rng.uniform(-config.init_scale, config.init_scale);
  const double a = -static_cast<double>(sign) * nonlin_value(config.nonlinearity, 0.0, config.beta);
  return {a, w};
}

namespace {

void validate_fit_inputs(const Dataset& data, const FitConfig& config) {
  if (config.m < 1) throw std::invalid_argument("fit: m must be >= 1");
  if (!(config.beta > 0.0) || !std::isfinite(config.beta)) {
    throw std::invalid_argument("fit: beta must be positive and finite");
  }
  if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) {
    throw std::invalid_argument("fit: lambda must be >= 0 and finite");
  }
  if (config.retries_per_stage < 0) throw std::invalid_argument("fit: retries_per_stage must be >= 0");
  if (data.n() < 2) throw std::invalid_argument("fit: need at least 2 rows");
  if (data.p() < 1) throw std::invalid_argument("fit: need at least 1 covariate");
  if (!data.x.allFinite()) throw std::invalid_argument("fit: covariates contain non-finite values");
  if (data.y.size() != data.n()) throw std::invalid_argument("fit: target length does not match rows");
  if (!data.y.allFinite()) throw std::invalid_argument("fit: targets contain non-finite values");
  if (config.task == Task::Classification) {
    for (Index i = 0; i < data.y.size(); ++i) {
      if (data.y[i] != 1.0 && data.y[i] != -1.0) {
        throw std::invalid_argument("fit: classification targets must be exactly +1 or -1");
      }
    }
  }
}

// One sign branch of a stage: LBFGS from the drawn starting point.
OptimizeResult optimize_branch(const Dataset& data, const Vector& accumulated,
                               const FitConfig& config, LossKind kind, int sign,
                               double a0, const Vector& w0) {
  const StageContext ctx{data.x, data.y, accumulated, config.beta,
                         config.lambda, sign, config.nonlinearity};
  const Index p = data.p();
  const ObjectiveFn objective = [ctx, kind, p](const Vector& theta, Vector* grad) {
    const double a = theta[0];
    const Vector w = theta.tail(p);
    if (!grad) return stage_objective(a, w, ctx, kind);
    double da = 0.0;
    Vector dw(p);
    const double value = stage_value_gradient(a, w, ctx, kind, da, dw);
    (*grad)[0] = da;
    grad->tail(p) = dw;
    return value;
  };

  Vector theta0(p + 1);
  theta0[0] = a0;
  theta0.tail(p) = w0;
  return minimize(objective, theta0, config.optimizer);
}

}  // namespace

GbmapModel fit(const Dataset& data, const FitConfig& config, InitialModel f0) {
  validate_fit_inputs(data, config);
  const LossKind kind = loss_for(config.task);
  const Index n = data.n();
  const Index p = data.p();

  Vector accumulated = f0.evaluate_rows(data.x);
  if (!accumulated.allFinite()) {
    throw std::invalid_argument("fit: initial model produced non-finite output");
  }

  GbmapModel model;
  model.beta = config.beta;
  model.task = config.task;
  model.nonlinearity = config.nonlinearity;
  model.f0 = std::move(f0);
  model.p = p;
  model.learners.reserve(static_cast<size_t>(config.m));
  model.training_loss.push_back(mean_loss(kind, data.y, accumulated));

  Rng rng(config.seed);
  const double g0 = nonlin_value(config.nonlinearity, 0.0, config.beta);

  for (int stage = 0; stage < config.m; ++stage) {
    const double previous_loss = model.training_loss.back();
    WeakLearner learner;
    Vector contribution;
    double stage_loss = 0.0;
    bool installed = false;

    for (int attempt = 0; attempt <= config.retries_per_stage && !installed; ++attempt) {
      // Draw both branch starts before optimizing so the random stream does
      // not depend on branch evaluation order.
      const auto [a_plus, w_plus] = stage_initial_point(p, +1, rng, config);
      const auto [a_minus, w_minus] = stage_initial_point(p, -1, rng, config);

      const OptimizeResult plus = optimize_branch(data, accumulated, config, kind, +1, a_plus, w_plus);
      const OptimizeResult minus =
          optimize_branch(data, accumulated, config, kind, -1, a_minus, w_minus);

      const bool take_minus = minus.objective_value < plus.objective_value;
      const OptimizeResult& winner = take_minus ? minus : plus;
      learner.b = take_minus ? -1 : +1;
      learner.a = winner.solution[0];
      learner.w = winner.solution.tail(p);

      const Vector z = data.x * learner.w;
      contribution.resize(n);
      for (Index i = 0; i < n; ++i) {
        contribution[i] = learner.a +
                          static_cast<double>(learner.b) *
                              nonlin_value(config.nonlinearity, z[i], config.beta);
      }
      stage_loss = mean_loss(kind, data.y, accumulated + contribution);
      installed = stage_loss <= previous_loss + 1e-12;
    }

    if (!installed) {
      // Every attempt made things worse; fall back to an exact
      // zero-contribution learner so the loss trajectory cannot rise.
      learner = WeakLearner{-g0, +1, Vector::Zero(p)};
      contribution = Vector::Zero(n);
      stage_loss = previous_loss;
    }

    model.learners.push_back(learner);
    accumulated += contribution;
    model.training_loss.push_back(stage_loss);
  }

  return model;
}

}  // namespace gbmap
