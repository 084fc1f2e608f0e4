#include "gbmap/objective.hpp"

#include <cmath>

namespace gbmap {

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

// log(1 + exp(t)) without overflow, branch on the sign of t.
inline double softplus_unit(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

}  // namespace

double softplus(double z, double beta) {
  if (!std::isfinite(z)) throw std::invalid_argument("softplus: non-finite z");
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("softplus: beta must be positive and finite");
  }
  return softplus_unit(beta * z) / beta;
}

double softplus_derivative(double z, double beta) {
  if (!std::isfinite(z)) throw std::invalid_argument("softplus_derivative: non-finite z");
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("softplus_derivative: beta must be positive and finite");
  }
  return sigmoid(beta * z);
}

double pointwise_loss(LossKind kind, double y, double yhat) {
  if (kind == LossKind::Quadratic) {
    const double r = y - yhat;
    return r * r;
  }
  if (y != 1.0 && y != -1.0) {
    throw std::invalid_argument("pointwise_loss: logistic targets must be exactly +1 or -1");
  }
  return softplus_unit(-y * yhat);
}

double pointwise_loss_derivative(LossKind kind, double y, double yhat) {
  if (kind == LossKind::Quadratic) {
    return -2.0 * (y - yhat);
  }
  if (y != 1.0 && y != -1.0) {
    throw std::invalid_argument("pointwise_loss_derivative: logistic targets must be exactly +1 or -1");
  }
  return -y * sigmoid(-y * yhat);
}

double nonlin_value(Nonlinearity g, double z, double beta) {
  return g == Nonlinearity::Softplus ? softplus(z, beta) : z;
}

double nonlin_derivative(Nonlinearity g, double z, double beta) {
  return g == Nonlinearity::Softplus ? softplus_derivative(z, beta) : 1.0;
}

namespace {

void check_stage_dims(const Vector& w, const StageContext& ctx) {
  if (w.size() != ctx.rows.cols()) {
    throw std::invalid_argument("stage objective: w has size " + std::to_string(w.size()) +
                                " but rows have " + std::to_string(ctx.rows.cols()) +
                                " columns");
  }
  if (ctx.targets.size() != ctx.rows.rows() || ctx.accumulated.size() != ctx.rows.rows()) {
    throw std::invalid_argument("stage objective: targets/accumulated do not match row count");
  }
  if (ctx.rows.rows() == 0) {
    throw std::invalid_argument("stage objective: empty row set");
  }
  if (ctx.sign != 1 && ctx.sign != -1) {
    throw std::invalid_argument("stage objective: sign must be +1 or -1");
  }
}

}  // namespace

double stage_objective(double a, const Vector& w, const StageContext& ctx, LossKind kind) {
  check_stage_dims(w, ctx);
  const Index n = ctx.rows.rows();
  const double b = static_cast<double>(ctx.sign);
  const Vector z = ctx.rows * w;

  double loss_sum = 0.0;
  if (ctx.nonlin == Nonlinearity::Softplus) {
    if (kind == LossKind::Quadratic) {
      for (Index i = 0; i < n; ++i) {
        const double pred = ctx.accumulated[i] + a + b * softplus_unit(ctx.beta * z[i]) / ctx.beta;
        const double r = ctx.targets[i] - pred;
        loss_sum += r * r;
      }
    } else {
      for (Index i = 0; i < n; ++i) {
        const double pred = ctx.accumulated[i] + a + b * softplus_unit(ctx.beta * z[i]) / ctx.beta;
        loss_sum += softplus_unit(-ctx.targets[i] * pred);
      }
    }
  } else {
    for (Index i = 0; i < n; ++i) {
      const double pred = ctx.accumulated[i] + a + b * z[i];
      loss_sum += kind == LossKind::Quadratic
                      ? (ctx.targets[i] - pred) * (ctx.targets[i] - pred)
                      : softplus_unit(-ctx.targets[i] * pred);
    }
  }

  const double ridge = ctx.lambda * w.squaredNorm() / static_cast<double>(ctx.rows.cols());
  return loss_sum / static_cast<double>(n) + ridge;
}

double stage_value_gradient(double a, const Vector& w, const StageContext& ctx, LossKind kind,
                            double& da, Vector& dw) {
  check_stage_dims(w, ctx);
  const Index n = ctx.rows.rows();
  const double b = static_cast<double>(ctx.sign);
  const Vector z = ctx.rows * w;

  // chain[i] = dloss/dpred * b * g'(z_i); da accumulates dloss/dpred alone.
  Vector chain(n);
  double da_sum = 0.0;
  double loss_sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double gz = ctx.nonlin == Nonlinearity::Softplus
                          ? softplus_unit(ctx.beta * z[i]) / ctx.beta
                          : z[i];
    const double pred = ctx.accumulated[i] + a + b * gz;
    if (kind == LossKind::Quadratic) {
      const double r = ctx.targets[i] - pred;
      loss_sum += r * r;
      chain[i] = -2.0 * r;
    } else {
      loss_sum += softplus_unit(-ctx.targets[i] * pred);
      chain[i] = -ctx.targets[i] * sigmoid(-ctx.targets[i] * pred);
    }
    da_sum += chain[i];
    chain[i] *= b * (ctx.nonlin == Nonlinearity::Softplus ? sigmoid(ctx.beta * z[i]) : 1.0);
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  da = da_sum * inv_n;
  dw = (ctx.rows.transpose() * chain) * inv_n;
  dw += (2.0 * ctx.lambda / static_cast<double>(ctx.rows.cols())) * w;
  const double ridge = ctx.lambda * w.squaredNorm() / static_cast<double>(ctx.rows.cols());
  return loss_sum * inv_n + ridge;
}

void stage_gradient(double a, const Vector& w, const StageContext& ctx, LossKind kind,
                    double& da, Vector& dw) {
  stage_value_gradient(a, w, ctx, kind, da, dw);
}

double mean_loss(LossKind kind, const Vector& targets, const Vector& predictions) {
  if (targets.size() != predictions.size()) {
    throw std::invalid_argument("mean_loss: size mismatch");
  }
  if (targets.size() == 0) throw std::invalid_argument("mean_loss: empty input");
  double sum = 0.0;
  for (Index i = 0; i < targets.size(); ++i) {
    sum += pointwise_loss(kind, targets[i], predictions[i]);
  }
  return sum / static_cast<double>(targets.size());
}

}  // namespace gbmap
