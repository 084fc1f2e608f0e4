#pragma once

#include "gbmap/types.hpp"

namespace gbmap {

enum class LossKind { Quadratic, Logistic };

inline LossKind loss_for(Task task) {
  return task == Task::Regression ? LossKind::Quadratic : LossKind::Logistic;
}

/// Numerically stable sigmoid 1 / (1 + exp(-z)).
double sigmoid(double z);

/// Smoothed ReLU: log(1 + exp(beta*z)) / beta. Evaluated in log1p form so it
/// never overflows; for large |z| it approaches max(0, z) from above.
/// Throws std::invalid_argument for non-finite z or beta <= 0.
double softplus(double z, double beta);

/// d/dz softplus(z, beta) = sigmoid(beta*z).
double softplus_derivative(double z, double beta);

/// Loss of a single prediction. Quadratic: (y - yhat)^2. Logistic:
/// log(1 + exp(-y*yhat)) with y required to be exactly +1 or -1.
double pointwise_loss(LossKind kind, double y, double yhat);

/// Derivative of pointwise_loss with respect to yhat.
double pointwise_loss_derivative(LossKind kind, double y, double yhat);

double nonlin_value(Nonlinearity g, double z, double beta);
double nonlin_derivative(Nonlinearity g, double z, double beta);

/// Inputs of one boosting stage's optimization problem. `rows` must include
/// the intercept column; `accumulated` caches the output of all earlier
/// stages (including the initial model) on those rows.
struct StageContext {
  Eigen::Ref<const Matrix> rows;
  Eigen::Ref<const Vector> targets;
  Eigen::Ref<const Vector> accumulated;
  double beta = 5.0;
  double lambda = 0.0;
  int sign = 1;
  Nonlinearity nonlin = Nonlinearity::Softplus;
};

/// Regularized stage objective:
///   mean_i loss(y_i, accumulated_i + a + sign * g(w'x_i))  +  lambda * |w|^2 / p.
/// The ridge term divides by the row width p and covers every entry of w,
/// intercept-column weight included. Throws std::invalid_argument on
/// dimension mismatch. May return +inf for overflowing parameters; callers
/// (the optimizer) treat non-finite values as rejected steps.
double stage_objective(double a, const Vector& w, const StageContext& ctx, LossKind kind);

/// Analytic gradient of stage_objective with respect to (a, w).
void stage_gradient(double a, const Vector& w, const StageContext& ctx, LossKind kind,
                    double& da, Vector& dw);

/// Value and gradient in one pass over the rows (what the fit loop feeds the
/// optimizer). Equivalent to calling stage_objective and stage_gradient.
double stage_value_gradient(double a, const Vector& w, const StageContext& ctx, LossKind kind,
                            double& da, Vector& dw);

/// Mean loss of predictions against targets; the unregularized part of the
/// stage objective, and the quantity whose per-stage trajectory must be
/// non-increasing during boosting.
double mean_loss(LossKind kind, const Vector& targets, const Vector& predictions);

}  // namespace gbmap
