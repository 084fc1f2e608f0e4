#include "gbmap/model.hpp"

#include <cmath>

namespace gbmap {

namespace {

void check_input(const GbmapModel& model, const Vector& x, const char* op) {
  if (x.size() != model.p) {
    throw std::invalid_argument(std::string(op) + ": input has size " + std::to_string(x.size()) +
                                ", model expects " + std::to_string(model.p));
  }
}

inline double learner_value(const WeakLearner& lr, const GbmapModel& model, const Vector& x) {
  return lr.a + static_cast<double>(lr.b) *
                    nonlin_value(model.nonlinearity, lr.w.dot(x), model.beta);
}

}  // namespace

double predict(const GbmapModel& model, const Vector& x) {
  check_input(model, x, "predict");
  double acc = model.f0.evaluate(x);
  for (const auto& lr : model.learners) acc += learner_value(lr, model, x);
  return acc;
}

Vector predict_rows(const GbmapModel& model, const Matrix& rows) {
  if (rows.cols() != model.p) {
    throw std::invalid_argument("predict: row width does not match model");
  }
  Vector acc = model.f0.evaluate_rows(rows);
  for (const auto& lr : model.learners) {
    const Vector z = rows * lr.w;
    for (Index i = 0; i < rows.rows(); ++i) {
      acc[i] += lr.a + static_cast<double>(lr.b) * nonlin_value(model.nonlinearity, z[i], model.beta);
    }
  }
  return acc;
}

int predict_class(const GbmapModel& model, const Vector& x) {
  if (model.task != Task::Classification) {
    throw std::logic_error("predict_class: regression model");
  }
  return predict(model, x) >= 0.0 ? +1 : -1;
}

double predict_proba(const GbmapModel& model, const Vector& x) {
  if (model.task != Task::Classification) {
    throw std::logic_error("predict_proba: regression model");
  }
  return sigmoid(predict(model, x));
}

Vector embed(const GbmapModel& model, const Vector& x) {
  check_input(model, x, "embed");
  Vector coords(model.stages());
  for (Index j = 0; j < model.stages(); ++j) {
    coords[j] = learner_value(model.learners[static_cast<size_t>(j)], model, x);
  }
  return coords;
}

Matrix embed_rows(const GbmapModel& model, const Matrix& rows) {
  if (rows.cols() != model.p) {
    throw std::invalid_argument("embed: row width does not match model");
  }
  Matrix coords(rows.rows(), model.stages());
  for (Index j = 0; j < model.stages(); ++j) {
    const auto& lr = model.learners[static_cast<size_t>(j)];
    const Vector z = rows * lr.w;
    for (Index i = 0; i < rows.rows(); ++i) {
      coords(i, j) =
          lr.a + static_cast<double>(lr.b) * nonlin_value(model.nonlinearity, z[i], model.beta);
    }
  }
  return coords;
}

double embedding_distance(const GbmapModel& model, const Vector& x, const Vector& xp) {
  check_input(model, x, "embedding_distance");
  check_input(model, xp, "embedding_distance");
  double dist = 0.0;
  for (const auto& lr : model.learners) {
    dist += std::abs(learner_value(lr, model, x) - learner_value(lr, model, xp));
  }
  return dist;
}

double path_distance(const GbmapModel& model, const Vector& x, const Vector& xp, int grid) {
  check_input(model, x, "path_distance");
  check_input(model, xp, "path_distance");
  if (grid < 2) throw std::invalid_argument("path_distance: grid must be >= 2");

  const Vector delta = xp - x;
  const Index m = model.stages();

  // Along the segment, each stage's projection is affine in t, so its
  // directional derivative needs only two dot products up front.
  Vector base(m), slope(m);
  for (Index j = 0; j < m; ++j) {
    const auto& lr = model.learners[static_cast<size_t>(j)];
    base[j] = lr.w.dot(x);
    slope[j] = lr.w.dot(delta);
  }

  double f0_slope = 0.0;
  const bool f0_linear = model.f0.kind != InitialModel::Kind::Callback;
  if (f0_linear) {
    f0_slope = model.f0.kind == InitialModel::Kind::Zero ? 0.0
                                                         : model.f0.coefficients.dot(delta);
  }

  const double dt = 1.0 / static_cast<double>(grid);
  double total = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double t = (static_cast<double>(i) + 0.5) * dt;
    double dd = f0_slope;
    if (!f0_linear) {
      // External predictors expose no derivative; central difference along t.
      const double h = 1e-6;
      dd = (model.f0.evaluate(x + (t + h) * delta) - model.f0.evaluate(x + (t - h) * delta)) /
           (2.0 * h);
    }
    for (Index j = 0; j < m; ++j) {
      const auto& lr = model.learners[static_cast<size_t>(j)];
      dd += static_cast<double>(lr.b) *
            nonlin_derivative(model.nonlinearity, base[j] + t * slope[j], model.beta) * slope[j];
    }
    total += std::abs(dd);
  }
  return total * dt;
}

Vector local_coefficients(const GbmapModel& model, const Vector& x) {
  check_input(model, x, "local_coefficients");
  Vector coef = model.f0.differentiable() ? model.f0.gradient(model.p) : Vector::Zero(model.p);
  for (const auto& lr : model.learners) {
    coef += static_cast<double>(lr.b) *
            nonlin_derivative(model.nonlinearity, lr.w.dot(x), model.beta) * lr.w;
  }
  return coef;
}

}  // namespace gbmap
