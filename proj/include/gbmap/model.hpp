#pragma once

#include "gbmap/boosting.hpp"

namespace gbmap {

/// Ensemble output f(x) = f0(x) + sum_j (a_j + b_j g(w_j'x)). Summation runs
/// in stage order, so predict(x) equals f0(x) plus the running sum of
/// embed(x) coordinates exactly, with no reordering slack.
double predict(const GbmapModel& model, const Vector& x);
Vector predict_rows(const GbmapModel& model, const Matrix& rows);

/// sign(f(x)) with sign(0) = +1. Classification models only.
int predict_class(const GbmapModel& model, const Vector& x);

/// sigmoid(f(x)), the probability of class +1. Classification models only.
double predict_proba(const GbmapModel& model, const Vector& x);

/// Per-stage coordinates (f_1(x), ..., f_m(x)). The initial model is not a
/// coordinate.
Vector embed(const GbmapModel& model, const Vector& x);
Matrix embed_rows(const GbmapModel& model, const Matrix& rows);

/// Manhattan distance between embeddings: sum_j |f_j(x) - f_j(x')|.
double embedding_distance(const GbmapModel& model, const Vector& x, const Vector& xp);

/// Arc length of f along the segment from x to x': the integral of
/// |d/dt f(x + t(x'-x))| over [0,1], midpoint rule on `grid` cells. The
/// directional derivative is exact for the learner stages and for Zero/Linear
/// initial models; a Callback initial model falls back to a central
/// difference along t. Sandwiched between |f(x')-f(x)| and the embedding
/// distance (up to quadrature error). grid must be >= 2.
double path_distance(const GbmapModel& model, const Vector& x, const Vector& xp, int grid);

/// Gradient of f at x: sum_j b_j sigmoid(beta w_j'x) w_j, plus the initial
/// model's gradient when it has one (zero contribution otherwise). Acts as
/// the local linear explanation of the prediction.
Vector local_coefficients(const GbmapModel& model, const Vector& x);

}  // namespace gbmap
