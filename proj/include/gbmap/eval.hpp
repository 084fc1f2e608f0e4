#pragma once

#include <vector>

#include "gbmap/boosting.hpp"

namespace gbmap {

/// Coefficient of determination, 1 - SS_res / SS_tot, with the mean baseline
/// taken over `y` itself. Throws std::invalid_argument when y has zero
/// variance.
double r_squared(const Vector& y, const Vector& yhat);

/// Fraction of entries where sign agreement holds exactly (yhat entries are
/// expected to be class predictions in {-1,+1}).
double accuracy(const Vector& y, const Vector& yhat);

struct CvResult {
  std::vector<double> per_fold;
  double mean = 0.0;
};

/// Fold membership: a seeded shuffle of 0..n-1 cut into `folds` contiguous
/// blocks whose sizes differ by at most one.
std::vector<std::vector<Index>> fold_assignments(Index n, int folds, std::uint64_t seed);

/// Seeded-shuffle k-fold cross validation with contiguous folds (sizes differ
/// by at most one). Every fold refits preprocessing on its training part
/// before fitting, so no statistics leak from held-out rows. The metric is
/// R^2 for regression and accuracy for classification. `raw` is the
/// unpreprocessed dataset.
CvResult kfold_cv(const Dataset& raw, int folds, const FitConfig& config, std::uint64_t seed);

/// Hyperparameter ranges for random search.
struct SearchSpace {
  int m_min = 2;
  int m_max = 150;
  double beta_min = 1.0;
  double beta_max = 20.0;
  double lambda_min = 0.0;
  double lambda_max = 1e-2;
  std::vector<int> maxiter_choices = {200, 400};
};

struct SearchTrial {
  FitConfig config;
  double score = 0.0;
};

struct SearchResult {
  FitConfig best;
  double best_score = 0.0;
  std::vector<SearchTrial> trials;
};

/// Uniform random search over the space, scored by mean CV metric (higher is
/// better). Ties keep the earliest sampled config.
SearchResult random_search(const Dataset& raw, const SearchSpace& space, int budget,
                           const FitConfig& base, std::uint64_t seed, int folds = 5);

struct Pca2d {
  Matrix scores;      // n x 2 projections of the centered points
  Matrix components;  // d x 2, unit columns, largest-magnitude loading positive
  Vector eigenvalues; // top-2 eigenvalues of the covariance
};

/// Two-component PCA by power iteration with deflation (the dense eigensolver
/// exists only in tests, as an independent oracle). Throws NumericError when
/// the points have rank < 2.
Pca2d pca_2d_full(const Matrix& points);
Matrix pca_2d(const Matrix& points);

}  // namespace gbmap
