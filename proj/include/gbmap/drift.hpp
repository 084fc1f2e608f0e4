#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "gbmap/neighbors.hpp"

namespace gbmap {

/// Output of the drift benchmark construction: training half a1, in-distribution
/// evaluation half a2, out-of-distribution half b, with the chosen feature
/// already dropped from all three.
struct DriftSplit {
  Dataset a1;
  Dataset a2;
  Dataset b;
  std::string dropped_feature;
  double drift_magnitude = 0.0;  // loss(b) - loss(a2) for the chosen feature
};

struct DriftReport {
  std::vector<double> indicators;
  std::vector<double> losses;
  std::vector<bool> labels;
  double threshold = 0.0;
  std::vector<std::pair<double, double>> roc;  // (fpr, tpr), (0,0) to (1,1)
  std::optional<double> auc;  // empty when the labels are all-true or all-false
};

/// Builds the drift benchmark from a raw dataset. For every numeric feature:
/// sort by it, halve into low part a and high part b, randomly halve a into
/// a1/a2 (seeded), drop the feature, fit on a1 (with its own preprocessing)
/// and measure mean loss on a2 and on b. Keeps the feature maximizing
/// loss(b) - loss(a2). Deterministic for a fixed seed. Requires >= 2 numeric
/// features and n >= 8.
DriftSplit make_drift_split(const Dataset& data, const FitConfig& config, std::uint64_t seed);

/// Model-based drift indicator |f(x) - f_kNN(x)|: for regression f_kNN is the
/// neighbor target mean, for classification the neighbor prediction mean,
/// both under the embedding metric. `train_search` must be an
/// embedding-metric search over the training rows.
double gbmap_indicator(const GbmapModel& model, const NeighborSearch& train_search,
                       const Vector& query, int k = 5);
double gbmap_indicator(const GbmapModel& model, const Dataset& train, const Vector& query,
                       int k = 5);

/// Baseline indicator: Euclidean distance from the query to its k-th nearest
/// training row.
double euclid_indicator(const NeighborSearch& train_search, const Vector& query, int k = 5);
double euclid_indicator(const Dataset& train, const Vector& query, int k = 5);

/// Linear score model for classification ground truth: coefficients of
/// argmin_w mean_i log(1 + exp(-y_i w'x_i)) over the complete data
/// (unregularized, fitted by LBFGS).
Vector fit_score_model(const Dataset& complete, const OptimizerConfig& config = {});

/// Ground-truth pointwise loss used to define drift labels. Regression:
/// (y - f(x))^2. Classification: (s - f(x))^2 with s = score_model'x, so the
/// label measures disagreement on the continuous score rather than the
/// sampled class.
double ground_truth_loss(const GbmapModel& model, const Vector& x, double y,
                         const std::optional<Vector>& score_model = std::nullopt);

/// Linear-interpolation quantile (values copied and sorted). q in [0, 1].
double quantile_linear(std::vector<double> values, double q);

/// Thresholds the reference losses at the given quantile, labels every
/// evaluation point as drifted iff its loss exceeds that threshold, then
/// sweeps the indicator over all distinct cut points to produce a ROC curve
/// and its trapezoidal AUC. Degenerate labels leave `auc` unset.
DriftReport label_and_score(const std::vector<double>& reference_losses,
                            const std::vector<double>& losses,
                            const std::vector<double>& indicators, double quantile = 0.95);

}  // namespace gbmap
