#pragma once

#include <vector>

#include "gbmap/model.hpp"

namespace gbmap {

/// Distance used for neighbor queries: Euclidean over the original covariate
/// space, or Manhattan over a model's embedding coordinates.
struct MetricKind {
  enum class Kind { EuclideanOriginal, EmbeddingManhattan };

  Kind kind = Kind::EuclideanOriginal;
  const GbmapModel* model = nullptr;  // EmbeddingManhattan only

  static MetricKind euclidean() { return {}; }
  static MetricKind embedding(const GbmapModel& m) {
    return {Kind::EmbeddingManhattan, &m};
  }
};

/// Brute-force k-nearest-neighbor search. Train-side work (embeddings, model
/// scores) happens once at construction; queries are O(n p) or O(n m + m p).
/// Ties in distance resolve toward the lower row index.
class NeighborSearch {
 public:
  NeighborSearch(const Dataset& train, const MetricKind& metric);

  /// k nearest training rows, sorted by (distance, index). 1 <= k <= n.
  std::vector<Index> indices(const Vector& query, int k) const;

  /// Mean training target over the k nearest rows.
  double regress(const Vector& query, int k) const;

  /// Mean model prediction f(x_i) over the k nearest rows (embedding metric
  /// with a classification model).
  double score(const Vector& query, int k) const;

  /// Distance to the k-th nearest training row.
  double kth_distance(const Vector& query, int k) const;

  Index size() const { return points_.rows(); }
  const MetricKind& metric() const { return metric_; }

 private:
  std::vector<std::pair<double, Index>> ranked(const Vector& query, int k) const;

  MetricKind metric_;
  Matrix points_;        // train covariates (Euclidean) or train embeddings (Manhattan)
  Vector targets_;
  Vector model_scores_;  // f(x_i) on train rows; embedding metric only
};

std::vector<Index> knn_indices(const Dataset& train, const MetricKind& metric,
                               const Vector& query, int k);
double knn_regress(const Dataset& train, const MetricKind& metric, const Vector& query, int k);

/// kNN vote in prediction space: mean of f(x_i) over embedding-metric
/// neighbors. Requires a classification model.
double knn_score(const GbmapModel& model, const Dataset& train, const Vector& query, int k);

}  // namespace gbmap
