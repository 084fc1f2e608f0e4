#include "gbmap/neighbors.hpp"

#include <algorithm>
#include <cmath>

namespace gbmap {

NeighborSearch::NeighborSearch(const Dataset& train, const MetricKind& metric)
    : metric_(metric) {
  if (train.n() < 1) throw std::invalid_argument("NeighborSearch: empty training set");
  if (metric.kind == MetricKind::Kind::EmbeddingManhattan) {
    if (!metric.model) throw std::invalid_argument("NeighborSearch: embedding metric needs a model");
    points_ = embed_rows(*metric.model, train.x);
    model_scores_ = predict_rows(*metric.model, train.x);
  } else {
    points_ = train.x;
  }
  targets_ = train.y;
}

std::vector<std::pair<double, Index>> NeighborSearch::ranked(const Vector& query, int k) const {
  if (k < 1) throw std::invalid_argument("knn: k must be >= 1");
  if (k > points_.rows()) {
    throw std::invalid_argument("knn: k = " + std::to_string(k) + " exceeds training size " +
                                std::to_string(points_.rows()));
  }

  Vector q;
  if (metric_.kind == MetricKind::Kind::EmbeddingManhattan) {
    q = embed(*metric_.model, query);
  } else {
    if (query.size() != points_.cols()) {
      throw std::invalid_argument("knn: query width does not match training data");
    }
    q = query;
  }

  std::vector<std::pair<double, Index>> all(static_cast<size_t>(points_.rows()));
  for (Index i = 0; i < points_.rows(); ++i) {
    const double d = metric_.kind == MetricKind::Kind::EmbeddingManhattan
                         ? (points_.row(i).transpose() - q).lpNorm<1>()
                         : (points_.row(i).transpose() - q).norm();
    all[static_cast<size_t>(i)] = {d, i};
  }
  // (distance, index) pairs order ties toward the lower row index.
  std::partial_sort(all.begin(), all.begin() + k, all.end());
  all.resize(static_cast<size_t>(k));
  return all;
}

std::vector<Index> NeighborSearch::indices(const Vector& query, int k) const {
  const auto top = ranked(query, k);
  std::vector<Index> out;
  out.reserve(top.size());
  for (const auto& [d, i] : top) out.push_back(i);
  return out;
}

double NeighborSearch::regress(const Vector& query, int k) const {
  if (targets_.size() != points_.rows()) {
    throw std::logic_error("knn_regress: training set has no targets");
  }
  const auto top = ranked(query, k);
  double sum = 0.0;
  for (const auto& [d, i] : top) sum += targets_[i];
  return sum / static_cast<double>(k);
}

double NeighborSearch::score(const Vector& query, int k) const {
  if (metric_.kind != MetricKind::Kind::EmbeddingManhattan) {
    throw std::logic_error("knn_score: requires the embedding metric");
  }
  const auto top = ranked(query, k);
  double sum = 0.0;
  for (const auto& [d, i] : top) sum += model_scores_[i];
  return sum / static_cast<double>(k);
}

double NeighborSearch::kth_distance(const Vector& query, int k) const {
  return ranked(query, k).back().first;
}

std::vector<Index> knn_indices(const Dataset& train, const MetricKind& metric,
                               const Vector& query, int k) {
  return NeighborSearch(train, metric).indices(query, k);
}

double knn_regress(const Dataset& train, const MetricKind& metric, const Vector& query, int k) {
  return NeighborSearch(train, metric).regress(query, k);
}

double knn_score(const GbmapModel& model, const Dataset& train, const Vector& query, int k) {
  if (model.task != Task::Classification) {
    throw std::logic_error("knn_score: requires a classification model");
  }
  return NeighborSearch(train, MetricKind::embedding(model)).score(query, k);
}

}  // namespace gbmap
