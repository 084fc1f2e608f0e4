#include "gbmap/drift.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gbmap {

namespace {

struct CandidateSplit {
  std::vector<Index> a1, a2, b;
};

// Sort rows by the candidate feature, cut into low half a / high half b,
// then randomly halve a. Odd counts leave the extra row in the first part.
CandidateSplit split_by_feature(const Dataset& data, Index feature, std::uint64_t seed) {
  const Index n = data.n();
  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index lhs, Index rhs) {
    return data.x(lhs, feature) < data.x(rhs, feature);
  });

  const Index na = (n + 1) / 2;
  std::vector<Index> a(order.begin(), order.begin() + na);
  CandidateSplit split;
  split.b.assign(order.begin() + na, order.end());

  Rng rng(seed);
  for (Index i = static_cast<Index>(a.size()) - 1; i > 0; --i) {
    const int j = rng.uniform_int(0, static_cast<int>(i));
    std::swap(a[static_cast<size_t>(i)], a[static_cast<size_t>(j)]);
  }
  const Index na1 = (na + 1) / 2;
  split.a1.assign(a.begin(), a.begin() + na1);
  split.a2.assign(a.begin() + na1, a.end());
  return split;
}

double holdout_loss(const GbmapModel& model, LossKind kind, const Dataset& part) {
  return mean_loss(kind, part.y, predict_rows(model, part.x));
}

}  // namespace

DriftSplit make_drift_split(const Dataset& data, const FitConfig& config, std::uint64_t seed) {
  if (data.n() < 8) throw std::invalid_argument("make_drift_split: need at least 8 rows");
  if (data.y.size() != data.n()) throw std::invalid_argument("make_drift_split: missing targets");

  // Candidates: numeric, non-constant features. Categorical codes have no
  // meaningful sort order, and a constant column cannot define halves.
  std::vector<Index> candidates;
  for (Index j = 0; j < data.p(); ++j) {
    if (data.is_categorical(j)) continue;
    const double lo = data.x.col(j).minCoeff();
    const double hi = data.x.col(j).maxCoeff();
    if (hi > lo) candidates.push_back(j);
  }
  if (candidates.size() < 2) {
    throw std::invalid_argument("make_drift_split: need at least 2 usable numeric features");
  }

  const LossKind kind = loss_for(data.task);
  FitConfig fit_config = config;
  fit_config.task = data.task;

  DriftSplit best;
  bool have_best = false;
  for (Index j : candidates) {
    const std::uint64_t feature_seed = mix_seed(seed, static_cast<std::uint64_t>(j));
    const CandidateSplit split = split_by_feature(data, j, feature_seed);

    const Dataset a1_raw = drop_column(select_rows(data, split.a1), j);
    const Dataset a2_raw = drop_column(select_rows(data, split.a2), j);
    const Dataset b_raw = drop_column(select_rows(data, split.b), j);

    const PreprocessStats stats = fit_preprocess(a1_raw);
    const GbmapModel model = fit(apply_preprocess(stats, a1_raw), fit_config);
    const double loss_a2 = holdout_loss(model, kind, apply_preprocess(stats, a2_raw));
    const double loss_b = holdout_loss(model, kind, apply_preprocess(stats, b_raw));
    const double magnitude = loss_b - loss_a2;

    if (!have_best || magnitude > best.drift_magnitude) {
      best.a1 = a1_raw;
      best.a2 = a2_raw;
      best.b = b_raw;
      best.dropped_feature = data.feature_names[static_cast<size_t>(j)];
      best.drift_magnitude = magnitude;
      have_best = true;
    }
  }
  return best;
}

double gbmap_indicator(const GbmapModel& model, const NeighborSearch& train_search,
                       const Vector& query, int k) {
  if (train_search.metric().kind != MetricKind::Kind::EmbeddingManhattan) {
    throw std::invalid_argument("gbmap_indicator: search must use the embedding metric");
  }
  const double f = predict(model, query);
  const double f_knn = model.task == Task::Regression ? train_search.regress(query, k)
                                                      : train_search.score(query, k);
  return std::abs(f - f_knn);
}

double gbmap_indicator(const GbmapModel& model, const Dataset& train, const Vector& query,
                       int k) {
  return gbmap_indicator(model, NeighborSearch(train, MetricKind::embedding(model)), query, k);
}

double euclid_indicator(const NeighborSearch& train_search, const Vector& query, int k) {
  if (train_search.metric().kind != MetricKind::Kind::EuclideanOriginal) {
    throw std::invalid_argument("euclid_indicator: search must use the Euclidean metric");
  }
  return train_search.kth_distance(query, k);
}

double euclid_indicator(const Dataset& train, const Vector& query, int k) {
  return euclid_indicator(NeighborSearch(train, MetricKind::euclidean()), query, k);
}

Vector fit_score_model(const Dataset& complete, const OptimizerConfig& config) {
  if (complete.n() < 2) throw std::invalid_argument("fit_score_model: need at least 2 rows");
  for (Index i = 0; i < complete.y.size(); ++i) {
    if (complete.y[i] != 1.0 && complete.y[i] != -1.0) {
      throw std::invalid_argument("fit_score_model: targets must be exactly +1 or -1");
    }
  }

  const Matrix& x = complete.x;
  const Vector& y = complete.y;
  const ObjectiveFn objective = [&x, &y](const Vector& w, Vector* grad) {
    const Vector z = x * w;
    const double inv_n = 1.0 / static_cast<double>(x.rows());
    double loss = 0.0;
    if (grad) {
      Vector chain(x.rows());
      for (Index i = 0; i < x.rows(); ++i) {
        const double t = -y[i] * z[i];
        loss += t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
        chain[i] = -y[i] * sigmoid(t);
      }
      *grad = (x.transpose() * chain) * inv_n;
    } else {
      for (Index i = 0; i < x.rows(); ++i) {
        const double t = -y[i] * z[i];
        loss += t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
      }
    }
    return loss * inv_n;
  };

  return minimize(objective, Vector::Zero(x.cols()), config).solution;
}

double ground_truth_loss(const GbmapModel& model, const Vector& x, double y,
                         const std::optional<Vector>& score_model) {
  const double f = predict(model, x);
  if (model.task == Task::Regression) {
    const double r = y - f;
    return r * r;
  }
  if (!score_model.has_value()) {
    throw std::invalid_argument("ground_truth_loss: classification needs a score model");
  }
  if (score_model->size() != x.size()) {
    throw std::invalid_argument("ground_truth_loss: score model size mismatch");
  }
  const double r = score_model->dot(x) - f;
  return r * r;
}

double quantile_linear(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty input");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q must be in [0,1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

DriftReport label_and_score(const std::vector<double>& reference_losses,
                            const std::vector<double>& losses,
                            const std::vector<double>& indicators, double quantile) {
  if (losses.size() != indicators.size() || losses.empty()) {
    throw std::invalid_argument("label_and_score: losses/indicators size mismatch or empty");
  }

  DriftReport report;
  report.indicators = indicators;
  report.losses = losses;
  report.threshold = quantile_linear(reference_losses, quantile);
  report.labels.reserve(losses.size());
  size_t positives = 0;
  for (double loss : losses) {
    const bool drifted = loss > report.threshold;
    report.labels.push_back(drifted);
    positives += drifted ? 1 : 0;
  }
  const size_t negatives = losses.size() - positives;
  if (positives == 0 || negatives == 0) {
    return report;  // auc stays unset: one-class labels make it undefined
  }

  // Sweep every distinct indicator value from +inf downward; tied values move
  // as a block, which also makes the curve invariant under strictly monotone
  // transforms of the indicator.
  std::vector<size_t> order(indicators.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t lhs, size_t rhs) {
    if (indicators[lhs] != indicators[rhs]) return indicators[lhs] > indicators[rhs];
    return lhs < rhs;
  });

  report.roc.emplace_back(0.0, 0.0);
  size_t tp = 0, fp = 0;
  double auc = 0.0;
  size_t i = 0;
  while (i < order.size()) {
    const double value = indicators[order[i]];
    while (i < order.size() && indicators[order[i]] == value) {
      if (report.labels[order[i]]) ++tp;
      else ++fp;
      ++i;
    }
    const double fpr = static_cast<double>(fp) / static_cast<double>(negatives);
    const double tpr = static_cast<double>(tp) / static_cast<double>(positives);
    const auto& prev = report.roc.back();
    auc += (fpr - prev.first) * (tpr + prev.second) * 0.5;
    report.roc.emplace_back(fpr, tpr);
  }
  report.auc = auc;
  return report;
}

}  // namespace gbmap
