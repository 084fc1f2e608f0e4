#include "gbmap/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gbmap/model.hpp"
#include "gbmap/rng.hpp"

namespace gbmap {

double r_squared(const Vector& y, const Vector& yhat) {
  if (y.size() != yhat.size() || y.size() == 0) {
    throw std::invalid_argument("r_squared: size mismatch or empty input");
  }
  const double mean = y.mean();
  const double ss_tot = (y.array() - mean).square().sum();
  if (ss_tot < 1e-24 * static_cast<double>(y.size()) * std::max(1.0, mean * mean)) {
    throw std::invalid_argument("r_squared: targets have zero variance");
  }
  const double ss_res = (y - yhat).squaredNorm();
  return 1.0 - ss_res / ss_tot;
}

double accuracy(const Vector& y, const Vector& yhat) {
  if (y.size() != yhat.size() || y.size() == 0) {
    throw std::invalid_argument("accuracy: size mismatch or empty input");
  }
  Index hits = 0;
  for (Index i = 0; i < y.size(); ++i) hits += y[i] == yhat[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(y.size());
}

std::vector<std::vector<Index>> fold_assignments(Index n, int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("kfold: folds must be >= 2");
  if (static_cast<Index>(folds) > n) throw std::invalid_argument("kfold: more folds than rows");

  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed);
  for (Index i = n - 1; i > 0; --i) {  // Fisher-Yates
    const int j = rng.uniform_int(0, static_cast<int>(i));
    std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
  }

  std::vector<std::vector<Index>> out(static_cast<size_t>(folds));
  const Index base = n / folds;
  const Index extra = n % folds;
  size_t pos = 0;
  for (int f = 0; f < folds; ++f) {
    const Index size = base + (static_cast<Index>(f) < extra ? 1 : 0);
    out[static_cast<size_t>(f)].assign(order.begin() + static_cast<long>(pos),
                                       order.begin() + static_cast<long>(pos + static_cast<size_t>(size)));
    pos += static_cast<size_t>(size);
  }
  return out;
}

CvResult kfold_cv(const Dataset& raw, int folds, const FitConfig& config, std::uint64_t seed) {
  const auto assignment = fold_assignments(raw.n(), folds, seed);

  CvResult result;
  for (const auto& test_rows : assignment) {
    std::vector<char> in_test(static_cast<size_t>(raw.n()), 0);
    for (Index r : test_rows) in_test[static_cast<size_t>(r)] = 1;
    std::vector<Index> train_rows;
    train_rows.reserve(static_cast<size_t>(raw.n()) - test_rows.size());
    for (Index r = 0; r < raw.n(); ++r) {
      if (!in_test[static_cast<size_t>(r)]) train_rows.push_back(r);
    }

    const Dataset train_raw = select_rows(raw, train_rows);
    const Dataset test_raw = select_rows(raw, test_rows);
    const PreprocessStats stats = fit_preprocess(train_raw);
    const Dataset train = apply_preprocess(stats, train_raw);
    const Dataset test = apply_preprocess(stats, test_raw);

    FitConfig fold_config = config;
    fold_config.task = raw.task;
    const GbmapModel model = fit(train, fold_config);

    double metric = 0.0;
    if (raw.task == Task::Regression) {
      metric = r_squared(test.y, predict_rows(model, test.x));
    } else {
      Vector classes(test.n());
      for (Index i = 0; i < test.n(); ++i) {
        classes[i] = predict_class(model, test.x.row(i).transpose());
      }
      metric = accuracy(test.y, classes);
    }
    result.per_fold.push_back(metric);
  }

  result.mean = std::accumulate(result.per_fold.begin(), result.per_fold.end(), 0.0) /
                static_cast<double>(result.per_fold.size());
  return result;
}

SearchResult random_search(const Dataset& raw, const SearchSpace& space, int budget,
                           const FitConfig& base, std::uint64_t seed, int folds) {
  if (budget < 1) throw std::invalid_argument("random_search: budget must be >= 1");
  if (space.m_min < 1 || space.m_min > space.m_max || !(space.beta_min > 0.0) ||
      space.beta_min > space.beta_max || space.lambda_min < 0.0 ||
      space.lambda_min > space.lambda_max || space.maxiter_choices.empty()) {
    throw std::invalid_argument("random_search: malformed search space");
  }

  Rng rng(seed);
  // One fold layout shared by every trial, so configs compete on equal splits.
  const std::uint64_t cv_seed = mix_seed(seed, 0x51F5ULL);

  SearchResult result;
  bool have_best = false;
  for (int trial = 0; trial < budget; ++trial) {
    FitConfig config = base;
    config.task = raw.task;
    config.m = rng.uniform_int(space.m_min, space.m_max);
    config.beta = rng.uniform(space.beta_min, space.beta_max);
    config.lambda = rng.uniform(space.lambda_min, space.lambda_max);
    config.optimizer.max_iterations =
        space.maxiter_choices[static_cast<size_t>(rng.uniform_int(
            0, static_cast<int>(space.maxiter_choices.size()) - 1))];

    const double score = kfold_cv(raw, folds, config, cv_seed).mean;
    result.trials.push_back({config, score});
    if (!have_best || score > result.best_score) {
      result.best = config;
      result.best_score = score;
      have_best = true;
    }
  }
  return result;
}

namespace {

// Leading eigenpair of a symmetric PSD matrix by power iteration. The start
// vector comes from a fixed-seed generator, so results are reproducible.
std::pair<double, Vector> leading_eigenpair(const Matrix& c, std::uint64_t seed) {
  Rng rng(seed);
  Vector v = rng.unit_vector(c.cols());
  double rayleigh = 0.0;
  for (int iter = 0; iter < 20000; ++iter) {
    Vector cv = c * v;
    const double norm = cv.norm();
    if (norm < 1e-300) return {0.0, v};
    cv /= norm;
    const double next = cv.dot(c * cv);
    const bool settled = std::abs(next - rayleigh) <= 1e-14 * (1.0 + std::abs(next));
    v = std::move(cv);
    rayleigh = next;
    if (settled && iter > 2) break;
  }
  return {rayleigh, v};
}

void fix_sign(Vector& v) {
  Index arg = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
  }
  if (v[arg] < 0.0) v = -v;
}

}  // namespace

Pca2d pca_2d_full(const Matrix& points) {
  if (points.rows() < 2 || points.cols() < 2) {
    throw NumericError("pca_2d: need at least 2 rows and 2 columns");
  }
  const Matrix centered = points.rowwise() - points.colwise().mean();
  Matrix cov = (centered.transpose() * centered) / static_cast<double>(points.rows());

  Pca2d out;
  out.components.resize(points.cols(), 2);
  out.eigenvalues.resize(2);
  for (int comp = 0; comp < 2; ++comp) {
    auto [value, vec] = leading_eigenpair(cov, 0x9CA0000 + static_cast<std::uint64_t>(comp));
    fix_sign(vec);
    out.eigenvalues[comp] = value;
    out.components.col(comp) = vec;
    cov -= value * (vec * vec.transpose());  // deflate
  }

  if (!(out.eigenvalues[0] > 0.0) ||
      out.eigenvalues[1] <= 1e-12 * out.eigenvalues[0]) {
    throw NumericError("pca_2d: points have rank < 2");
  }
  out.scores = centered * out.components;
  return out;
}

Matrix pca_2d(const Matrix& points) { return pca_2d_full(points).scores; }

}  // namespace gbmap
