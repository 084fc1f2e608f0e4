#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "gbmap/neighbors.hpp"
#include "gbmap/rng.hpp"
#include "oracles.hpp"

using namespace gbmap;

namespace {

Dataset toy_train(Index n, Index p, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  d.x.resize(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p - 1; ++j) d.x(i, j) = rng.normal();
  d.x.col(p - 1).setOnes();
  d.y.resize(n);
  for (Index i = 0; i < n; ++i) d.y[i] = rng.normal();
  d.feature_names.resize(static_cast<size_t>(p), "x");
  d.feature_names.back() = "intercept";
  d.has_intercept = true;
  d.task = Task::Regression;
  return d;
}

}  // namespace

TEST_CASE("neighbor ranking agrees with a brute-force reference, both metrics") {
  const Dataset train = toy_train(30, 5, 301);
  FitConfig config;
  config.m = 4;
  const GbmapModel model = fit(train, config);

  const NeighborSearch euclid(train, MetricKind::euclidean());
  const NeighborSearch emb(train, MetricKind::embedding(model));

  Rng rng(302);
  for (int q = 0; q < 10; ++q) {
    Vector query(5);
    for (Index j = 0; j < 4; ++j) query[j] = rng.normal();
    query[4] = 1.0;

    for (int k : {1, 3, 5, 30}) {
      const auto got_e = euclid.indices(query, k);
      const auto want_e = oracles::knn_brute(train.x, query, k, false);
      CHECK(got_e == want_e);

      const Matrix train_coords = embed_rows(model, train.x);
      const Vector query_coords = embed(model, query);
      const auto got_m = emb.indices(query, k);
      const auto want_m = oracles::knn_brute(train_coords, query_coords, k, true);
      CHECK(got_m == want_m);
    }
  }
}

TEST_CASE("exact distance ties resolve toward the lower index") {
  Dataset train;
  train.x.resize(4, 1);
  train.x << 5.0, 1.0, 1.0, 1.0;  // three identical rows
  train.y.resize(4);
  train.y << 0.0, 1.0, 2.0, 3.0;
  train.feature_names = {"x"};
  train.task = Task::Regression;

  const NeighborSearch search(train, MetricKind::euclidean());
  Vector query(1);
  query << 1.0;
  CHECK(search.indices(query, 2) == std::vector<Index>{1, 2});
  CHECK(search.indices(query, 4) == std::vector<Index>{1, 2, 3, 0});
}

TEST_CASE("a training row is its own nearest neighbor") {
  const Dataset train = toy_train(25, 4, 303);
  const NeighborSearch search(train, MetricKind::euclidean());
  for (Index i = 0; i < train.n(); ++i) {
    const auto got = search.indices(train.x.row(i).transpose(), 1);
    CHECK(got == std::vector<Index>{i});
    CHECK(search.kth_distance(train.x.row(i).transpose(), 1) == 0.0);
  }
}

TEST_CASE("regression vote is the mean target over neighbors") {
  const Dataset train = toy_train(20, 3, 304);
  const NeighborSearch search(train, MetricKind::euclidean());
  Rng rng(305);
  Vector query(3);
  query << rng.normal(), rng.normal(), 1.0;
  const auto ids = search.indices(query, 4);
  double mean = 0.0;
  for (Index i : ids) mean += train.y[i];
  mean /= 4.0;
  CHECK(search.regress(query, 4) == doctest::Approx(mean).epsilon(1e-15));
  CHECK(knn_regress(train, MetricKind::euclidean(), query, 4) ==
        doctest::Approx(mean).epsilon(1e-15));
}

TEST_CASE("classification vote averages model scores over embedding neighbors") {
  Dataset train = toy_train(40, 4, 306);
  Rng rng(307);
  for (Index i = 0; i < train.n(); ++i) train.y[i] = rng.uniform() < 0.5 ? 1.0 : -1.0;
  train.task = Task::Classification;

  FitConfig config;
  config.m = 3;
  config.task = Task::Classification;
  const GbmapModel model = fit(train, config);

  const NeighborSearch search(train, MetricKind::embedding(model));
  Vector query(4);
  query << 0.1, -0.3, 0.8, 1.0;
  const auto ids = search.indices(query, 5);
  double mean = 0.0;
  for (Index i : ids) mean += predict(model, train.x.row(i).transpose());
  mean /= 5.0;
  CHECK(search.score(query, 5) == doctest::Approx(mean).epsilon(1e-12));
  CHECK(knn_score(model, train, query, 5) == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("kth_distance reports the distance of the last ranked neighbor") {
  Dataset train;
  train.x.resize(3, 1);
  train.x << 0.0, 1.0, 10.0;
  train.y = Vector::Zero(3);
  train.feature_names = {"x"};
  train.task = Task::Regression;
  const NeighborSearch search(train, MetricKind::euclidean());
  Vector query(1);
  query << 0.0;
  CHECK(search.kth_distance(query, 1) == 0.0);
  CHECK(search.kth_distance(query, 2) == 1.0);
  CHECK(search.kth_distance(query, 3) == 10.0);
}

TEST_CASE("embedding neighbor sets survive pure-noise covariates that scramble Euclidean ones") {
  // the same signal with and without eight loud noise dimensions appended;
  // a ridge strong enough that the fit gives the noise (near-)zero weight.
  // Under each metric, compare the neighbor sets before and after.
  const Index n = 1200, p_signal = 2, p_noise = 8;
  Rng rng(308);
  Dataset base;
  base.x.resize(n, p_signal + 1);
  base.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p_signal; ++j) base.x(i, j) = rng.normal();
    base.x(i, p_signal) = 1.0;
    base.y[i] = std::cos(base.x(i, 0)) + std::cos(base.x(i, 1));
  }
  base.feature_names = {"s0", "s1", "intercept"};
  base.has_intercept = true;
  base.task = Task::Regression;

  Dataset noisy;
  noisy.x.resize(n, p_signal + p_noise + 1);
  noisy.x.leftCols(p_signal) = base.x.leftCols(p_signal);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p_noise; ++j) noisy.x(i, p_signal + j) = 2.0 * rng.normal();
  noisy.x.col(p_signal + p_noise).setOnes();
  noisy.y = base.y;
  noisy.feature_names = {"s0", "s1", "n0", "n1", "n2", "n3",
                         "n4", "n5", "n6", "n7", "intercept"};
  noisy.has_intercept = true;
  noisy.task = Task::Regression;

  FitConfig config;
  config.m = 8;
  config.lambda = 1e-2;
  config.seed = 9;
  const GbmapModel model_base = fit(base, config);
  const GbmapModel model_noisy = fit(noisy, config);

  // precondition of the claim: the noise columns really are ignored
  double signal_mass = 0.0, noise_mass = 0.0;
  for (const auto& learner : model_noisy.learners) {
    for (Index j = 0; j < p_signal; ++j) signal_mass += std::abs(learner.w[j]);
    for (Index j = 0; j < p_noise; ++j) noise_mass += std::abs(learner.w[p_signal + j]);
  }
  REQUIRE(noise_mass < 0.15 * signal_mass);

  const NeighborSearch emb_before(base, MetricKind::embedding(model_base));
  const NeighborSearch emb_after(noisy, MetricKind::embedding(model_noisy));
  const NeighborSearch euc_before(base, MetricKind::euclidean());
  const NeighborSearch euc_after(noisy, MetricKind::euclidean());

  const int k = 15;
  const int queries = 100;
  double euclid_retained = 0.0, emb_retained = 0.0;
  Rng qrng(777);
  for (int q = 0; q < queries; ++q) {
    const Index row = static_cast<Index>(qrng.uniform_int(0, static_cast<int>(n) - 1));
    const auto overlap = [&](const std::vector<Index>& before,
                             const std::vector<Index>& after) {
      const std::set<Index> ref(before.begin(), before.end());
      double hits = 0.0;
      for (Index i : after) hits += ref.count(i) ? 1.0 : 0.0;
      return hits / k;
    };
    emb_retained += overlap(emb_before.indices(base.x.row(row).transpose(), k),
                            emb_after.indices(noisy.x.row(row).transpose(), k));
    euclid_retained += overlap(euc_before.indices(base.x.row(row).transpose(), k),
                               euc_after.indices(noisy.x.row(row).transpose(), k));
  }
  emb_retained /= queries;
  euclid_retained /= queries;

  CHECK(emb_retained >= 0.6);
  CHECK(euclid_retained < 0.4);
}

TEST_CASE("neighbor search validates its inputs") {
  const Dataset train = toy_train(10, 3, 309);
  const NeighborSearch search(train, MetricKind::euclidean());
  Vector query = Vector::Zero(3);
  CHECK_THROWS_AS(search.indices(query, 0), std::invalid_argument);
  CHECK_THROWS_AS(search.indices(query, 11), std::invalid_argument);
  CHECK_THROWS_AS(search.indices(Vector::Zero(2), 3), std::invalid_argument);
  CHECK_THROWS_AS(search.score(query, 3), std::logic_error);  // no model attached

  MetricKind no_model;
  no_model.kind = MetricKind::Kind::EmbeddingManhattan;
  CHECK_THROWS_AS(NeighborSearch(train, no_model), std::invalid_argument);

  Dataset empty;
  empty.task = Task::Regression;
  CHECK_THROWS_AS(NeighborSearch(empty, MetricKind::euclidean()), std::invalid_argument);
}
