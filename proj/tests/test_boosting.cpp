#include <cmath>

#include "doctest.h"
#include "gbmap/boosting.hpp"
#include "gbmap/model.hpp"
#include "gbmap/rng.hpp"
#include "oracles.hpp"

using namespace gbmap;

namespace {

Dataset random_regression(Index n, Index p, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  d.x.resize(n, p + 1);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) d.x(i, j) = rng.normal();
    d.x(i, p) = 1.0;
  }
  d.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    d.y[i] = std::sin(d.x(i, 0)) + 0.5 * d.x(i, 1) * d.x(i, 1) + 0.1 * rng.normal();
  }
  d.feature_names.resize(static_cast<size_t>(p + 1));
  for (Index j = 0; j < p; ++j) d.feature_names[static_cast<size_t>(j)] = "x" + std::to_string(j);
  d.feature_names.back() = "intercept";
  d.has_intercept = true;
  d.task = Task::Regression;
  return d;
}

Dataset random_classification(Index n, Index p, std::uint64_t seed) {
  Dataset d = random_regression(n, p, seed);
  Rng rng(seed ^ 0xC15);
  for (Index i = 0; i < n; ++i) {
    const double prob = 1.0 / (1.0 + std::exp(-2.0 * d.y[i]));
    d.y[i] = rng.uniform() < prob ? 1.0 : -1.0;
  }
  d.task = Task::Classification;
  return d;
}

}  // namespace

TEST_CASE("first stage with identity nonlinearity and no ridge recovers least squares") {
  // with g(z) = z and quadratic loss the stage objective is exactly the OLS
  // problem, so stage one must match the normal equations and later stages
  // have nothing left to fit
  const Dataset d = random_regression(300, 4, 501);
  FitConfig config;
  config.m = 3;
  config.lambda = 0.0;
  config.nonlinearity = Nonlinearity::Identity;
  config.task = Task::Regression;
  config.optimizer.gradient_tolerance = 1e-12;
  config.optimizer.max_iterations = 2000;
  config.seed = 7;
  const GbmapModel model = fit(d, config);
  REQUIRE(model.stages() == 3);

  const Vector ols = oracles::ols_normal_equations(d.x, d.y);

  // a and the intercept-column weight are interchangeable here, so compare
  // the effective affine map: slope b*w and total intercept a + b*w_last
  const WeakLearner& first = model.learners[0];
  const double b = static_cast<double>(first.b);
  for (Index j = 0; j < 4; ++j) {
    CHECK(b * first.w[j] == doctest::Approx(ols[j]).epsilon(1e-6));
  }
  CHECK(first.a + b * first.w[4] == doctest::Approx(ols[4]).epsilon(1e-6));

  // stages two and three contribute materially nothing
  for (Index s = 1; s < 3; ++s) {
    const WeakLearner& extra = model.learners[static_cast<size_t>(s)];
    Vector probe(5);
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
      for (Index j = 0; j < 4; ++j) probe[j] = rng.normal();
      probe[4] = 1.0;
      const double contribution =
          extra.a + static_cast<double>(extra.b) * probe.dot(extra.w);
      CHECK(std::abs(contribution) < 1e-5);
    }
  }

  // and the training loss matches the OLS residual mean square
  const Vector residual = d.y - d.x * ols;
  CHECK(model.training_loss.back() ==
        doctest::Approx(residual.squaredNorm() / 300.0).epsilon(1e-9));
}

TEST_CASE("identity stage under logistic loss matches a slow reference solver") {
  Rng rng(502);
  const Index n = 60, p = 3;
  Dataset d;
  d.x.resize(n, p + 1);
  d.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double cls = i % 2 == 0 ? 1.0 : -1.0;
    for (Index j = 0; j < p; ++j) d.x(i, j) = rng.normal() + 0.6 * cls;
    d.x(i, p) = 1.0;
    d.y[i] = cls;
  }
  d.task = Task::Classification;
  d.has_intercept = true;
  d.feature_names = {"x0", "x1", "x2", "intercept"};

  const double lambda = 0.1;
  FitConfig config;
  config.m = 1;
  config.lambda = lambda;
  config.task = Task::Classification;
  config.nonlinearity = Nonlinearity::Identity;
  config.optimizer.gradient_tolerance = 1e-11;
  config.optimizer.max_iterations = 2000;
  const GbmapModel model = fit(d, config);
  REQUIRE(model.stages() == 1);

  // design for the reference solver: x without the intercept column, since
  // its theta already carries a separate bias slot
  const Matrix design = d.x.leftCols(p);
  const Vector slow = oracles::slow_gradient_descent(
      [&](const Vector& t, Vector& g) {
        return oracles::logistic_ridge_value_grad(design, d.y, lambda, t, g);
      },
      Vector::Zero(p + 1), 1e-2, 1500000);

  // the reference ridge spans p slope terms while the stage splits its own
  // ridge over p+1 weights, so compare reachable objective values under the
  // stage's convention instead of coefficients
  const Vector zeros = Vector::Zero(n);
  StageContext ctx{d.x, d.y, zeros, config.beta, lambda, model.learners[0].b,
                   Nonlinearity::Identity};
  const double fitted = stage_objective(model.learners[0].a, model.learners[0].w, ctx,
                                        LossKind::Logistic);

  // map the reference solution into stage form: w = slopes + bias on the
  // intercept column, a = 0, sign absorbed into w
  Vector mapped(p + 1);
  for (Index j = 0; j < p; ++j) mapped[j] = slow[j + 1] * model.learners[0].b;
  mapped[p] = slow[0] * model.learners[0].b;
  const double reference = stage_objective(0.0, mapped, ctx, LossKind::Logistic);

  // the stage can always shift weight mass between a and the intercept column
  // to go at least as low as the reference configuration
  CHECK(fitted <= reference + 1e-4);
  CHECK(std::abs(fitted - reference) < 5e-3);
}

TEST_CASE("stage starting points follow the documented recipe") {
  FitConfig config;
  config.beta = 5.0;
  config.init_scale = 0.0;
  Rng rng(1);
  auto [a_plus, w_plus] = stage_initial_point(4, 1, rng, config);
  CHECK(w_plus.norm() == 0.0);
  CHECK(a_plus == doctest::Approx(-std::log(2.0) / 5.0).epsilon(1e-15));
  auto [a_minus, w_minus] = stage_initial_point(4, -1, rng, config);
  CHECK(a_minus == doctest::Approx(std::log(2.0) / 5.0).epsilon(1e-15));
  CHECK(w_minus.norm() == 0.0);

  config.init_scale = 1e-2;
  Rng rng_a(42), rng_b(42);
  auto [a1, w1] = stage_initial_point(6, 1, rng_a, config);
  auto [a2, w2] = stage_initial_point(6, 1, rng_b, config);
  CHECK(w1 == w2);
  CHECK(w1.lpNorm<Eigen::Infinity>() <= 1e-2);
  CHECK(w1.lpNorm<Eigen::Infinity>() > 0.0);
}

TEST_CASE("training loss never increases, for either task") {
  for (std::uint64_t seed : {10ULL, 11ULL, 12ULL}) {
    const Dataset reg = random_regression(150, 4, seed);
    FitConfig config;
    config.m = 8;
    config.seed = seed;
    config.task = Task::Regression;
    const GbmapModel model = fit(reg, config);
    REQUIRE(model.training_loss.size() == 9);
    for (size_t j = 1; j < model.training_loss.size(); ++j) {
      CHECK(model.training_loss[j] <= model.training_loss[j - 1] + 1e-12);
    }

    const Dataset cls = random_classification(150, 4, seed);
    config.task = Task::Classification;
    const GbmapModel cmodel = fit(cls, config);
    for (size_t j = 1; j < cmodel.training_loss.size(); ++j) {
      CHECK(cmodel.training_loss[j] <= cmodel.training_loss[j - 1] + 1e-12);
    }
  }
}

TEST_CASE("loss stays monotone even when the optimizer is starved") {
  // pure-noise targets and a two-iteration optimizer force stage failures;
  // the zero-learner fallback must keep the trajectory flat, never rising
  Rng rng(313);
  Dataset d = random_regression(60, 3, 314);
  for (Index i = 0; i < d.n(); ++i) d.y[i] = rng.normal();
  FitConfig config;
  config.m = 15;
  config.optimizer.max_iterations = 2;
  config.seed = 5;
  const GbmapModel model = fit(d, config);
  REQUIRE(model.training_loss.size() == 16);
  for (size_t j = 1; j < model.training_loss.size(); ++j) {
    CHECK(model.training_loss[j] <= model.training_loss[j - 1] + 1e-12);
  }
}

TEST_CASE("a constant target is fit to machine precision in one stage") {
  Dataset d = random_regression(80, 3, 21);
  d.y.setConstant(2.5);
  FitConfig config;
  config.m = 2;
  config.optimizer.gradient_tolerance = 1e-12;
  const GbmapModel model = fit(d, config);
  CHECK(model.training_loss[1] < 1e-12);
}

TEST_CASE("fits are deterministic in the seed") {
  const Dataset d = random_regression(100, 4, 61);
  FitConfig config;
  config.m = 5;
  config.seed = 123;
  const GbmapModel m1 = fit(d, config);
  const GbmapModel m2 = fit(d, config);
  REQUIRE(m1.stages() == m2.stages());
  for (Index j = 0; j < m1.stages(); ++j) {
    CHECK(m1.learners[static_cast<size_t>(j)].a == m2.learners[static_cast<size_t>(j)].a);
    CHECK(m1.learners[static_cast<size_t>(j)].b == m2.learners[static_cast<size_t>(j)].b);
    CHECK(m1.learners[static_cast<size_t>(j)].w == m2.learners[static_cast<size_t>(j)].w);
  }

  config.seed = 124;
  const GbmapModel m3 = fit(d, config);
  bool any_difference = false;
  for (Index j = 0; j < m1.stages() && !any_difference; ++j) {
    any_difference = m1.learners[static_cast<size_t>(j)].w != m3.learners[static_cast<size_t>(j)].w;
  }
  CHECK(any_difference);
}

TEST_CASE("classification fit separates an easy problem") {
  const Dataset d = random_classification(300, 4, 71);
  FitConfig config;
  config.m = 10;
  config.task = Task::Classification;
  const GbmapModel model = fit(d, config);
  Index correct = 0;
  for (Index i = 0; i < d.n(); ++i) {
    if (predict_class(model, d.x.row(i).transpose()) == d.y[i]) ++correct;
  }
  CHECK(static_cast<double>(correct) / static_cast<double>(d.n()) > 0.7);
  // logistic training loss starts from f0 = 0 at log(2) and improves
  CHECK(model.training_loss.front() == doctest::Approx(std::log(2.0)));
  CHECK(model.training_loss.back() < model.training_loss.front());
}

TEST_CASE("a linear initial model is fit around, not refit") {
  Dataset d = random_regression(120, 3, 81);
  Vector coef(4);
  coef << 1.0, -2.0, 0.5, 0.25;
  d.y = d.x * coef;  // exactly linear in the covariates

  FitConfig config;
  config.m = 2;
  const GbmapModel model = fit(d, config, InitialModel::linear(coef));
  // the initial model alone already has zero loss, so boosting cannot improve
  CHECK(model.training_loss[0] == 0.0);
  CHECK(model.training_loss.back() <= 1e-12);
  // and predictions still track the linear map
  Vector probe(4);
  probe << 0.3, -0.4, 1.2, 1.0;
  CHECK(predict(model, probe) == doctest::Approx(coef.dot(probe)).epsilon(1e-6));
}

TEST_CASE("probability callbacks are mapped through the logit") {
  const auto half = [](const Vector&) { return 0.731058578630004879; };  // sigmoid(1)
  const InitialModel f0 = InitialModel::external(half, true);
  Vector x = Vector::Zero(2);
  CHECK(f0.evaluate(x) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(f0.differentiable());
  CHECK_THROWS_AS(f0.gradient(2), std::logic_error);

  const auto score = [](const Vector& v) { return 2.0 * v[0]; };
  const InitialModel raw = InitialModel::external(score, false);
  Vector x2(2);
  x2 << 3.0, 0.0;
  CHECK(raw.evaluate(x2) == 6.0);

  // degenerate probabilities are clamped instead of producing infinities
  const auto certain = [](const Vector&) { return 1.0; };
  const InitialModel clamped = InitialModel::external(certain, true);
  CHECK(std::isfinite(clamped.evaluate(x)));
}

TEST_CASE("fit validates its inputs") {
  const Dataset good = random_regression(50, 3, 91);
  FitConfig config;

  Dataset tiny = select_rows(good, {0});
  CHECK_THROWS_AS(fit(tiny, config), std::invalid_argument);

  Dataset nan_data = good;
  nan_data.x(3, 1) = std::nan("");
  CHECK_THROWS_AS(fit(nan_data, config), std::invalid_argument);

  Dataset bad_labels = good;
  bad_labels.task = Task::Classification;
  config.task = Task::Classification;
  CHECK_THROWS_AS(fit(bad_labels, config), std::invalid_argument);
  config.task = Task::Regression;

  FitConfig bad = config;
  bad.m = 0;
  CHECK_THROWS_AS(fit(good, bad), std::invalid_argument);
  bad = config;
  bad.beta = -1.0;
  CHECK_THROWS_AS(fit(good, bad), std::invalid_argument);
  bad = config;
  bad.lambda = -0.5;
  CHECK_THROWS_AS(fit(good, bad), std::invalid_argument);
  bad = config;
  bad.retries_per_stage = -1;
  CHECK_THROWS_AS(fit(good, bad), std::invalid_argument);
}
