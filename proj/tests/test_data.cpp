#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "gbmap/data.hpp"
#include "gbmap/rng.hpp"
#include "oracles.hpp"

using namespace gbmap;
namespace fs = std::filesystem;

namespace {

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = fs::temp_directory_path() / ("gbmap_data_test_" + std::to_string(counter++) + ".csv");
    std::ofstream out(path, std::ios::binary);
    out << contents;
  }
  ~TempFile() {
    std::error_code ec;
    fs::remove(path, ec);
  }
};

}  // namespace

TEST_CASE("load_csv reads a plain numeric table") {
  TempFile file("x1,x2,y\n1,2,3\n4,5,6\n-1.5,0.25,9\n");
  const Dataset d = load_csv(file.path.string(), "y");
  CHECK(d.n() == 3);
  CHECK(d.p() == 2);
  CHECK(d.feature_names == std::vector<std::string>{"x1", "x2"});
  CHECK(d.target_name == "y");
  CHECK(d.x(0, 0) == 1.0);
  CHECK(d.x(2, 1) == 0.25);
  CHECK(d.y[2] == 9.0);
  CHECK(d.task == Task::Regression);
  CHECK_FALSE(d.has_intercept);
  CHECK_FALSE(d.is_categorical(0));
}

TEST_CASE("load_csv understands quoting, escapes, and CRLF") {
  TempFile file("\"name, full\",y\r\n\"a\"\"b\",1\r\nplain,2\r\n");
  const Dataset d = load_csv(file.path.string(), "y", {"name, full"});
  REQUIRE(d.feature_names.size() == 1);
  CHECK(d.feature_names[0] == "name, full");
  REQUIRE(d.is_categorical(0));
  CHECK(d.levels[0] == std::vector<std::string>{"a\"b", "plain"});
  CHECK(d.x(0, 0) == 0.0);
  CHECK(d.x(1, 0) == 1.0);
}

TEST_CASE("load_csv without a target column") {
  TempFile file("x1,x2\n1,2\n3,4\n");
  const Dataset d = load_csv(file.path.string(), "");
  CHECK(d.n() == 2);
  CHECK(d.y.size() == 0);
  CHECK(d.target_name.empty());
}

TEST_CASE("classification targets are inferred and recoded") {
  SUBCASE("plus-minus one stays put") {
    TempFile file("x,y\n1,1\n2,-1\n3,1\n");
    const Dataset d = load_csv(file.path.string(), "y");
    CHECK(d.task == Task::Classification);
    CHECK(d.y[0] == 1.0);
    CHECK(d.y[1] == -1.0);
  }
  SUBCASE("zero-one maps onto plus-minus one") {
    TempFile file("x,y\n1,1\n2,0\n3,0\n");
    const Dataset d = load_csv(file.path.string(), "y", {}, Task::Classification);
    CHECK(d.y[0] == 1.0);
    CHECK(d.y[1] == -1.0);
    CHECK(d.y[2] == -1.0);
  }
  SUBCASE("mixing codings is rejected") {
    TempFile file("x,y\n1,1\n2,0\n3,-1\n");
    CHECK_THROWS_AS(load_csv(file.path.string(), "y", {}, Task::Classification), DataError);
  }
  SUBCASE("fractional labels are rejected") {
    TempFile file("x,y\n1,0.5\n2,1\n");
    CHECK_THROWS_AS(load_csv(file.path.string(), "y", {}, Task::Classification), DataError);
  }
  SUBCASE("numeric targets default to regression") {
    TempFile file("x,y\n1,0\n2,1\n");
    const Dataset d = load_csv(file.path.string(), "y");
    CHECK(d.task == Task::Regression);
  }
}

TEST_CASE("load_csv reports file coordinates on bad cells") {
  TempFile file("x1,x2,y\n1,2,3\n4,oops,6\n");
  try {
    load_csv(file.path.string(), "y");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    // rows count file lines, header included, so the editor line number matches
    CHECK(msg.find("row 3") != std::string::npos);
    CHECK(msg.find("x2") != std::string::npos);
    CHECK(msg.find("oops") != std::string::npos);
  }
}

TEST_CASE("load_csv structural errors") {
  SUBCASE("missing target column") {
    TempFile file("x1,x2\n1,2\n");
    CHECK_THROWS_AS(load_csv(file.path.string(), "y"), DataError);
  }
  SUBCASE("ragged row") {
    TempFile file("x1,x2,y\n1,2,3\n1,2\n");
    CHECK_THROWS_AS(load_csv(file.path.string(), "y"), DataError);
  }
  SUBCASE("empty cell in numeric column") {
    TempFile file("x1,y\n,3\n1,4\n");
    CHECK_THROWS_AS(load_csv(file.path.string(), "y"), DataError);
  }
  SUBCASE("non-finite value") {
    TempFile file("x1,y\ninf,3\n");
    CHECK_THROWS_AS(load_csv(file.path.string(), "y"), DataError);
  }
  SUBCASE("unterminated quote") {
    TempFile file("x1,y\n\"abc,3\n");
    CHECK_THROWS_AS(load_csv(file.path.string(), "y"), DataError);
  }
  SUBCASE("no such file") {
    CHECK_THROWS_AS(load_csv("/nonexistent/nowhere.csv", "y"), DataError);
  }
  SUBCASE("header only") {
    TempFile file("x1,y\n");
    CHECK_THROWS_AS(load_csv(file.path.string(), "y"), DataError);
  }
  SUBCASE("unknown categorical column name") {
    TempFile file("x1,y\n1,2\n");
    CHECK_THROWS_AS(load_csv(file.path.string(), "y", {"nope"}), DataError);
  }
}

TEST_CASE("save_csv round-trips through load_csv") {
  Dataset d;
  d.x.resize(2, 3);
  d.x << 1.5, 0.0, -2.25, 3.0, 1.0, 0.125;
  d.y.resize(2);
  d.y << 0.5, -0.5;
  d.feature_names = {"alpha", "color", "beta"};
  d.target_name = "y";
  d.levels = {{}, {"red", "green"}, {}};
  d.task = Task::Regression;

  const fs::path path = fs::temp_directory_path() / "gbmap_data_roundtrip.csv";
  save_csv(d, path.string());
  const Dataset back = load_csv(path.string(), "y", {"color"});
  fs::remove(path);

  CHECK(back.x == d.x);
  CHECK(back.y == d.y);
  CHECK(back.feature_names == d.feature_names);
  CHECK(back.levels[1] == d.levels[1]);
}

TEST_CASE("fit_preprocess standardizes with population statistics") {
  Dataset d;
  d.x.resize(3, 2);
  d.x << 1.0, 10.0, 2.0, 10.0, 3.0, 10.0;
  d.y = Vector::Zero(3);
  d.feature_names = {"a", "b"};
  d.task = Task::Regression;

  const PreprocessStats stats = fit_preprocess(d);
  // column b is constant and gets dropped; column a has mean 2, std sqrt(2/3)
  REQUIRE(stats.numeric.size() == 1);
  CHECK(stats.numeric[0].name == "a");
  CHECK(stats.numeric[0].mean == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(stats.numeric[0].std == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
  CHECK(stats.dropped == std::vector<std::string>{"b"});

  const Dataset out = apply_preprocess(stats, d);
  CHECK(out.n() == 3);
  CHECK(out.p() == 2);  // a plus intercept
  CHECK(out.feature_names == stats.output_feature_names());
  CHECK(out.feature_names.back() == "intercept");
  CHECK(out.has_intercept);
  for (Index i = 0; i < 3; ++i) CHECK(out.x(i, 1) == 1.0);
  CHECK(out.x.col(0).mean() == doctest::Approx(0.0).epsilon(1e-15));
  const double var = out.x.col(0).squaredNorm() / 3.0;
  CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("apply_preprocess reuses training statistics on new data") {
  Dataset train;
  train.x.resize(4, 1);
  train.x << 0.0, 2.0, 4.0, 6.0;  // mean 3, population std sqrt(5)
  train.y = Vector::Zero(4);
  train.feature_names = {"a"};
  train.task = Task::Regression;
  const PreprocessStats stats = fit_preprocess(train);

  Dataset test;
  test.x.resize(1, 1);
  test.x << 13.0;
  test.feature_names = {"a"};
  test.task = Task::Regression;
  const Dataset out = apply_preprocess(stats, test);
  CHECK(out.x(0, 0) == doctest::Approx((13.0 - 3.0) / std::sqrt(5.0)).epsilon(1e-15));
}

TEST_CASE("apply_preprocess matches columns by name, ignoring extras and order") {
  Dataset train;
  train.x.resize(3, 2);
  train.x << 1.0, 5.0, 2.0, 6.0, 3.0, 7.0;
  train.y = Vector::Zero(3);
  train.feature_names = {"a", "b"};
  train.task = Task::Regression;
  const PreprocessStats stats = fit_preprocess(train);

  Dataset test;
  test.x.resize(1, 3);
  test.x << 6.0, 99.0, 2.0;  // b, extra, a
  test.feature_names = {"b", "extra", "a"};
  test.task = Task::Regression;
  const Dataset out = apply_preprocess(stats, test);
  REQUIRE(out.feature_names == std::vector<std::string>{"a", "b", "intercept"});
  CHECK(out.x(0, 0) == doctest::Approx(0.0));
  CHECK(out.x(0, 1) == doctest::Approx(0.0));

  Dataset missing;
  missing.x.resize(1, 1);
  missing.x << 1.0;
  missing.feature_names = {"a"};
  missing.task = Task::Regression;
  try {
    apply_preprocess(stats, missing);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("b") != std::string::npos);
  }
}

TEST_CASE("categorical features expand to one-hot columns after the numerics") {
  Dataset train;
  train.x.resize(4, 2);
  train.x << 1.0, 0.0, 2.0, 1.0, 3.0, 2.0, 4.0, 0.0;
  train.y = Vector::Zero(4);
  train.feature_names = {"num", "color"};
  train.levels = {{}, {"red", "green", "blue"}};
  train.task = Task::Regression;

  const PreprocessStats stats = fit_preprocess(train);
  const Dataset out = apply_preprocess(stats, train);
  REQUIRE(out.feature_names == std::vector<std::string>{"num", "color=red", "color=green",
                                                        "color=blue", "intercept"});
  // row 1 is green
  CHECK(out.x(1, 1) == 0.0);
  CHECK(out.x(1, 2) == 1.0);
  CHECK(out.x(1, 3) == 0.0);
  // each row activates exactly one level
  for (Index i = 0; i < 4; ++i) CHECK(out.x.row(i).segment(1, 3).sum() == 1.0);

  Dataset test = train;
  test.levels[1] = {"red", "green", "blue", "violet"};
  test.x(0, 1) = 3.0;  // violet, unseen in training
  try {
    apply_preprocess(stats, test);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("violet") != std::string::npos);
  }
}

TEST_CASE("fit_preprocess rejects degenerate inputs") {
  Dataset d;
  d.x.resize(2, 1);
  d.x << 5.0, 5.0;
  d.y = Vector::Zero(2);
  d.feature_names = {"a"};
  d.task = Task::Regression;
  CHECK_THROWS_AS(fit_preprocess(d), DataError);  // every column constant

  Dataset empty;
  empty.task = Task::Regression;
  CHECK_THROWS_AS(fit_preprocess(empty), DataError);
}

TEST_CASE("synthetic cosine data is reproducible and centered") {
  const Dataset d1 = gen_synth_cos(200, 6, 2.0, 31, Task::Regression);
  const Dataset d2 = gen_synth_cos(200, 6, 2.0, 31, Task::Regression);
  const Dataset d3 = gen_synth_cos(200, 6, 2.0, 32, Task::Regression);
  CHECK(d1.x == d2.x);
  CHECK(d1.y == d2.y);
  CHECK(d1.x != d3.x);

  CHECK(d1.n() == 200);
  CHECK(d1.p() == 7);  // p features plus intercept
  CHECK(d1.has_intercept);
  CHECK(d1.feature_names.back() == "intercept");
  for (Index i = 0; i < d1.n(); ++i) CHECK(d1.x(i, 6) == 1.0);

  CHECK(std::abs(d1.y.mean()) <= 1e-10);
  // centered response can be at most twice the raw cosine bound
  CHECK(d1.y.lpNorm<Eigen::Infinity>() <= 2.0 * 2.0 * std::sqrt(6.0));
}

TEST_CASE("synthetic classification labels follow the latent sigmoid") {
  // same seed gives the same feature draws for both tasks, so the regression
  // response is the latent score behind the classification labels
  const Index n = 40000;
  const Dataset reg = gen_synth_cos(n, 4, 3.0, 77, Task::Regression);
  const Dataset cls = gen_synth_cos(n, 4, 3.0, 77, Task::Classification);
  REQUIRE(reg.x == cls.x);
  for (Index i = 0; i < n; ++i) {
    CHECK((cls.y[i] == 1.0 || cls.y[i] == -1.0));
  }

  // bucket by latent probability and compare observed positive rates
  double bounds[4] = {0.0, 0.35, 0.65, 1.0};
  for (int bucket = 0; bucket < 3; ++bucket) {
    double hits = 0.0, total = 0.0;
    double psum = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double prob = 1.0 / (1.0 + std::exp(-reg.y[i]));
      if (prob <= bounds[bucket] || prob > bounds[bucket + 1]) continue;
      total += 1.0;
      psum += prob;
      if (cls.y[i] == 1.0) hits += 1.0;
    }
    REQUIRE(total > 500);
    const double expected = psum / total;
    const double sigma = std::sqrt(expected * (1.0 - expected) / total);
    CHECK(std::abs(hits / total - expected) < 5.0 * sigma + 1e-3);
  }
}

TEST_CASE("cluster visualization data has the documented geometry") {
  const Dataset d = gen_cluster_vis(9);
  CHECK(d.n() == 3000);
  CHECK(d.p() == 9);
  REQUIRE(d.row_labels.size() == 3000);

  int counts[3] = {0, 0, 0};
  for (const auto& label : d.row_labels) {
    if (label == "a") ++counts[0];
    else if (label == "b1") ++counts[1];
    else if (label == "b2") ++counts[2];
  }
  CHECK(counts[0] == 1000);
  CHECK(counts[1] == 1000);
  CHECK(counts[2] == 1000);

  for (Index i = 0; i < 3000; ++i) CHECK(d.x(i, 8) == 1.0);

  // cluster a sits at +4 on the first four coordinates, b1 at +4 on 5 to 8
  Vector mean_a = Vector::Zero(9), mean_b1 = Vector::Zero(9), mean_b2 = Vector::Zero(9);
  for (Index i = 0; i < 3000; ++i) {
    if (d.row_labels[i] == "a") mean_a += d.x.row(i).transpose();
    if (d.row_labels[i] == "b1") mean_b1 += d.x.row(i).transpose();
    if (d.row_labels[i] == "b2") mean_b2 += d.x.row(i).transpose();
  }
  mean_a /= 1000.0;
  mean_b1 /= 1000.0;
  mean_b2 /= 1000.0;
  const double band = 5.0 / std::sqrt(1000.0);  // well past 3 sigma for unit noise
  for (Index j = 0; j < 4; ++j) {
    CHECK(std::abs(mean_a[j] - 4.0) < band);
    CHECK(std::abs(mean_b1[j]) < band);
    CHECK(std::abs(mean_b2[j]) < band);
  }
  for (Index j = 4; j < 8; ++j) {
    CHECK(std::abs(mean_a[j]) < band);
    CHECK(std::abs(mean_b1[j] - 4.0) < band);
    CHECK(std::abs(mean_b2[j]) < band);
  }

  // response depends only on the first four coordinates, so b1 and b2 draw
  // their targets from the same distribution
  std::vector<double> y_b1, y_b2;
  for (Index i = 0; i < 3000; ++i) {
    if (d.row_labels[i] == "b1") y_b1.push_back(d.y[i]);
    if (d.row_labels[i] == "b2") y_b2.push_back(d.y[i]);
  }
  CHECK(oracles::ks_two_sample_p(y_b1, y_b2) > 0.01);

  // and the cosine response obeys the Cauchy-Schwarz envelope
  CHECK(d.y.lpNorm<Eigen::Infinity>() <= 3.0 + 1e-12);

  CHECK(gen_cluster_vis(9).x == d.x);
  CHECK(gen_cluster_vis(10).x != d.x);
}

TEST_CASE("row selection and column dropping") {
  Dataset d;
  d.x.resize(3, 2);
  d.x << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0;
  d.y.resize(3);
  d.y << 10.0, 20.0, 30.0;
  d.feature_names = {"a", "b"};
  d.row_labels = {"r0", "r1", "r2"};
  d.task = Task::Regression;

  const Dataset sel = select_rows(d, {2, 0});
  CHECK(sel.n() == 2);
  CHECK(sel.x(0, 0) == 5.0);
  CHECK(sel.y[0] == 30.0);
  CHECK(sel.row_labels == std::vector<std::string>{"r2", "r0"});

  const Dataset dropped = drop_column(d, 0);
  CHECK(dropped.p() == 1);
  CHECK(dropped.feature_names == std::vector<std::string>{"b"});
  CHECK(dropped.x(1, 0) == 4.0);
  CHECK_THROWS_AS(drop_column(d, 5), std::invalid_argument);
}
