// gbmap command line: fit models, apply them, and run the benchmark and
// drift pipelines end to end. Exit codes: 2 bad arguments, 3 data problems,
// 4 numeric failure.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gbmap/boosting.hpp"
#include "gbmap/data.hpp"
#include "gbmap/drift.hpp"
#include "gbmap/eval.hpp"
#include "gbmap/model.hpp"
#include "gbmap/neighbors.hpp"
#include "gbmap/rng.hpp"
#include "gbmap/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gbmap;

namespace {

// shortest decimal form that parses back to the same double, so printed
// numbers and CSV cells round-trip exactly
std::string fmt(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string iso8601_utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void save_csv_atomic(const Dataset& data, const std::string& path, bool include_target = true,
                     bool include_intercept = false, bool include_row_labels = false) {
  const std::string tmp = path + ".tmp";
  save_csv(data, tmp, include_target, include_intercept, include_row_labels);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DataError("cannot move temp file onto " + path);
  }
}

struct FitFlags {
  int m = 20;
  double beta = 5.0;
  double lambda = 1e-3;
  int maxiter = 200;
  std::uint64_t seed = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--m", m, "boosting stages")->check(CLI::Range(1, 1 << 20));
    cmd->add_option("--beta", beta, "softplus sharpness")->check(CLI::PositiveNumber);
    cmd->add_option("--lambda", lambda, "ridge weight")->check(CLI::NonNegativeNumber);
    cmd->add_option("--maxiter", maxiter, "optimizer iterations per stage")
        ->check(CLI::Range(1, 1 << 24));
    cmd->add_option("--seed", seed, "random seed");
  }

  FitConfig config(Task task) const {
    FitConfig c;
    c.m = m;
    c.beta = beta;
    c.lambda = lambda;
    c.optimizer.max_iterations = maxiter;
    c.seed = seed;
    c.task = task;
    return c;
  }

  json echo() const {
    return {{"m", m}, {"beta", beta}, {"lambda", lambda}, {"maxiter", maxiter}};
  }
};

struct DataFlags {
  std::string path;
  std::string target = "y";
  std::string task;  // empty means infer from the target values
  std::vector<std::string> categorical;

  void attach(CLI::App* cmd, bool with_target = true) {
    cmd->add_option("--data", path, "input CSV")->required();
    if (with_target) cmd->add_option("--target", target, "target column name");
    cmd->add_option("--task", task, "regression or classification")
        ->check(CLI::IsMember({"regression", "classification"}));
    cmd->add_option("--categorical", categorical, "categorical column name (repeatable)");
  }

  Dataset load() const {
    std::optional<Task> t;
    if (!task.empty()) t = task_from_string(task);
    return load_csv(path, target, categorical, t);
  }

  // "task: classification (inferred from target values)" when --task was
  // omitted and the loader had to decide
  void announce_task(const Dataset& data, std::ostream& out) const {
    out << "task: " << to_string(data.task);
    if (task.empty()) out << " (inferred from target values)";
    out << "\n";
  }
};

double train_metric(const GbmapModel& model, const Dataset& data, std::string& name) {
  if (model.task == Task::Classification) {
    name = "accuracy";
    Vector classes(data.n());
    for (Index i = 0; i < data.n(); ++i)
      classes[i] = predict_class(model, data.x.row(i).transpose());
    return accuracy(data.y, classes);
  }
  name = "r2";
  return r_squared(data.y, predict_rows(model, data.x));
}

int run_fit(const DataFlags& dataflags, const FitFlags& fitflags, const std::string& out_model) {
  const Dataset raw = dataflags.load();
  dataflags.announce_task(raw, std::cout);

  const PreprocessStats stats = fit_preprocess(raw);
  for (const auto& name : stats.dropped) {
    std::cerr << "warning: dropping zero-variance feature '" << name << "'\n";
  }
  const Dataset prepped = apply_preprocess(stats, raw);

  GbmapModel model = fit(prepped, fitflags.config(raw.task));
  model.preprocessing = stats;

  for (size_t s = 0; s < model.training_loss.size(); ++s) {
    std::cout << "stage " << s << " train loss " << fmt(model.training_loss[s]);
    if (s == 0) std::cout << " (initial model)";
    std::cout << "\n";
  }
  std::string metric;
  try {
    const double value = train_metric(model, prepped, metric);
    std::cout << "train " << metric << ": " << fmt(value) << "\n";
  } catch (const std::invalid_argument&) {
    std::cout << "train r2: undefined (constant target)\n";
  }

  json provenance = {{"seed", fitflags.seed},
                     {"created", iso8601_utc_now()},
                     {"config", fitflags.echo()}};
  provenance["config"]["task"] = to_string(raw.task);
  provenance["config"]["target"] = dataflags.target;
  save_model(model, out_model, provenance);
  std::cout << "model written to " << out_model << "\n";
  return 0;
}

// model application commands share the load-and-preprocess preamble; the
// input CSV needs no target column, and categorical columns are recovered
// from the model's preprocessing payload
Dataset load_for_model(const GbmapModel& model, const std::string& data_path) {
  std::vector<std::string> categorical;
  for (const auto& c : model.preprocessing.categorical) categorical.push_back(c.name);
  const Dataset raw = load_csv(data_path, "", categorical);
  if (model.preprocessing.empty()) {
    if (raw.p() != model.p) {
      throw DataError(data_path + ": expected " + std::to_string(model.p) +
                      " columns for a model without preprocessing stats, got " +
                      std::to_string(raw.p()));
    }
    return raw;
  }
  return apply_preprocess(model.preprocessing, raw);
}

int run_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path) {
  const GbmapModel model = load_model(model_path);
  const Dataset data = load_for_model(model, data_path);

  std::string csv = model.task == Task::Classification ? "prediction,probability,class\n"
                                                       : "prediction\n";
  for (Index i = 0; i < data.n(); ++i) {
    const Vector x = data.x.row(i).transpose();
    if (model.task == Task::Classification) {
      csv += fmt(predict(model, x)) + ',' + fmt(predict_proba(model, x)) + ',' +
             std::to_string(predict_class(model, x)) + '\n';
    } else {
      csv += fmt(predict(model, x)) + '\n';
    }
  }
  write_text_atomic(out_path, csv);
  std::cout << "wrote " << data.n() << " predictions to " << out_path << "\n";
  return 0;
}

int run_embed(const std::string& model_path, const std::string& data_path,
              const std::string& out_path) {
  const GbmapModel model = load_model(model_path);
  const Dataset data = load_for_model(model, data_path);
  const Matrix z = embed_rows(model, data.x);

  std::string csv;
  for (Index j = 0; j < z.cols(); ++j) {
    if (j) csv += ',';
    csv += 'z' + std::to_string(j + 1);
  }
  csv += '\n';
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index j = 0; j < z.cols(); ++j) {
      if (j) csv += ',';
      csv += fmt(z(i, j));
    }
    csv += '\n';
  }
  write_text_atomic(out_path, csv);
  std::cout << "wrote " << z.rows() << " x " << z.cols() << " embedding to " << out_path << "\n";
  return 0;
}

std::vector<std::pair<Index, Index>> parse_pairs(const std::string& spec, Index n) {
  std::vector<std::pair<Index, Index>> pairs;
  size_t pos = 0;
  while (pos < spec.size()) {
    size_t comma = spec.find(',', pos);
    if (comma == std::string::npos) comma = spec.size();
    const std::string item = spec.substr(pos, comma - pos);
    const size_t colon = item.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("--pairs items look like i:j, got '" + item + "'");
    }
    Index i = 0, j = 0;
    const char* ib = item.data();
    const char* jb = item.data() + colon + 1;
    auto ri = std::from_chars(ib, ib + colon, i);
    auto rj = std::from_chars(jb, item.data() + item.size(), j);
    if (ri.ec != std::errc{} || rj.ec != std::errc{} || ri.ptr != ib + colon ||
        rj.ptr != item.data() + item.size()) {
      throw std::invalid_argument("--pairs items look like i:j, got '" + item + "'");
    }
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw std::invalid_argument("pair " + item + " is out of range for " + std::to_string(n) +
                                  " rows");
    }
    pairs.emplace_back(i, j);
    pos = comma + 1;
  }
  if (pairs.empty()) throw std::invalid_argument("--pairs is empty");
  return pairs;
}

int run_distance(const std::string& model_path, const std::string& data_path,
                 const std::string& pairs_spec, int path_grid, const std::string& out_path) {
  const GbmapModel model = load_model(model_path);
  const Dataset data = load_for_model(model, data_path);
  const auto pairs = parse_pairs(pairs_spec, data.n());

  std::string csv = path_grid > 0 ? "i,j,distance,path_distance\n" : "i,j,distance\n";
  for (const auto& [i, j] : pairs) {
    const Vector a = data.x.row(i).transpose();
    const Vector b = data.x.row(j).transpose();
    csv += std::to_string(i) + ',' + std::to_string(j) + ',' +
           fmt(embedding_distance(model, a, b));
    if (path_grid > 0) csv += ',' + fmt(path_distance(model, a, b, path_grid));
    csv += '\n';
  }
  write_text_atomic(out_path, csv);
  std::cout << "wrote " << pairs.size() << " distances to " << out_path << "\n";
  return 0;
}

int run_explain(const std::string& model_path, const std::string& data_path,
                const std::string& out_path) {
  const GbmapModel model = load_model(model_path);
  const Dataset data = load_for_model(model, data_path);
  const std::vector<std::string> names = model.preprocessing.empty()
                                             ? data.feature_names
                                             : model.preprocessing.output_feature_names();

  std::string csv;
  for (size_t j = 0; j < names.size(); ++j) {
    if (j) csv += ',';
    csv += names[j];
  }
  csv += '\n';
  for (Index i = 0; i < data.n(); ++i) {
    const Vector coef = local_coefficients(model, data.x.row(i).transpose());
    for (Index j = 0; j < coef.size(); ++j) {
      if (j) csv += ',';
      csv += fmt(coef[j]);
    }
    csv += '\n';
  }
  write_text_atomic(out_path, csv);
  std::cout << "wrote local coefficients for " << data.n() << " rows to " << out_path << "\n";
  return 0;
}

Dataset stack_rows(const std::vector<const Dataset*>& parts) {
  Index total = 0;
  for (const Dataset* part : parts) total += part->n();
  Dataset out;
  out.x.resize(total, parts[0]->p());
  out.y.resize(total);
  out.feature_names = parts[0]->feature_names;
  out.task = parts[0]->task;
  out.has_intercept = parts[0]->has_intercept;
  Index at = 0;
  for (const Dataset* part : parts) {
    out.x.middleRows(at, part->n()) = part->x;
    out.y.segment(at, part->n()) = part->y;
    at += part->n();
  }
  return out;
}

json report_to_json(const DriftReport& report) {
  json j;
  j["indicators"] = report.indicators;
  j["losses"] = report.losses;
  j["labels"] = json::array();
  for (const bool label : report.labels) j["labels"].push_back(label);
  j["threshold"] = report.threshold;
  j["auc"] = report.auc ? json(*report.auc) : json(nullptr);
  j["roc"] = json::array();
  for (const auto& [fpr, tpr] : report.roc) j["roc"].push_back({{"fpr", fpr}, {"tpr", tpr}});
  return j;
}

void write_roc_csv(const DriftReport& report, const std::string& path) {
  std::string csv = "fpr,tpr\n";
  for (const auto& [fpr, tpr] : report.roc) csv += fmt(fpr) + ',' + fmt(tpr) + '\n';
  write_text_atomic(path, csv);
}

std::string auc_text(const DriftReport& report) {
  return report.auc ? fmt(*report.auc) : std::string("undefined");
}

int run_drift(const DataFlags& dataflags, const FitFlags& fitflags, int k, double quantile,
              const std::string& out_report) {
  const Dataset raw = dataflags.load();
  dataflags.announce_task(raw, std::cout);
  FitConfig config = fitflags.config(raw.task);

  const DriftSplit split = make_drift_split(raw, config, fitflags.seed);
  std::cout << "drift feature: " << split.dropped_feature << " (magnitude "
            << fmt(split.drift_magnitude) << ")\n";

  const PreprocessStats stats = fit_preprocess(split.a1);
  const Dataset a1 = apply_preprocess(stats, split.a1);
  const Dataset a2 = apply_preprocess(stats, split.a2);
  const Dataset b = apply_preprocess(stats, split.b);

  GbmapModel model = fit(a1, config);
  model.preprocessing = stats;

  // classification drift is judged on the continuous score of a linear model
  // fitted to everything we have, not on the sampled labels
  std::optional<Vector> score_model;
  if (raw.task == Task::Classification) {
    score_model = fit_score_model(stack_rows({&a1, &a2, &b}), config.optimizer);
  }

  const NeighborSearch emb_search(a1, MetricKind::embedding(model));
  const NeighborSearch euc_search(a1, MetricKind::euclidean());

  std::vector<double> ref_losses;
  for (Index i = 0; i < a2.n(); ++i) {
    ref_losses.push_back(ground_truth_loss(model, a2.x.row(i).transpose(), a2.y[i], score_model));
  }

  std::vector<double> losses, gbmap_ind, euclid_ind;
  const auto add_rows = [&](const Dataset& part) {
    for (Index i = 0; i < part.n(); ++i) {
      const Vector x = part.x.row(i).transpose();
      losses.push_back(ground_truth_loss(model, x, part.y[i], score_model));
      gbmap_ind.push_back(gbmap_indicator(model, emb_search, x, k));
      euclid_ind.push_back(euclid_indicator(euc_search, x, k));
    }
  };
  add_rows(a2);
  add_rows(b);

  const DriftReport ours = label_and_score(ref_losses, losses, gbmap_ind, quantile);
  const DriftReport baseline = label_and_score(ref_losses, losses, euclid_ind, quantile);

  json j = report_to_json(ours);
  j["dropped_feature"] = split.dropped_feature;
  j["drift_magnitude"] = split.drift_magnitude;
  j["euclid_auc"] = baseline.auc ? json(*baseline.auc) : json(nullptr);
  write_text_atomic(out_report, j.dump(2) + "\n");

  std::string stem = out_report;
  if (stem.size() > 5 && stem.substr(stem.size() - 5) == ".json") stem.resize(stem.size() - 5);
  write_roc_csv(ours, stem + "_gbmap_roc.csv");
  write_roc_csv(baseline, stem + "_euclid_roc.csv");

  std::cout << "gbmap auc: " << auc_text(ours) << "\n";
  std::cout << "euclid auc: " << auc_text(baseline) << "\n";
  std::cout << "report written to " << out_report << "\n";
  return 0;
}

int run_synth(const std::string& kind, Index n, Index p, double alpha, std::uint64_t seed,
              const std::string& task_name, const std::string& out_path) {
  json generator = {{"kind", kind}, {"seed", seed}};
  if (kind == "cos") {
    const Task task = task_from_string(task_name);
    const Dataset data = gen_synth_cos(n, p, alpha, seed, task);
    save_csv_atomic(data, out_path);
    generator["n"] = n;
    generator["p"] = p;
    generator["alpha"] = alpha;
    generator["task"] = task_name;
  } else {  // three-cluster visualization fixture, shape fixed by the generator
    const Dataset data = gen_cluster_vis(seed);
    save_csv_atomic(data, out_path, true, false, true);
    generator["n"] = data.n();
    generator["p"] = data.p();
    generator["task"] = "regression";
  }
  const json sidecar = {{"rng", "mt19937_64/u53/box-muller"}, {"generator", generator}};
  write_text_atomic(out_path + ".json", sidecar.dump(2) + "\n");
  std::cout << "wrote " << out_path << " and " << out_path << ".json\n";
  return 0;
}

struct BenchmarkRow {
  std::string method;
  std::vector<double> scores;
};

int run_benchmark(Index n, Index p, double alpha, std::uint64_t seed, const std::string& task_name,
                  const FitFlags& fitflags, int k, int repeats) {
  const Task task = task_from_string(task_name);
  std::vector<BenchmarkRow> rows = {{"gbmap", {}}, {"linreg", {}}, {"knn", {}}, {"knn-gbmap", {}}};

  for (int rep = 0; rep < repeats; ++rep) {
    const Dataset data = gen_synth_cos(n, p, alpha, seed + static_cast<std::uint64_t>(rep), task);

    // fresh 50/50 split per repeat
    std::vector<Index> order(static_cast<size_t>(data.n()));
    for (Index i = 0; i < data.n(); ++i) order[static_cast<size_t>(i)] = i;
    Rng rng(seed + 1000 + static_cast<std::uint64_t>(rep));
    for (Index i = data.n() - 1; i > 0; --i) {
      const Index j = static_cast<Index>(rng.uniform_int(0, static_cast<int>(i)));
      std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
    }
    const Index half = data.n() / 2;
    const Dataset train = select_rows(data, {order.begin(), order.begin() + half});
    const Dataset test = select_rows(data, {order.begin() + half, order.end()});

    FitConfig config = fitflags.config(task);
    config.seed = seed + static_cast<std::uint64_t>(rep);
    const GbmapModel model = fit(train, config);

    // the linear baseline reuses the boosting machinery with the identity
    // nonlinearity: one unregularized stage is exactly a linear model
    FitConfig linear_config = config;
    linear_config.m = 1;
    linear_config.lambda = 0.0;
    linear_config.nonlinearity = Nonlinearity::Identity;
    const GbmapModel linear = fit(train, linear_config);

    const NeighborSearch euclid(train, MetricKind::euclidean());
    const NeighborSearch embedded(train, MetricKind::embedding(model));

    const auto score = [&](const std::function<double(const Vector&)>& predict_one) {
      Vector yhat(test.n());
      for (Index i = 0; i < test.n(); ++i) yhat[i] = predict_one(test.x.row(i).transpose());
      if (task == Task::Classification) return accuracy(test.y, yhat);
      return r_squared(test.y, yhat);
    };
    const auto as_class = [&](double value) { return value >= 0.0 ? 1.0 : -1.0; };

    rows[0].scores.push_back(score([&](const Vector& x) {
      return task == Task::Classification ? double(predict_class(model, x)) : predict(model, x);
    }));
    rows[1].scores.push_back(score([&](const Vector& x) {
      return task == Task::Classification ? double(predict_class(linear, x)) : predict(linear, x);
    }));
    rows[2].scores.push_back(score([&](const Vector& x) {
      const double vote = euclid.regress(x, k);
      return task == Task::Classification ? as_class(vote) : vote;
    }));
    rows[3].scores.push_back(score([&](const Vector& x) {
      const double vote = embedded.regress(x, k);
      return task == Task::Classification ? as_class(vote) : vote;
    }));
  }

  const char* metric = task == Task::Classification ? "accuracy" : "r2";
  std::printf("synth-cos %s, n=%lld, p=%lld, alpha=%g, %d repeats\n", task_name.c_str(),
              static_cast<long long>(n), static_cast<long long>(p), alpha, repeats);
  std::printf("%-10s %12s %10s\n", "method", metric, "sd");
  for (const auto& row : rows) {
    double mean = 0.0;
    for (const double s : row.scores) mean += s;
    mean /= static_cast<double>(row.scores.size());
    double var = 0.0;
    for (const double s : row.scores) var += (s - mean) * (s - mean);
    var /= static_cast<double>(row.scores.size());
    std::printf("%-10s %12.4f %10.4f\n", row.method.c_str(), mean, std::sqrt(var));
  }
  return 0;
}

int run_vis(std::uint64_t seed, const FitFlags& fitflags, const std::string& out_prefix) {
  const Dataset data = gen_cluster_vis(seed);
  FitConfig config = fitflags.config(Task::Regression);
  const GbmapModel model = fit(data, config);

  const Matrix embedding_pca = pca_2d(embed_rows(model, data.x));
  // original space drops the constant intercept column; PCA would reject it
  const Matrix original_pca = pca_2d(data.x.leftCols(data.p() - 1));

  const auto write_coords = [&](const Matrix& coords, const std::string& path) {
    std::string csv = "pc1,pc2,cluster\n";
    for (Index i = 0; i < coords.rows(); ++i) {
      csv += fmt(coords(i, 0)) + ',' + fmt(coords(i, 1)) + ',' +
             data.row_labels[static_cast<size_t>(i)] + '\n';
    }
    write_text_atomic(path, csv);
  };
  write_coords(embedding_pca, out_prefix + "_embedding_pca.csv");
  write_coords(original_pca, out_prefix + "_original_pca.csv");
  std::cout << "wrote " << out_prefix << "_embedding_pca.csv and " << out_prefix
            << "_original_pca.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gbmap: supervised embeddings from boosted softplus perceptrons"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gbmap 0.1.0");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "fit a model on a CSV and save it");
  DataFlags fit_data;
  FitFlags fit_flags;
  std::string fit_out;
  fit_data.attach(fit_cmd);
  fit_flags.attach(fit_cmd);
  fit_cmd->add_option("--out-model", fit_out, "model JSON output path")->required();

  // model application commands
  std::string model_path, apply_data, apply_out, pairs_spec;
  int path_grid = 0;
  auto* predict_cmd = app.add_subcommand("predict", "predict targets for a CSV");
  auto* embed_cmd = app.add_subcommand("embed", "write embedding coordinates for a CSV");
  auto* distance_cmd = app.add_subcommand("distance", "embedding distances between row pairs");
  auto* explain_cmd = app.add_subcommand("explain", "local linear coefficients per row");
  for (CLI::App* cmd : {predict_cmd, embed_cmd, distance_cmd, explain_cmd}) {
    cmd->add_option("--model", model_path, "model JSON from fit")->required();
    cmd->add_option("--data", apply_data, "input CSV (target column optional)")->required();
    cmd->add_option("--out", apply_out, "output CSV path")->required();
  }
  distance_cmd->add_option("--pairs", pairs_spec, "row index pairs, e.g. 0:1,0:2")->required();
  distance_cmd->add_option("--path-grid", path_grid,
                           "also integrate the path distance on this many grid cells");

  // drift
  auto* drift_cmd = app.add_subcommand("drift", "train/drift split, indicators, ROC report");
  DataFlags drift_data;
  FitFlags drift_flags;
  int drift_k = 5;
  double drift_quantile = 0.95;
  std::string drift_out;
  drift_data.attach(drift_cmd);
  drift_flags.attach(drift_cmd);
  drift_cmd->add_option("--k", drift_k, "neighbors for the indicators")
      ->check(CLI::Range(1, 1 << 24));
  drift_cmd->add_option("--quantile", drift_quantile, "loss quantile defining drift labels")
      ->check(CLI::Range(0.0, 1.0));
  drift_cmd->add_option("--out-report", drift_out, "report JSON output path")->required();

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic dataset CSV plus sidecar");
  std::string synth_kind = "cos", synth_task = "regression", synth_out;
  Index synth_n = 1000, synth_p = 20;
  double synth_alpha = 5.0;
  std::uint64_t synth_seed = 0;
  synth_cmd->add_option("--kind", synth_kind, "cos or vis")
      ->check(CLI::IsMember({"cos", "vis"}));
  synth_cmd->add_option("--n", synth_n, "rows (cos only)")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--p", synth_p, "covariates (cos only)")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--alpha", synth_alpha, "signal amplitude (cos only)");
  synth_cmd->add_option("--seed", synth_seed, "random seed");
  synth_cmd->add_option("--task", synth_task, "regression or classification")
      ->check(CLI::IsMember({"regression", "classification"}));
  synth_cmd->add_option("--out", synth_out, "output CSV path")->required();

  // benchmark
  auto* bench_cmd = app.add_subcommand("benchmark", "method comparison on synthetic data");
  FitFlags bench_flags;
  std::string bench_task = "regression";
  Index bench_n = 2000, bench_p = 20;
  double bench_alpha = 5.0;
  int bench_k = 10, bench_repeats = 5;
  bench_cmd->add_option("--n", bench_n, "rows per repeat")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--p", bench_p, "covariates")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--alpha", bench_alpha, "signal amplitude");
  bench_cmd->add_option("--task", bench_task, "regression or classification")
      ->check(CLI::IsMember({"regression", "classification"}));
  bench_cmd->add_option("--k", bench_k, "neighbors for the kNN baselines")
      ->check(CLI::Range(1, 1 << 24));
  bench_cmd->add_option("--repeats", bench_repeats, "independent splits")
      ->check(CLI::Range(1, 1 << 16));
  bench_flags.attach(bench_cmd);

  // vis
  auto* vis_cmd = app.add_subcommand("vis", "2-D PCA coordinates of clusters, both spaces");
  FitFlags vis_flags;
  vis_flags.m = 10;
  std::string vis_prefix;
  vis_flags.attach(vis_cmd);
  vis_cmd->add_option("--out-prefix", vis_prefix, "output path prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // 0 is --help / --version
  }

  try {
    if (fit_cmd->parsed()) return run_fit(fit_data, fit_flags, fit_out);
    if (predict_cmd->parsed()) return run_predict(model_path, apply_data, apply_out);
    if (embed_cmd->parsed()) return run_embed(model_path, apply_data, apply_out);
    if (distance_cmd->parsed())
      return run_distance(model_path, apply_data, pairs_spec, path_grid, apply_out);
    if (explain_cmd->parsed()) return run_explain(model_path, apply_data, apply_out);
    if (drift_cmd->parsed())
      return run_drift(drift_data, drift_flags, drift_k, drift_quantile, drift_out);
    if (synth_cmd->parsed())
      return run_synth(synth_kind, synth_n, synth_p, synth_alpha, synth_seed, synth_task,
                       synth_out);
    if (bench_cmd->parsed())
      return run_benchmark(bench_n, bench_p, bench_alpha, bench_flags.seed, bench_task,
                           bench_flags, bench_k, bench_repeats);
    if (vis_cmd->parsed()) return run_vis(vis_flags.seed, vis_flags, vis_prefix);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
