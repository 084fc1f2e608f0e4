// Python surface: fit/load models, predict, embed, distances, explanations,
// the synthetic generator, and the drift pipeline. Arrays cross the boundary
// as numpy via Eigen; datasets get synthetic feature names x1..xp so models
// interoperate with CSV files written the same way.

#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gbmap/boosting.hpp"
#include "gbmap/data.hpp"
#include "gbmap/drift.hpp"
#include "gbmap/model.hpp"
#include "gbmap/neighbors.hpp"
#include "gbmap/serialize.hpp"

namespace py = pybind11;
using namespace gbmap;

namespace {

std::vector<std::string> synthetic_names(Index p) {
  std::vector<std::string> names;
  for (Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  return names;
}

// targets may arrive as {0,1}; the library wants {-1,+1}
Vector recode_labels(const Vector& y) {
  bool zero_one = true, pm_one = true;
  for (Index i = 0; i < y.size(); ++i) {
    zero_one = zero_one && (y[i] == 0.0 || y[i] == 1.0);
    pm_one = pm_one && (y[i] == -1.0 || y[i] == 1.0);
  }
  if (pm_one) return y;
  if (!zero_one) {
    throw std::invalid_argument("classification targets must be coded {-1,+1} or {0,1}");
  }
  Vector out(y.size());
  for (Index i = 0; i < y.size(); ++i) out[i] = y[i] == 0.0 ? -1.0 : 1.0;
  return out;
}

Dataset make_dataset(const Matrix& x, const Vector& y, Task task) {
  if (y.size() != x.rows()) {
    throw std::invalid_argument("X and y row counts disagree");
  }
  Dataset d;
  d.x = x;
  d.y = task == Task::Classification ? recode_labels(y) : y;
  d.feature_names = synthetic_names(x.cols());
  d.task = task;
  return d;
}

// standardize=False still runs the stats pipeline, just with frozen
// identity stats, so every fitted model owns a preprocessing payload and
// application code has a single path
PreprocessStats identity_stats(const std::vector<std::string>& names) {
  PreprocessStats stats;
  for (const auto& name : names) stats.numeric.push_back({name, 0.0, 1.0});
  return stats;
}

struct PyModel {
  GbmapModel model;

  Dataset prep(const Matrix& x) const {
    Dataset d;
    d.x = x;
    d.feature_names = synthetic_names(x.cols());
    return apply_preprocess(model.preprocessing, d);
  }
  Vector prep_row(const Vector& x) const {
    Matrix m(1, x.size());
    m.row(0) = x.transpose();
    return prep(m).x.row(0).transpose();
  }

  Vector predict_m(const Matrix& x) const { return predict_rows(model, prep(x).x); }

  Vector proba_m(const Matrix& x) const {
    const Dataset d = prep(x);
    Vector out(d.n());
    for (Index i = 0; i < d.n(); ++i) out[i] = predict_proba(model, d.x.row(i).transpose());
    return out;
  }

  std::vector<int> class_m(const Matrix& x) const {
    const Dataset d = prep(x);
    std::vector<int> out;
    for (Index i = 0; i < d.n(); ++i) out.push_back(predict_class(model, d.x.row(i).transpose()));
    return out;
  }

  Matrix embed_m(const Matrix& x) const { return embed_rows(model, prep(x).x); }

  double distance(const Vector& x, const Vector& xp) const {
    return embedding_distance(model, prep_row(x), prep_row(xp));
  }

  double path(const Vector& x, const Vector& xp, int grid) const {
    return path_distance(model, prep_row(x), prep_row(xp), grid);
  }

  Vector explain(const Vector& x) const { return local_coefficients(model, prep_row(x)); }

  std::vector<std::string> feature_names() const {
    return model.preprocessing.output_feature_names();
  }
};

PyModel fit_py(const Matrix& x, const Vector& y, const std::string& task_name, int m, double beta,
               double lambda, int maxiter, std::uint64_t seed, bool standardize) {
  const Task task = task_from_string(task_name);
  const Dataset raw = make_dataset(x, y, task);

  const PreprocessStats stats =
      standardize ? fit_preprocess(raw) : identity_stats(raw.feature_names);
  const Dataset prepped = apply_preprocess(stats, raw);

  FitConfig config;
  config.m = m;
  config.beta = beta;
  config.lambda = lambda;
  config.optimizer.max_iterations = maxiter;
  config.seed = seed;
  config.task = task;

  PyModel out{fit(prepped, config)};
  out.model.preprocessing = stats;
  return out;
}

py::dict run_drift_py(const Matrix& x, const Vector& y, const std::string& task_name, int k,
                      double quantile, int m, double beta, double lambda, int maxiter,
                      std::uint64_t seed) {
  const Task task = task_from_string(task_name);
  const Dataset raw = make_dataset(x, y, task);

  FitConfig config;
  config.m = m;
  config.beta = beta;
  config.lambda = lambda;
  config.optimizer.max_iterations = maxiter;
  config.seed = seed;
  config.task = task;

  const DriftSplit split = make_drift_split(raw, config, seed);
  const PreprocessStats stats = fit_preprocess(split.a1);
  const Dataset a1 = apply_preprocess(stats, split.a1);
  const Dataset a2 = apply_preprocess(stats, split.a2);
  const Dataset b = apply_preprocess(stats, split.b);
  const GbmapModel model = fit(a1, config);

  std::optional<Vector> score_model;
  if (task == Task::Classification) {
    Dataset all;
    all.x.resize(a1.n() + a2.n() + b.n(), a1.p());
    all.y.resize(all.x.rows());
    all.x << a1.x, a2.x, b.x;
    all.y << a1.y, a2.y, b.y;
    all.feature_names = a1.feature_names;
    all.task = task;
    all.has_intercept = a1.has_intercept;
    score_model = fit_score_model(all, config.optimizer);
  }

  const NeighborSearch emb_search(a1, MetricKind::embedding(model));
  const NeighborSearch euc_search(a1, MetricKind::euclidean());

  std::vector<double> ref_losses;
  for (Index i = 0; i < a2.n(); ++i) {
    ref_losses.push_back(ground_truth_loss(model, a2.x.row(i).transpose(), a2.y[i], score_model));
  }
  std::vector<double> losses, gbmap_ind, euclid_ind;
  for (const Dataset* part : {&a2, &b}) {
    for (Index i = 0; i < part->n(); ++i) {
      const Vector row = part->x.row(i).transpose();
      losses.push_back(ground_truth_loss(model, row, part->y[i], score_model));
      gbmap_ind.push_back(gbmap_indicator(model, emb_search, row, k));
      euclid_ind.push_back(euclid_indicator(euc_search, row, k));
    }
  }

  const DriftReport ours = label_and_score(ref_losses, losses, gbmap_ind, quantile);
  const DriftReport baseline = label_and_score(ref_losses, losses, euclid_ind, quantile);

  py::dict report;
  report["indicators"] = ours.indicators;
  report["losses"] = ours.losses;
  report["labels"] = ours.labels;
  report["threshold"] = ours.threshold;
  report["auc"] = ours.auc ? py::object(py::float_(*ours.auc)) : py::none();
  report["euclid_auc"] = baseline.auc ? py::object(py::float_(*baseline.auc)) : py::none();
  report["roc"] = ours.roc;
  report["dropped_feature"] = split.dropped_feature;
  report["drift_magnitude"] = split.drift_magnitude;
  return report;
}

py::tuple synth_cos_py(Index n, Index p, double alpha, std::uint64_t seed,
                       const std::string& task_name) {
  const Dataset d = gen_synth_cos(n, p, alpha, seed, task_from_string(task_name));
  // the generator appends an intercept column; callers get the plain matrix
  return py::make_tuple(Matrix(d.x.leftCols(d.p() - 1)), d.y);
}

}  // namespace

PYBIND11_MODULE(_gbmap, mod) {
  mod.doc() = "supervised embeddings from boosted softplus perceptrons";

  py::register_exception<DataError>(mod, "DataError", PyExc_ValueError);
  py::register_exception<NumericError>(mod, "NumericError", PyExc_ArithmeticError);

  py::class_<PyModel>(mod, "Model")
      .def("predict", &PyModel::predict_m, py::arg("X"),
           "model predictions, one per row of X")
      .def("predict_proba", &PyModel::proba_m, py::arg("X"),
           "P(y = +1), classification models only")
      .def("predict_class", &PyModel::class_m, py::arg("X"), "class labels in {-1, +1}")
      .def("embed", &PyModel::embed_m, py::arg("X"),
           "per-stage contributions, one column per boosting stage")
      .def("embedding_distance", &PyModel::distance, py::arg("x"), py::arg("xp"),
           "Manhattan distance between the two embeddings")
      .def("path_distance", &PyModel::path, py::arg("x"), py::arg("xp"), py::arg("grid") = 1000,
           "arc length of the prediction along the segment from x to xp")
      .def("local_coefficients", &PyModel::explain, py::arg("x"),
           "gradient of the prediction at x, one entry per preprocessed feature")
      .def("save", [](const PyModel& self, const std::string& path) { save_model(self.model, path); },
           py::arg("path"))
      .def_property_readonly("training_loss",
                             [](const PyModel& self) { return self.model.training_loss; })
      .def_property_readonly("stages", [](const PyModel& self) { return self.model.stages(); })
      .def_property_readonly("beta", [](const PyModel& self) { return self.model.beta; })
      .def_property_readonly("task",
                             [](const PyModel& self) { return to_string(self.model.task); })
      .def_property_readonly("feature_names", &PyModel::feature_names)
      .def("__repr__", [](const PyModel& self) {
        return "<gbmap.Model " + std::string(to_string(self.model.task)) + ", " +
               std::to_string(self.model.stages()) + " stages>";
      });

  mod.def("fit", &fit_py, py::arg("X"), py::arg("y"), py::kw_only(),
          py::arg("task") = "regression", py::arg("m") = 20, py::arg("beta") = 5.0,
          py::arg("lambda_") = 1e-3, py::arg("maxiter") = 200, py::arg("seed") = 0,
          py::arg("standardize") = true,
          "fit a boosted softplus perceptron model on numpy arrays");

  mod.def("load", [](const std::string& path) { return PyModel{load_model(path)}; },
          py::arg("path"), "load a model saved by Model.save or the CLI");

  mod.def("synth_cos", &synth_cos_py, py::arg("n"), py::arg("p"), py::kw_only(),
          py::arg("alpha") = 5.0, py::arg("seed") = 0, py::arg("task") = "regression",
          "synthetic cosine benchmark data; returns (X, y)");

  mod.def("run_drift", &run_drift_py, py::arg("X"), py::arg("y"), py::kw_only(),
          py::arg("task") = "regression", py::arg("k") = 5, py::arg("quantile") = 0.95,
          py::arg("m") = 20, py::arg("beta") = 5.0, py::arg("lambda_") = 1e-3,
          py::arg("maxiter") = 200, py::arg("seed") = 0,
          "drift-detection benchmark: split, fit, score, label, ROC/AUC");
}
