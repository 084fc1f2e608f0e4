#include "gbmap/serialize.hpp"

#include <filesystem>
#include <fstream>

namespace gbmap {

using nlohmann::json;

namespace {

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const json& arr) {
  Vector v(static_cast<Index>(arr.size()));
  Index i = 0;
  for (const auto& x : arr) v[i++] = x.get<double>();
  return v;
}

}  // namespace

json preprocess_to_json(const PreprocessStats& stats) {
  json j;
  j["numeric"] = json::array();
  for (const auto& s : stats.numeric) {
    j["numeric"].push_back({{"name", s.name}, {"mean", s.mean}, {"std", s.std}});
  }
  j["categorical"] = json::array();
  for (const auto& c : stats.categorical) {
    j["categorical"].push_back({{"name", c.name}, {"levels", c.levels}});
  }
  j["dropped"] = stats.dropped;
  j["std_convention"] = stats.std_convention;
  return j;
}

PreprocessStats preprocess_from_json(const json& j) {
  PreprocessStats stats;
  for (const auto& s : j.at("numeric")) {
    stats.numeric.push_back({s.at("name").get<std::string>(), s.at("mean").get<double>(),
                             s.at("std").get<double>()});
  }
  for (const auto& c : j.at("categorical")) {
    stats.categorical.push_back(
        {c.at("name").get<std::string>(), c.at("levels").get<std::vector<std::string>>()});
  }
  stats.dropped = j.at("dropped").get<std::vector<std::string>>();
  stats.std_convention = j.value("std_convention", std::string("population"));
  return stats;
}

json model_to_json(const GbmapModel& model, const json& provenance) {
  json j;
  j["format_version"] = kModelFormatVersion;
  j["task"] = to_string(model.task);
  j["beta"] = model.beta;
  j["nonlinearity"] = model.nonlinearity == Nonlinearity::Softplus ? "softplus" : "identity";
  j["p"] = model.p;

  switch (model.f0.kind) {
    case InitialModel::Kind::Zero:
      j["f0"] = {{"kind", "zero"}};
      break;
    case InitialModel::Kind::Linear:
      j["f0"] = {{"kind", "linear"}, {"coefficients", vector_to_json(model.f0.coefficients)}};
      break;
    case InitialModel::Kind::Callback:
      throw std::logic_error("model_to_json: an external-callback initial model cannot be serialized");
  }

  j["learners"] = json::array();
  for (const auto& lr : model.learners) {
    j["learners"].push_back({{"a", lr.a}, {"b", lr.b}, {"w", vector_to_json(lr.w)}});
  }
  j["preprocessing"] = preprocess_to_json(model.preprocessing);
  j["training_loss"] = model.training_loss;
  j["provenance"] = provenance;
  return j;
}

GbmapModel model_from_json(const json& j) {
  const int version = j.at("format_version").get<int>();
  if (version != kModelFormatVersion) {
    throw DataError("model file: unsupported format_version " + std::to_string(version));
  }

  GbmapModel model;
  model.task = task_from_string(j.at("task").get<std::string>());
  model.beta = j.at("beta").get<double>();
  const std::string nonlin = j.value("nonlinearity", std::string("softplus"));
  if (nonlin == "softplus") {
    model.nonlinearity = Nonlinearity::Softplus;
  } else if (nonlin == "identity") {
    model.nonlinearity = Nonlinearity::Identity;
  } else {
    throw DataError("model file: unknown nonlinearity '" + nonlin + "'");
  }
  model.p = j.at("p").get<Index>();

  const json& f0 = j.at("f0");
  const std::string kind = f0.at("kind").get<std::string>();
  if (kind == "zero") {
    model.f0 = InitialModel::zero();
  } else if (kind == "linear") {
    model.f0 = InitialModel::linear(vector_from_json(f0.at("coefficients")));
  } else {
    throw DataError("model file: unknown f0 kind '" + kind + "'");
  }

  for (const auto& lr : j.at("learners")) {
    WeakLearner learner;
    learner.a = lr.at("a").get<double>();
    learner.b = lr.at("b").get<int>();
    if (learner.b != 1 && learner.b != -1) {
      throw DataError("model file: learner sign must be +1 or -1");
    }
    learner.w = vector_from_json(lr.at("w"));
    if (learner.w.size() != model.p) {
      throw DataError("model file: learner weight size does not match p");
    }
    model.learners.push_back(std::move(learner));
  }

  model.preprocessing = preprocess_from_json(j.at("preprocessing"));
  if (j.contains("training_loss")) {
    model.training_loss = j.at("training_loss").get<std::vector<double>>();
  }
  return model;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DataError("cannot move temp file onto " + path);
  }
}

void save_model(const GbmapModel& model, const std::string& path, const json& provenance) {
  write_text_atomic(path, model_to_json(model, provenance).dump(2) + "\n");
}

GbmapModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  json j;
  try {
    in >> j;
    return model_from_json(j);
  } catch (const json::exception& e) {
    throw DataError("model file " + path + ": " + e.what());
  }
}

}  // namespace gbmap
