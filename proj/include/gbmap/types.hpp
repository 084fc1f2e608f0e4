#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace gbmap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class Task { Regression, Classification };

/// Nonlinearity applied to the projection w'x inside a weak learner.
/// Identity exists for the linear-reduction checks and the linear baselines;
/// trained models use Softplus.
enum class Nonlinearity { Softplus, Identity };

/// One boosting stage: contributes a + b * g(w'x) to the ensemble.
struct WeakLearner {
  double a = 0.0;
  int b = 1;  // sign, +1 or -1
  Vector w;
};

/// Ingestion and schema problems. The CLI maps these to exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unrecoverable numeric failure. The CLI maps these to exit code 4.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const char* to_string(Task task) {
  return task == Task::Regression ? "regression" : "classification";
}

inline Task task_from_string(const std::string& name) {
  if (name == "regression") return Task::Regression;
  if (name == "classification") return Task::Classification;
  throw std::invalid_argument("unknown task: " + name);
}

}  // namespace gbmap
