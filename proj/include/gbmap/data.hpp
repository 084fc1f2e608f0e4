#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gbmap/types.hpp"

namespace gbmap {

/// A design matrix plus targets. Categorical columns keep their cells in `x`
/// as indices into the matching `levels` entry; numeric columns have an empty
/// level table. `row_labels` is optional metadata (cluster ids from the
/// visualization generator).
struct Dataset {
  Matrix x;
  Vector y;
  std::vector<std::string> feature_names;
  Task task = Task::Regression;
  bool has_intercept = false;
  std::string target_name = "y";
  std::vector<std::vector<std::string>> levels;
  std::vector<std::string> row_labels;

  Index n() const { return x.rows(); }
  Index p() const { return x.cols(); }
  bool is_categorical(Index col) const {
    return col < static_cast<Index>(levels.size()) && !levels[static_cast<size_t>(col)].empty();
  }
};

/// Standardization and encoding parameters, fitted on training data only.
struct PreprocessStats {
  struct NumericStat {
    std::string name;
    double mean = 0.0;
    double std = 1.0;  // population convention: divide by n
  };
  struct CategoryMap {
    std::string name;
    std::vector<std::string> levels;  // one-hot column order
  };

  std::vector<NumericStat> numeric;
  std::vector<CategoryMap> categorical;
  std::vector<std::string> dropped;  // zero-variance features, recorded as warnings
  std::string std_convention = "population";

  /// Names of the transformed columns: standardized numerics, then one-hot
  /// columns as "name=level", then "intercept" last.
  std::vector<std::string> output_feature_names() const;
  Index output_dim() const;
  bool empty() const { return numeric.empty() && categorical.empty(); }
};

/// Reads an RFC-4180-style CSV (header required, quoted fields supported).
/// Columns listed in `categorical_columns` are level-encoded; everything else
/// must parse as a number. Classification targets may be coded {-1,+1} or
/// {0,1}; the latter is mapped to -1/+1. With task unset, infers
/// Classification iff every target is exactly -1 or +1, else Regression.
/// Throws DataError with row/column coordinates on any malformed cell.
Dataset load_csv(const std::string& path, const std::string& target_column,
                 const std::vector<std::string>& categorical_columns = {},
                 std::optional<Task> task = std::nullopt);

void save_csv(const Dataset& data, const std::string& path, bool include_target = true,
              bool include_intercept = false, bool include_row_labels = false);

/// Computes standardization stats and category maps on training data.
/// Zero-variance features (population std below 1e-12 * max(1, |mean|)) are
/// dropped and recorded. Throws DataError if nothing survives.
PreprocessStats fit_preprocess(const Dataset& train);

/// Applies fitted stats: standardized numerics in stats order, one-hot
/// columns appended, intercept column of ones appended last. Feature lookup
/// is by name; a missing feature or an unseen category level throws
/// DataError naming the offender.
Dataset apply_preprocess(const PreprocessStats& stats, const Dataset& data);

/// Synthetic benchmark family: X is n x p i.i.d. standard normal, u a random
/// unit vector, y = alpha * cos(X) u, centered. Classification resamples
/// labels +1 with probability sigmoid(y). The returned dataset is fit-ready:
/// an intercept column is already appended.
Dataset gen_synth_cos(Index n, Index p, double alpha, std::uint64_t seed, Task task);

/// Three-cluster visualization fixture: 3000 x 9, rows 0..999 shifted +4 on
/// dims 0..3 ("a"), rows 1000..1999 shifted +4 on dims 4..7 ("b1"), the rest
/// untouched ("b2"); column 9 is constant 1. The response y = cos(X) u uses a
/// unit vector supported on dims 0..3 only, so b1 and b2 differ in covariates
/// the response never sees. Cluster ids are in row_labels.
Dataset gen_cluster_vis(std::uint64_t seed);

/// Row subset helper (keeps names, levels, labels aligned).
Dataset select_rows(const Dataset& data, const std::vector<Index>& rows);

/// Drop one feature column by index.
Dataset drop_column(const Dataset& data, Index col);

}  // namespace gbmap
