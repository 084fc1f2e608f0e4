#include "gbmap/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gbmap/rng.hpp"

namespace gbmap {

namespace {

// RFC-4180-ish reader: quoted fields, doubled-quote escapes, LF or CRLF rows.
std::vector<std::vector<std::string>> read_csv_rows(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;

  const auto end_field = [&] {
    row.push_back(field);
    field.clear();
    field_started = false;
  };
  const auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };

  for (size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        field += c;
        field_started = true;
        break;
    }
  }
  if (quoted) throw DataError(path + ": unterminated quoted field");
  if (field_started || !row.empty()) end_row();

  if (rows.empty()) throw DataError(path + ": empty file");
  return rows;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// row/col are 1-based for error messages; the header counts as row 1.
double parse_number(const std::string& raw, size_t row, const std::string& col) {
  const std::string cell = trim(raw);
  const auto fail = [&](const char* what) -> double {
    throw DataError("row " + std::to_string(row) + ", column '" + col + "': " + what +
                    " ('" + raw + "')");
  };
  if (cell.empty()) return fail("missing value");
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return fail("not a number");
  if (!std::isfinite(value)) return fail("non-finite value");
  return value;
}

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string csv_escape(const std::string& s) {
  if (!needs_quoting(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += '"';
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target_column,
                 const std::vector<std::string>& categorical_columns,
                 std::optional<Task> task) {
  const auto rows = read_csv_rows(path);
  const auto& header = rows.front();
  const size_t width = header.size();
  if (rows.size() < 2) throw DataError(path + ": no data rows");

  Index target_idx = -1;
  if (!target_column.empty()) {
    for (size_t j = 0; j < width; ++j) {
      if (header[j] == target_column) {
        target_idx = static_cast<Index>(j);
        break;
      }
    }
    if (target_idx < 0) throw DataError(path + ": target column '" + target_column + "' not found");
  }

  std::set<std::string> cat_names(categorical_columns.begin(), categorical_columns.end());
  for (const auto& name : cat_names) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      throw DataError(path + ": categorical column '" + name + "' not found");
    }
    if (name == target_column) {
      throw DataError(path + ": target column cannot be categorical");
    }
  }

  const Index n = static_cast<Index>(rows.size() - 1);
  const Index p = static_cast<Index>(width) - (target_idx >= 0 ? 1 : 0);

  Dataset data;
  data.x.resize(n, p);
  data.y.resize(target_idx >= 0 ? n : 0);
  data.levels.assign(static_cast<size_t>(p), {});
  data.target_name = target_column;

  std::vector<Index> feature_of_field(width, -1);
  Index fcol = 0;
  for (size_t j = 0; j < width; ++j) {
    if (static_cast<Index>(j) == target_idx) continue;
    feature_of_field[j] = fcol++;
    data.feature_names.push_back(header[j]);
  }

  for (Index i = 0; i < n; ++i) {
    const auto& cells = rows[static_cast<size_t>(i) + 1];
    const size_t csv_row = static_cast<size_t>(i) + 2;
    if (cells.size() != width) {
      throw DataError(path + ": row " + std::to_string(csv_row) + " has " +
                      std::to_string(cells.size()) + " fields, expected " + std::to_string(width));
    }
    for (size_t j = 0; j < width; ++j) {
      const Index col = feature_of_field[j];
      if (col < 0) continue;  // target handled below
      if (cat_names.count(header[j])) {
        auto& table = data.levels[static_cast<size_t>(col)];
        const std::string cell = trim(cells[j]);
        if (cell.empty()) {
          throw DataError("row " + std::to_string(csv_row) + ", column '" + header[j] +
                          "': missing value");
        }
        auto it = std::find(table.begin(), table.end(), cell);
        if (it == table.end()) {
          table.push_back(cell);
          it = std::prev(table.end());
        }
        data.x(i, col) = static_cast<double>(it - table.begin());
      } else {
        data.x(i, col) = parse_number(cells[j], csv_row, header[j]);
      }
    }
    if (target_idx >= 0) {
      data.y[i] = parse_number(cells[static_cast<size_t>(target_idx)], csv_row, target_column);
    }
  }

  if (target_idx >= 0) {
    if (!task.has_value()) {
      bool all_pm1 = true;
      for (Index i = 0; i < n; ++i) {
        if (data.y[i] != 1.0 && data.y[i] != -1.0) {
          all_pm1 = false;
          break;
        }
      }
      task = all_pm1 ? Task::Classification : Task::Regression;
    }
    data.task = *task;
    if (data.task == Task::Classification) {
      bool any_zero = false, bad = false;
      for (Index i = 0; i < n && !bad; ++i) {
        const double v = data.y[i];
        if (v == 0.0) any_zero = true;
        else if (v != 1.0 && v != -1.0) bad = true;
      }
      if (bad || (any_zero && (data.y.array() == -1.0).any())) {
        throw DataError(path + ": classification targets must be coded {-1,+1} or {0,1}");
      }
      if (any_zero) {
        for (Index i = 0; i < n; ++i) data.y[i] = data.y[i] == 0.0 ? -1.0 : 1.0;
      }
    }
  }
  return data;
}

void save_csv(const Dataset& data, const std::string& path, bool include_target,
              bool include_intercept, bool include_row_labels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);

  include_target = include_target && data.y.size() == data.n();
  include_row_labels =
      include_row_labels && static_cast<Index>(data.row_labels.size()) == data.n();
  const Index last_feature =
      (data.has_intercept && !include_intercept) ? data.p() - 1 : data.p();

  std::string line;
  for (Index j = 0; j < last_feature; ++j) {
    if (j) line += ',';
    line += csv_escape(data.feature_names[static_cast<size_t>(j)]);
  }
  if (include_target) line += ',' + csv_escape(data.target_name.empty() ? "y" : data.target_name);
  if (include_row_labels) line += ",cluster";
  out << line << '\n';

  for (Index i = 0; i < data.n(); ++i) {
    line.clear();
    for (Index j = 0; j < last_feature; ++j) {
      if (j) line += ',';
      if (data.is_categorical(j)) {
        const auto& table = data.levels[static_cast<size_t>(j)];
        line += csv_escape(table[static_cast<size_t>(data.x(i, j))]);
      } else {
        line += format_double(data.x(i, j));
      }
    }
    if (include_target) line += ',' + format_double(data.y[i]);
    if (include_row_labels) line += ',' + csv_escape(data.row_labels[static_cast<size_t>(i)]);
    out << line << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

std::vector<std::string> PreprocessStats::output_feature_names() const {
  std::vector<std::string> names;
  for (const auto& s : numeric) names.push_back(s.name);
  for (const auto& c : categorical) {
    for (const auto& level : c.levels) names.push_back(c.name + "=" + level);
  }
  names.push_back("intercept");
  return names;
}

Index PreprocessStats::output_dim() const {
  size_t d = numeric.size() + 1;
  for (const auto& c : categorical) d += c.levels.size();
  return static_cast<Index>(d);
}

PreprocessStats fit_preprocess(const Dataset& train) {
  if (train.n() == 0) throw DataError("fit_preprocess: empty dataset");
  PreprocessStats stats;
  const double n = static_cast<double>(train.n());

  for (Index j = 0; j < train.p(); ++j) {
    const std::string& name = train.feature_names[static_cast<size_t>(j)];
    if (train.is_categorical(j)) {
      const auto& table = train.levels[static_cast<size_t>(j)];
      std::vector<bool> seen(table.size(), false);
      for (Index i = 0; i < train.n(); ++i) {
        seen[static_cast<size_t>(train.x(i, j))] = true;
      }
      PreprocessStats::CategoryMap map{name, {}};
      for (size_t l = 0; l < table.size(); ++l) {
        if (seen[l]) map.levels.push_back(table[l]);
      }
      stats.categorical.push_back(std::move(map));
      continue;
    }
    const double mean = train.x.col(j).mean();
    const double var = (train.x.col(j).array() - mean).square().sum() / n;
    const double std = std::sqrt(var);
    if (std < 1e-12 * std::max(1.0, std::abs(mean))) {
      stats.dropped.push_back(name);
    } else {
      stats.numeric.push_back({name, mean, std});
    }
  }

  if (stats.empty()) throw DataError("fit_preprocess: every feature is constant");
  return stats;
}

Dataset apply_preprocess(const PreprocessStats& stats, const Dataset& data) {
  const auto find_feature = [&](const std::string& name) -> Index {
    for (size_t j = 0; j < data.feature_names.size(); ++j) {
      if (data.feature_names[j] == name) return static_cast<Index>(j);
    }
    throw DataError("apply_preprocess: input is missing feature '" + name + "'");
  };

  Dataset out;
  out.x = Matrix::Zero(data.n(), stats.output_dim());
  out.y = data.y;
  out.task = data.task;
  out.target_name = data.target_name;
  out.row_labels = data.row_labels;
  out.has_intercept = true;
  out.feature_names = stats.output_feature_names();
  out.levels.assign(static_cast<size_t>(stats.output_dim()), {});

  Index col = 0;
  for (const auto& s : stats.numeric) {
    const Index src = find_feature(s.name);
    if (data.is_categorical(src)) {
      throw DataError("apply_preprocess: feature '" + s.name + "' is categorical here, numeric at fit time");
    }
    out.x.col(col++) = (data.x.col(src).array() - s.mean) / s.std;
  }
  for (const auto& c : stats.categorical) {
    const Index src = find_feature(c.name);
    if (!data.is_categorical(src)) {
      throw DataError("apply_preprocess: feature '" + c.name + "' is numeric here, categorical at fit time");
    }
    const auto& table = data.levels[static_cast<size_t>(src)];
    for (Index i = 0; i < data.n(); ++i) {
      const auto& value = table[static_cast<size_t>(data.x(i, src))];
      const auto it = std::find(c.levels.begin(), c.levels.end(), value);
      if (it == c.levels.end()) {
        throw DataError("apply_preprocess: feature '" + c.name + "' has unseen level '" + value + "'");
      }
      out.x(i, col + static_cast<Index>(it - c.levels.begin())) = 1.0;
    }
    col += static_cast<Index>(c.levels.size());
  }
  out.x.col(col).setOnes();
  return out;
}

Dataset gen_synth_cos(Index n, Index p, double alpha, std::uint64_t seed, Task task) {
  if (n < 1 || p < 1) throw std::invalid_argument("gen_synth_cos: n and p must be positive");
  Rng rng(seed);

  Dataset data;
  data.x.resize(n, p + 1);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) data.x(i, j) = rng.normal();
  }
  data.x.col(p).setOnes();

  const Vector u = rng.unit_vector(p);
  Vector y = alpha * (data.x.leftCols(p).array().cos().matrix() * u);
  y.array() -= y.mean();

  data.task = task;
  if (task == Task::Classification) {
    data.y.resize(n);
    for (Index i = 0; i < n; ++i) {
      data.y[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-y[i])) ? 1.0 : -1.0;
    }
  } else {
    data.y = std::move(y);
  }

  for (Index j = 0; j < p; ++j) data.feature_names.push_back("x" + std::to_string(j + 1));
  data.feature_names.push_back("intercept");
  data.has_intercept = true;
  data.levels.assign(static_cast<size_t>(p + 1), {});
  return data;
}

Dataset gen_cluster_vis(std::uint64_t seed) {
  constexpr Index kRows = 3000, kDims = 9, kPerCluster = 1000;
  Rng rng(seed);

  Dataset data;
  data.x.resize(kRows, kDims);
  for (Index i = 0; i < kRows; ++i) {
    for (Index j = 0; j < kDims - 1; ++j) data.x(i, j) = rng.normal();
  }
  data.x.block(0, 0, kPerCluster, 4).array() += 4.0;             // cluster a
  data.x.block(kPerCluster, 4, kPerCluster, 4).array() += 4.0;   // cluster b1
  data.x.col(kDims - 1).setOnes();

  // Unit direction supported on the four response-relevant dimensions.
  Vector u(kDims);
  double norm = 0.0;
  do {
    for (Index j = 0; j < kDims; ++j) u[j] = rng.normal();
    u.tail(5).setZero();
    norm = u.norm();
  } while (norm < 1e-12);
  u /= norm;

  data.y = data.x.array().cos().matrix() * u;
  data.task = Task::Regression;
  data.has_intercept = true;
  for (Index j = 0; j < kDims - 1; ++j) data.feature_names.push_back("x" + std::to_string(j + 1));
  data.feature_names.push_back("intercept");
  data.levels.assign(static_cast<size_t>(kDims), {});

  data.row_labels.reserve(kRows);
  for (Index i = 0; i < kRows; ++i) {
    data.row_labels.push_back(i < kPerCluster ? "a" : (i < 2 * kPerCluster ? "b1" : "b2"));
  }
  return data;
}

Dataset select_rows(const Dataset& data, const std::vector<Index>& rows) {
  Dataset out;
  out.x.resize(static_cast<Index>(rows.size()), data.p());
  const bool has_y = data.y.size() == data.n();
  if (has_y) out.y.resize(static_cast<Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Index>(i)) = data.x.row(rows[i]);
    if (has_y) out.y[static_cast<Index>(i)] = data.y[rows[i]];
  }
  out.feature_names = data.feature_names;
  out.task = data.task;
  out.has_intercept = data.has_intercept;
  out.target_name = data.target_name;
  out.levels = data.levels;
  if (!data.row_labels.empty()) {
    for (Index r : rows) out.row_labels.push_back(data.row_labels[static_cast<size_t>(r)]);
  }
  return out;
}

Dataset drop_column(const Dataset& data, Index col) {
  if (col < 0 || col >= data.p()) throw std::invalid_argument("drop_column: index out of range");
  Dataset out;
  out.x.resize(data.n(), data.p() - 1);
  if (col > 0) out.x.leftCols(col) = data.x.leftCols(col);
  if (col + 1 < data.p()) out.x.rightCols(data.p() - col - 1) = data.x.rightCols(data.p() - col - 1);
  out.y = data.y;
  out.task = data.task;
  out.target_name = data.target_name;
  out.row_labels = data.row_labels;
  out.has_intercept = data.has_intercept && col != data.p() - 1;
  for (Index j = 0; j < data.p(); ++j) {
    if (j == col) continue;
    out.feature_names.push_back(data.feature_names[static_cast<size_t>(j)]);
    // levels may be shorter than p() when no column is categorical
    out.levels.push_back(j < static_cast<Index>(data.levels.size())
                             ? data.levels[static_cast<size_t>(j)]
                             : std::vector<std::string>{});
  }
  return out;
}

}  // namespace gbmap
