#include "panda/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "panda/rng.hpp"

namespace panda {

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream stream(line);
  while (std::getline(stream, cell, delimiter)) cells.push_back(cell);
  if (!line.empty() && line.back() == delimiter) cells.emplace_back();
  return cells;
}

std::string trimmed(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

}  // namespace

Eigen::Index RealDataset::count_label(int label) const {
  return static_cast<Eigen::Index>(
      std::count(labels.begin(), labels.end(), label));
}

Matrix RealDataset::class_rows(int label) const {
  Matrix rows(count_label(label), p());
  Eigen::Index out = 0;
  for (Eigen::Index i = 0; i < n(); ++i) {
    if (labels[i] == label) rows.row(out++) = x.row(i);
  }
  return rows;
}

RealDataset load_csv(const std::string& path, const std::string& label_column,
                     char delimiter) {
  std::ifstream file(path);
  if (!file) throw InvalidInput("cannot open " + path);

  std::string line;
  if (!std::getline(file, line)) throw InvalidInput(path + " is empty");
  const std::vector<std::string> header = split_line(line, delimiter);

  Eigen::Index label_col = -1;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = trimmed(header[i]);
    if (name == label_column) {
      label_col = static_cast<Eigen::Index>(i);
    } else {
      names.push_back(name);
    }
  }
  if (label_col < 0) {
    throw InvalidInput("label column '" + label_column + "' not found in " +
                       path);
  }

  std::vector<std::vector<double>> values;
  std::vector<int> labels;
  Eigen::Index row_number = 1;
  while (std::getline(file, line)) {
    ++row_number;
    if (trimmed(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line, delimiter);
    if (cells.size() != header.size()) {
      throw InvalidInput(path + " row " + std::to_string(row_number) +
                         ": expected " + std::to_string(header.size()) +
                         " cells, got " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(header.size() - 1);
    for (std::size_t col = 0; col < cells.size(); ++col) {
      const std::string cell = trimmed(cells[col]);
      const std::string where = path + " row " + std::to_string(row_number) +
                                " column " + std::to_string(col + 1);
      if (static_cast<Eigen::Index>(col) == label_col) {
        if (cell == "0") labels.push_back(0);
        else if (cell == "1") labels.push_back(1);
        else throw InvalidInput(where + ": label must be 0 or 1, got '" +
                                cell + "'");
        continue;
      }
      std::size_t consumed = 0;
      double value = 0.0;
      try {
        value = std::stod(cell, &consumed);
      } catch (const std::exception&) {
        throw InvalidInput(where + ": cannot parse '" + cell + "'");
      }
      if (consumed != cell.size() || !std::isfinite(value)) {
        throw InvalidInput(where + ": non-finite or trailing garbage in '" +
                           cell + "'");
      }
      row.push_back(value);
    }
    values.push_back(std::move(row));
  }
  if (values.empty()) throw InvalidInput(path + " has no data rows");

  RealDataset data;
  data.feature_names = std::move(names);
  data.labels = std::move(labels);
  data.x.resize(static_cast<Eigen::Index>(values.size()),
                static_cast<Eigen::Index>(values.front().size()));
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
      data.x(i, j) = values[i][j];
    }
  }
  return data;
}

void write_csv(const RealDataset& data, const std::string& path,
               const std::string& label_column, char delimiter) {
  std::ofstream file(path);
  if (!file) throw InvalidInput("cannot write " + path);
  file << label_column;
  for (Eigen::Index j = 0; j < data.p(); ++j) {
    file << delimiter
         << (j < static_cast<Eigen::Index>(data.feature_names.size())
                 ? data.feature_names[j]
                 : "f" + std::to_string(j));
  }
  file << "\n";
  char buffer[40];
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    file << data.labels[i];
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", data.x(i, j));
      file << delimiter << buffer;
    }
    file << "\n";
  }
}

RealDataset variance_quantile_filter(const RealDataset& data,
                                     double fraction) {
  if (fraction < 0.0 || fraction >= 0.5) {
    throw InvalidInput("fraction must lie in [0, 0.5)");
  }
  const Eigen::Index p = data.p();
  const Eigen::Index k =
      static_cast<Eigen::Index>(fraction * static_cast<double>(p));
  if (k == 0) return data;

  const Eigen::Index n = data.n();
  if (n < 2) throw InsufficientData("need at least 2 rows for a variance");
  Vector variances(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean = data.x.col(j).mean();
    variances(j) =
        (data.x.col(j).array() - mean).square().sum() / double(n - 1);
  }

  std::vector<Eigen::Index> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return variances(a) != variances(b) ? variances(a) < variances(b) : a < b;
  });

  std::vector<Eigen::Index> kept(order.begin() + k, order.end() - k);
  std::sort(kept.begin(), kept.end());
  return select_features(data, kept);
}

std::vector<Eigen::Index> t_test_select(const RealDataset& train,
                                        Eigen::Index m) {
  const Matrix x0 = train.class_rows(0);
  const Matrix x1 = train.class_rows(1);
  const Eigen::Index n0 = x0.rows(), n1 = x1.rows();
  if (n0 < 2 || n1 < 2) {
    throw InvalidInput("both classes need at least 2 training rows");
  }
  if (m < 1 || m > train.p()) {
    throw InvalidInput("m must lie in [1, p]");
  }

  Vector abs_t(train.p());
  const double inv_scale =
      1.0 / std::sqrt(1.0 / double(n0) + 1.0 / double(n1));
  for (Eigen::Index j = 0; j < train.p(); ++j) {
    const double mean0 = x0.col(j).mean();
    const double mean1 = x1.col(j).mean();
    const double ss0 = (x0.col(j).array() - mean0).square().sum();
    const double ss1 = (x1.col(j).array() - mean1).square().sum();
    const double pooled_sd =
        std::sqrt((ss0 + ss1) / static_cast<double>(n0 + n1 - 2));
    const double gap = mean1 - mean0;
    // 0/0 counts as no evidence.
    abs_t(j) = pooled_sd > 0.0 ? std::abs(gap) / pooled_sd * inv_scale
                               : (gap == 0.0 ? 0.0
                                             : std::numeric_limits<double>::infinity());
  }

  std::vector<Eigen::Index> order(train.p());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     return abs_t(a) != abs_t(b) ? abs_t(a) > abs_t(b)
                                                 : a < b;
                   });
  order.resize(m);
  return order;
}

RealDataset select_features(const RealDataset& data,
                            const std::vector<Eigen::Index>& indices) {
  RealDataset out;
  out.labels = data.labels;
  out.x.resize(data.n(), static_cast<Eigen::Index>(indices.size()));
  out.feature_names.reserve(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const Eigen::Index src = indices[j];
    if (src < 0 || src >= data.p()) throw InvalidInput("feature index out of range");
    out.x.col(static_cast<Eigen::Index>(j)) = data.x.col(src);
    out.feature_names.push_back(
        src < static_cast<Eigen::Index>(data.feature_names.size())
            ? data.feature_names[src]
            : "f" + std::to_string(src));
  }
  return out;
}

namespace {

RealDataset take_rows(const RealDataset& data,
                      const std::vector<Eigen::Index>& rows) {
  RealDataset out;
  out.feature_names = data.feature_names;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), data.p());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = data.x.row(rows[i]);
    out.labels.push_back(data.labels[rows[i]]);
  }
  return out;
}

}  // namespace

SplitResult stratified_split(const RealDataset& data, const SplitCounts& counts,
                             std::uint64_t seed) {
  std::vector<Eigen::Index> class0, class1;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    (data.labels[i] == 0 ? class0 : class1).push_back(i);
  }
  const Eigen::Index need0 = counts.train0 + counts.val0 + counts.test0;
  const Eigen::Index need1 = counts.train1 + counts.val1 + counts.test1;
  if (need0 > static_cast<Eigen::Index>(class0.size())) {
    throw InvalidInput("class 0 has " + std::to_string(class0.size()) +
                       " rows, split needs " + std::to_string(need0));
  }
  if (need1 > static_cast<Eigen::Index>(class1.size())) {
    throw InvalidInput("class 1 has " + std::to_string(class1.size()) +
                       " rows, split needs " + std::to_string(need1));
  }

  auto shuffle = [](std::vector<Eigen::Index>& rows, Rng& rng) {
    for (std::size_t i = rows.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(
          rng.uniform() * static_cast<double>(i));
      std::swap(rows[i - 1], rows[std::min(j, i - 1)]);
    }
  };
  Rng rng0(derive_seed(seed, 0)), rng1(derive_seed(seed, 1));
  shuffle(class0, rng0);
  shuffle(class1, rng1);

  SplitResult result;
  auto take = [](const std::vector<Eigen::Index>& rows, Eigen::Index begin,
                 Eigen::Index count) {
    return std::vector<Eigen::Index>(rows.begin() + begin,
                                     rows.begin() + begin + count);
  };
  auto merge = [](std::vector<Eigen::Index> a, std::vector<Eigen::Index> b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    return a;
  };
  result.train_rows = merge(take(class0, 0, counts.train0),
                            take(class1, 0, counts.train1));
  result.val_rows = merge(take(class0, counts.train0, counts.val0),
                          take(class1, counts.train1, counts.val1));
  result.test_rows =
      merge(take(class0, counts.train0 + counts.val0, counts.test0),
            take(class1, counts.train1 + counts.val1, counts.test1));
  result.train = take_rows(data, result.train_rows);
  result.val = take_rows(data, result.val_rows);
  result.test = take_rows(data, result.test_rows);
  return result;
}

}  // namespace panda
