#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "panda/model.hpp"

namespace panda {

//! A labelled two-class dataset loaded from CSV. Labels are 0/1 and every
//! entry is finite.
struct RealDataset {
  Matrix x;
  std::vector<int> labels;
  std::vector<std::string> feature_names;

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index p() const { return x.cols(); }
  Eigen::Index count_label(int label) const;
  //! Rows of one class, in dataset order.
  Matrix class_rows(int label) const;
};

//! Parse a delimited text file with a header row. Every column except the
//! label column must be numeric; any non-finite or unparseable cell fails
//! with its row and column in the message, as does a label outside {0, 1}.
RealDataset load_csv(const std::string& path, const std::string& label_column,
                     char delimiter = ',');

//! Write a dataset back out (full numeric precision, so load_csv recovers
//! bit-equal values).
void write_csv(const RealDataset& data, const std::string& path,
               const std::string& label_column = "label",
               char delimiter = ',');

//! Drop the features whose pooled sample variance falls in the lower or
//! upper `fraction` tail: with k = floor(fraction * p), the k smallest and
//! k largest variances go (nearest-rank tails; variance ties break by
//! feature index). fraction = 0 keeps everything.
RealDataset variance_quantile_filter(const RealDataset& data,
                                     double fraction = 1.0 / 6.0);

//! Indices of the m features with the largest absolute two-sample
//! t-statistics (pooled variance) on the training split, most significant
//! first; ties break toward the lower index. A zero-variance zero-gap
//! feature scores 0.
std::vector<Eigen::Index> t_test_select(const RealDataset& train,
                                        Eigen::Index m = 2000);

//! Restrict a dataset to the given feature indices (in the given order).
RealDataset select_features(const RealDataset& data,
                            const std::vector<Eigen::Index>& indices);

struct SplitCounts {
  Eigen::Index train0 = 0, train1 = 0;
  Eigen::Index val0 = 0, val1 = 0;
  Eigen::Index test0 = 0, test1 = 0;
};

struct SplitResult {
  RealDataset train, val, test;
  // Row indices into the input dataset, recorded for the split manifest.
  std::vector<Eigen::Index> train_rows, val_rows, test_rows;
};

//! Disjoint per-class split with seed-determined shuffling. Throws when a
//! class has fewer rows than its three requested counts combined.
SplitResult stratified_split(const RealDataset& data, const SplitCounts& counts,
                             std::uint64_t seed);

}  // namespace panda
