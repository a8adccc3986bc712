#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "panda/dataset_io.hpp"
#include "panda/rng.hpp"

using namespace panda;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("panda_io_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path);
  file << text;
}

}  // namespace

TEST_CASE("csv loading recovers a handcrafted matrix") {
  TempDir dir;
  const std::string path = dir.file("tiny.csv");
  write_file(path,
             "label,a,b\n"
             "0,1.5,-2\n"
             "1,0.25,1e3\n"
             "0,-0.125,4\n");
  const RealDataset data = load_csv(path, "label");
  REQUIRE(data.n() == 3);
  REQUIRE(data.p() == 2);
  CHECK(data.labels == std::vector<int>{0, 1, 0});
  CHECK(data.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(data.x(0, 0) == 1.5);
  CHECK(data.x(1, 1) == 1000.0);
  CHECK(data.x(2, 0) == -0.125);
}

TEST_CASE("csv loading reports bad cells with their location") {
  TempDir dir;
  const std::string nan_path = dir.file("nan.csv");
  write_file(nan_path, "label,a\n0,NaN\n");
  CHECK_THROWS_WITH_AS(load_csv(nan_path, "label"),
                       doctest::Contains("row 2"), InvalidInput);

  const std::string label_path = dir.file("label.csv");
  write_file(label_path, "label,a\n2,0.5\n");
  CHECK_THROWS_AS(load_csv(label_path, "label"), InvalidInput);

  const std::string missing_path = dir.file("missing.csv");
  write_file(missing_path, "other,a\n0,0.5\n");
  CHECK_THROWS_WITH_AS(load_csv(missing_path, "label"),
                       doctest::Contains("label"), InvalidInput);
}

TEST_CASE("write and reload round-trips bit-exactly") {
  Rng rng(5);
  RealDataset data;
  data.x.resize(7, 4);
  for (Eigen::Index i = 0; i < 7; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) data.x(i, j) = rng.normal() * 1e3;
    data.labels.push_back(i % 2);
  }
  data.feature_names = {"w", "x", "y", "z"};

  TempDir dir;
  const std::string path = dir.file("round.csv");
  write_csv(data, path);
  const RealDataset loaded = load_csv(path, "label");
  CHECK(loaded.x == data.x);
  CHECK(loaded.labels == data.labels);
  CHECK(loaded.feature_names == data.feature_names);
}

namespace {

RealDataset variance_ladder() {
  // Feature j has sample variance proportional to j + 1 (values +-k scaled).
  RealDataset data;
  data.x.resize(4, 6);
  for (Eigen::Index j = 0; j < 6; ++j) {
    const double scale = std::sqrt(double(j + 1));
    data.x.col(j) << scale, -scale, scale, -scale;
    data.feature_names.push_back("f" + std::to_string(j));
  }
  data.labels = {0, 0, 1, 1};
  return data;
}

}  // namespace

TEST_CASE("variance filter drops the tails") {
  const RealDataset data = variance_ladder();
  {
    const RealDataset kept = variance_quantile_filter(data, 0.0);
    CHECK(kept.p() == 6);
  }
  {
    // fraction 1/6 of six features trims exactly the min and max variance.
    const RealDataset kept = variance_quantile_filter(data, 1.0 / 6.0);
    REQUIRE(kept.p() == 4);
    CHECK(kept.feature_names ==
          std::vector<std::string>{"f1", "f2", "f3", "f4"});
  }
  CHECK_THROWS_AS(variance_quantile_filter(data, 0.5), InvalidInput);
}

TEST_CASE("variance filter count matches a sort-based oracle") {
  Rng rng(33);
  RealDataset data;
  const int p = 600;
  data.x.resize(30, p);
  for (Eigen::Index i = 0; i < 30; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      data.x(i, j) = rng.normal() * (1.0 + rng.uniform());
    }
  }
  data.labels.assign(30, 0);
  for (int i = 0; i < 15; ++i) data.labels[i] = 1;

  const double fraction = 1.0 / 6.0;
  const RealDataset kept = variance_quantile_filter(data, fraction);
  const int tails = static_cast<int>(fraction * p);
  CHECK(kept.p() == p - 2 * tails);

  // No kept variance lies strictly outside the kept range of the oracle.
  std::vector<double> variances;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean = data.x.col(j).mean();
    variances.push_back((data.x.col(j).array() - mean).square().sum() / 29.0);
  }
  std::vector<double> sorted = variances;
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted[tails], hi = sorted[p - tails - 1];
  for (Eigen::Index j = 0; j < kept.p(); ++j) {
    const double mean = kept.x.col(j).mean();
    const double variance =
        (kept.x.col(j).array() - mean).square().sum() / 29.0;
    CHECK(variance >= lo - 1e-12);
    CHECK(variance <= hi + 1e-12);
  }
}

TEST_CASE("t-test screening ranks a planted feature first") {
  Rng rng(2);
  RealDataset data;
  data.x.resize(40, 25);
  for (Eigen::Index i = 0; i < 40; ++i) {
    const int label = i < 20 ? 0 : 1;
    data.labels.push_back(label);
    for (Eigen::Index j = 0; j < 25; ++j) {
      data.x(i, j) = rng.normal() + (j == 7 && label == 1 ? 4.0 : 0.0);
    }
  }
  const auto ranked = t_test_select(data, 5);
  CHECK(ranked.front() == 7);

  // m = p returns every feature (as a set).
  const auto all = t_test_select(data, 25);
  CHECK(std::set<Eigen::Index>(all.begin(), all.end()).size() == 25);
}

TEST_CASE("degenerate t statistics count as zero evidence") {
  RealDataset data;
  data.x.resize(6, 3);
  // Feature 0: constant and equal in both classes (0/0 -> 0).
  // Feature 1: mild noise. Feature 2: strong separation.
  data.x << 1, 0.1, -1, /**/ 1, -0.2, -1.2, /**/ 1, 0.05, -0.9,
      /**/ 1, -0.1, 1.1, /**/ 1, 0.15, 0.9, /**/ 1, 0.0, 1.0;
  data.labels = {0, 0, 0, 1, 1, 1};
  const auto ranked = t_test_select(data, 3);
  CHECK(ranked.front() == 2);
  CHECK(ranked.back() == 0);
}

TEST_CASE("stratified split honors exact counts and reproduces by seed") {
  Rng rng(6);
  RealDataset data;
  data.x.resize(72, 3);
  for (Eigen::Index i = 0; i < 72; ++i) {
    data.labels.push_back(i < 47 ? 0 : 1);
    for (Eigen::Index j = 0; j < 3; ++j) data.x(i, j) = rng.normal();
  }

  const SplitCounts counts{29, 15, 9, 5, 9, 5};
  const SplitResult split = stratified_split(data, counts, 99);
  CHECK(split.train.n() == 44);
  CHECK(split.val.n() == 14);
  CHECK(split.test.n() == 14);
  CHECK(split.train.count_label(0) == 29);
  CHECK(split.train.count_label(1) == 15);
  CHECK(split.val.count_label(0) == 9);
  CHECK(split.test.count_label(1) == 5);

  const SplitResult again = stratified_split(data, counts, 99);
  CHECK(again.train_rows == split.train_rows);
  CHECK(again.val_rows == split.val_rows);
  CHECK(again.test_rows == split.test_rows);

  // Disjoint and inside range.
  std::set<Eigen::Index> seen;
  for (const auto* rows : {&split.train_rows, &split.val_rows,
                           &split.test_rows}) {
    for (Eigen::Index row : *rows) {
      CHECK(row >= 0);
      CHECK(row < 72);
      CHECK(seen.insert(row).second);  // no overlap
    }
  }
  CHECK(seen.size() == 72u);  // counts cover the whole dataset here

  SplitCounts toobig = counts;
  toobig.train0 = 40;
  CHECK_THROWS_WITH_AS(stratified_split(data, toobig, 1),
                       doctest::Contains("class 0"), InvalidInput);
}
