// Copyright 2026 The ibsplit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ibsplit/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "ibsplit/common/error.hpp"
#include "ibsplit/data/csv.hpp"

namespace ibsplit::data {

namespace {

constexpr double kStdFloor = 1e-8;

// Type-7 (linear interpolation) empirical quantile of sorted values.
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - std::floor(h);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct RunSpan {
  int run_id = 0;
  std::size_t first_row = 0;  // inclusive, global row index
  std::size_t n_rows = 0;

  std::size_t n_windows(std::size_t t_len) const {
    return n_rows >= t_len ? n_rows - t_len + 1 : 0;
  }
};

std::vector<RunSpan> run_spans(const std::vector<int>& run_ids) {
  std::vector<RunSpan> spans;
  for (std::size_t i = 0; i < run_ids.size(); ++i) {
    if (spans.empty() || spans.back().run_id != run_ids[i]) {
      spans.push_back({run_ids[i], i, 1});
    } else {
      ++spans.back().n_rows;
    }
  }
  return spans;
}

// Allocates round(fraction * total_windows) test windows across runs:
// floor(fraction * n_w) each, remainders to the largest fractional parts
// (ties: earlier run first). Deterministic regardless of seed.
std::vector<std::size_t> allocate_test_windows(
    const std::vector<std::size_t>& windows_per_run, double fraction) {
  const std::size_t total =
      std::accumulate(windows_per_run.begin(), windows_per_run.end(),
                      std::size_t{0});
  auto target = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(total)));
  target = std::min(target, total);

  std::vector<std::size_t> alloc(windows_per_run.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t r = 0; r < windows_per_run.size(); ++r) {
    const double share = fraction * static_cast<double>(windows_per_run[r]);
    alloc[r] = std::min(static_cast<std::size_t>(std::floor(share)),
                        windows_per_run[r]);
    assigned += alloc[r];
    remainders.emplace_back(share - std::floor(share), r);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [rem, r] : remainders) {
    (void)rem;
    if (assigned >= target) break;
    if (alloc[r] < windows_per_run[r]) {
      ++alloc[r];
      ++assigned;
    }
  }
  return alloc;
}

}  // namespace

Eigen::MatrixXd NormStats::apply(const Eigen::MatrixXd& rows) const {
  if (rows.cols() != mean.size()) {
    throw DataError("normalization expects " + std::to_string(mean.size()) +
                    " features, got " + std::to_string(rows.cols()));
  }
  Eigen::MatrixXd out = rows.rowwise() - mean.transpose();
  out.array().rowwise() /= std_dev.transpose().array();
  return out;
}

NormStats compute_norm_stats(const Eigen::MatrixXd& rows) {
  if (rows.rows() < 1) throw DataError("normalization needs at least one row");
  NormStats stats;
  stats.mean = rows.colwise().mean();
  const auto n = static_cast<double>(rows.rows());
  Eigen::VectorXd var =
      (rows.rowwise() - stats.mean.transpose()).array().square().colwise().sum() /
      std::max(n - 1.0, 1.0);
  stats.std_dev = var.array().sqrt().max(kStdFloor);
  return stats;
}

QuantileBinner QuantileBinner::fit(const std::vector<double>& values,
                                   std::size_t k) {
  if (k < 2) {
    throw ConfigError("quantile binner needs K >= 2, got " +
                      std::to_string(k));
  }
  if (values.empty()) {
    throw DataError("quantile binner fitted on an empty value list");
  }
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  QuantileBinner binner;
  binner.edges_.reserve(k - 1);
  for (std::size_t i = 1; i < k; ++i) {
    binner.edges_.push_back(
        quantile_sorted(sorted, static_cast<double>(i) / static_cast<double>(k)));
  }
  return binner;
}

QuantileBinner QuantileBinner::from_edges(std::vector<double> edges) {
  if (!std::is_sorted(edges.begin(), edges.end())) {
    throw ConfigError("quantile binner edges must be nondecreasing");
  }
  QuantileBinner binner;
  binner.edges_ = std::move(edges);
  return binner;
}

int QuantileBinner::bin(double v) const {
  // Ties to lower: count edges strictly below v.
  const auto it = std::lower_bound(edges_.begin(), edges_.end(), v);
  return static_cast<int>(it - edges_.begin());
}

std::vector<int> quantize_throughput(const std::vector<double>& values,
                                     std::size_t k) {
  const QuantileBinner binner = QuantileBinner::fit(values, k);
  std::vector<int> labels(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    labels[i] = binner.bin(values[i]);
  }
  return labels;
}

RowBlock extract_rows(const CsvTable& table, const DatasetSchema& schema) {
  if (schema.feature_columns.empty()) {
    throw ConfigError("schema lists no feature columns");
  }
  std::vector<std::size_t> feature_idx;
  feature_idx.reserve(schema.feature_columns.size());
  for (const auto& name : schema.feature_columns) {
    feature_idx.push_back(table.col_index(name));
  }
  const std::size_t target_idx = table.col_index(schema.target_column);

  RowBlock block;
  block.feature_names = schema.feature_columns;
  const std::size_t n = table.n_rows();
  block.features.resize(static_cast<Eigen::Index>(n),
                        static_cast<Eigen::Index>(feature_idx.size()));
  block.target.resize(n);
  block.run_ids.resize(n);

  std::map<std::string, int> run_keys;
  const std::size_t run_idx =
      schema.run_column.empty() ? 0 : table.col_index(schema.run_column);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < feature_idx.size(); ++j) {
      block.features(static_cast<Eigen::Index>(i),
                     static_cast<Eigen::Index>(j)) =
          table.numeric(i, feature_idx[j]);
    }
    block.target[i] = table.numeric(i, target_idx);
    if (schema.run_column.empty()) {
      block.run_ids[i] = 0;
    } else {
      const std::string& key = table.cell(i, run_idx);
      block.run_ids[i] = run_keys.emplace(key, static_cast<int>(run_keys.size()))
                             .first->second;
    }
  }
  return block;
}

std::vector<SequenceWindow> windows_from_rows(const RowBlock& rows,
                                              const DatasetSchema& schema) {
  if (schema.t_len < 1) throw ConfigError("window length must be >= 1");
  const Eigen::MatrixXd normalized = schema.stats.apply(rows.features);

  std::vector<SequenceWindow> windows;
  for (const RunSpan& span : run_spans(rows.run_ids)) {
    for (std::size_t w = 0; w < span.n_windows(schema.t_len); ++w) {
      SequenceWindow win;
      win.run_id = span.run_id;
      win.start_row = w;
      win.inputs = normalized.middleRows(
          static_cast<Eigen::Index>(span.first_row + w),
          static_cast<Eigen::Index>(schema.t_len));
      win.targets.resize(schema.t_len);
      for (std::size_t t = 0; t < schema.t_len; ++t) {
        win.targets[t] = schema.binner.bin(rows.target[span.first_row + w + t]);
      }
      windows.push_back(std::move(win));
    }
  }
  return windows;
}

std::vector<SequenceWindow> load_csv(const std::filesystem::path& path,
                                     const DatasetSchema& schema) {
  return windows_from_rows(extract_rows(read_csv(path), schema), schema);
}

SplitDataset build_split_dataset(const RowBlock& rows, DatasetSchema schema,
                                 const SplitConfig& cfg) {
  if (cfg.test_fraction <= 0.0 || cfg.test_fraction >= 1.0) {
    throw ConfigError("test_fraction must be in (0,1), got " +
                      std::to_string(cfg.test_fraction));
  }
  const std::size_t t_len = schema.t_len;
  const std::vector<RunSpan> spans = run_spans(rows.run_ids);
  std::vector<std::size_t> windows_per_run;
  windows_per_run.reserve(spans.size());
  for (const auto& span : spans) {
    windows_per_run.push_back(span.n_windows(t_len));
  }
  const std::vector<std::size_t> test_alloc =
      allocate_test_windows(windows_per_run, cfg.test_fraction);

  // Training source rows: everything strictly before each run's first test
  // window row (the whole run when it has no test windows).
  std::vector<Eigen::Index> train_rows;
  for (std::size_t r = 0; r < spans.size(); ++r) {
    const std::size_t first_test_start = windows_per_run[r] - test_alloc[r];
    const std::size_t row_end =
        test_alloc[r] > 0 ? first_test_start : spans[r].n_rows;
    for (std::size_t i = 0; i < row_end; ++i) {
      train_rows.push_back(
          static_cast<Eigen::Index>(spans[r].first_row + i));
    }
  }
  if (train_rows.empty()) {
    throw DataError("split leaves no training rows");
  }
  Eigen::MatrixXd train_features(static_cast<Eigen::Index>(train_rows.size()),
                                 rows.features.cols());
  std::vector<double> train_target(train_rows.size());
  for (std::size_t i = 0; i < train_rows.size(); ++i) {
    train_features.row(static_cast<Eigen::Index>(i)) =
        rows.features.row(train_rows[i]);
    train_target[i] = rows.target[static_cast<std::size_t>(train_rows[i])];
  }
  schema.stats = compute_norm_stats(train_features);
  schema.binner = QuantileBinner::fit(train_target, schema.n_classes);

  const Eigen::MatrixXd normalized = schema.stats.apply(rows.features);

  SplitDataset out;
  out.train.t_len = out.test.t_len = t_len;
  out.train.n_features = out.test.n_features =
      static_cast<std::size_t>(rows.features.cols());
  out.train.n_classes = out.test.n_classes = schema.n_classes;

  for (std::size_t r = 0; r < spans.size(); ++r) {
    const RunSpan& span = spans[r];
    const std::size_t n_w = windows_per_run[r];
    if (n_w == 0) continue;
    const std::size_t first_test_start = n_w - test_alloc[r];
    for (std::size_t w = 0; w < n_w; ++w) {
      const bool is_test = w >= first_test_start;
      // Embargo: drop train windows whose rows would reach into test rows.
      if (!is_test && test_alloc[r] > 0 && w + t_len > first_test_start) {
        continue;
      }
      SequenceWindow win;
      win.run_id = span.run_id;
      win.start_row = w;
      win.inputs =
          normalized.middleRows(static_cast<Eigen::Index>(span.first_row + w),
                                static_cast<Eigen::Index>(t_len));
      win.targets.resize(t_len);
      for (std::size_t t = 0; t < t_len; ++t) {
        win.targets[t] = schema.binner.bin(rows.target[span.first_row + w + t]);
      }
      (is_test ? out.test : out.train).windows.push_back(std::move(win));
    }
  }
  out.schema = std::move(schema);
  return out;
}

SplitDataset load_split_csv(const std::filesystem::path& path,
                            DatasetSchema schema, const SplitConfig& cfg) {
  // Sequence the extraction before the move: both arguments name `schema`,
  // and argument evaluation order is unspecified.
  RowBlock rows = extract_rows(read_csv(path), schema);
  return build_split_dataset(std::move(rows), std::move(schema), cfg);
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double test_fraction,
                                  std::uint64_t seed) {
  (void)seed;  // split is contiguous and deterministic; seed is echoed only
  if (test_fraction <= 0.0 || test_fraction >= 1.0) {
    throw ConfigError("test_fraction must be in (0,1), got " +
                      std::to_string(test_fraction));
  }

  // Group windows by run preserving order.
  std::vector<int> run_order;
  std::map<int, std::vector<std::size_t>> by_run;
  for (std::size_t i = 0; i < dataset.windows.size(); ++i) {
    const int run = dataset.windows[i].run_id;
    if (by_run.find(run) == by_run.end()) run_order.push_back(run);
    by_run[run].push_back(i);
  }
  std::vector<std::size_t> windows_per_run;
  for (int run : run_order) windows_per_run.push_back(by_run[run].size());
  const std::vector<std::size_t> alloc =
      allocate_test_windows(windows_per_run, test_fraction);

  Dataset train, test;
  train.t_len = test.t_len = dataset.t_len;
  train.n_features = test.n_features = dataset.n_features;
  train.n_classes = test.n_classes = dataset.n_classes;
  for (std::size_t r = 0; r < run_order.size(); ++r) {
    const auto& idx = by_run[run_order[r]];
    const std::size_t first_test = idx.size() - alloc[r];
    const std::size_t first_test_start =
        alloc[r] > 0 ? dataset.windows[idx[first_test]].start_row : 0;
    for (std::size_t w = 0; w < idx.size(); ++w) {
      const SequenceWindow& win = dataset.windows[idx[w]];
      if (w >= first_test) {
        test.windows.push_back(win);
      } else if (alloc[r] == 0 ||
                 win.start_row + dataset.t_len <= first_test_start) {
        train.windows.push_back(win);
      }
    }
  }
  return {std::move(train), std::move(test)};
}

nn::Batch make_batch(const Dataset& dataset,
                     const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw DataError("make_batch with no windows");
  const std::size_t n = indices.size();
  const std::size_t t_len = dataset.t_len;
  const std::size_t d = dataset.n_features;

  nn::Batch batch;
  batch.x = nn::BatchSeq(n, t_len, d);
  batch.y.resize(t_len * n);
  for (std::size_t i = 0; i < n; ++i) {
    const SequenceWindow& win = dataset.windows[indices[i]];
    if (static_cast<std::size_t>(win.inputs.rows()) != t_len ||
        static_cast<std::size_t>(win.inputs.cols()) != d) {
      throw ShapeError("window shape mismatch in make_batch");
    }
    for (std::size_t t = 0; t < t_len; ++t) {
      batch.x.values.row(static_cast<Eigen::Index>(t * n + i)) =
          win.inputs.row(static_cast<Eigen::Index>(t));
      batch.y[t * n + i] = win.targets[t];
    }
  }
  return batch;
}

}  // namespace ibsplit::data
