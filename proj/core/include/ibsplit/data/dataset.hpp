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

#ifndef IBSPLIT_DATA_DATASET_HPP_
#define IBSPLIT_DATA_DATASET_HPP_

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ibsplit/nn/network.hpp"

namespace ibsplit::data {

/// One training example: T input rows and T per-timestep class labels, with
/// provenance (run id and first source row within the run) used to prove
/// train/test disjointness.
struct SequenceWindow {
  Eigen::MatrixXd inputs;    // t_len x d
  std::vector<int> targets;  // t_len labels in 0..K-1
  int run_id = 0;
  std::size_t start_row = 0;
};

struct Dataset {
  std::vector<SequenceWindow> windows;
  std::size_t t_len = 0;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;

  std::size_t size() const { return windows.size(); }
};

/// Per-feature z-score statistics; std is floored at 1e-8 so constant
/// columns normalize to all zeros.
struct NormStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_dev;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const;
};

NormStats compute_norm_stats(const Eigen::MatrixXd& rows);

/// Quantile-based K-bin quantizer with ties-to-lower: a value exactly on an
/// edge falls into the lower bin. Edges are type-7 (linear interpolation)
/// empirical quantiles of the fitted values.
class QuantileBinner {
 public:
  QuantileBinner() = default;

  static QuantileBinner fit(const std::vector<double>& values, std::size_t k);

  int bin(double v) const;
  std::size_t k() const { return edges_.size() + 1; }
  const std::vector<double>& edges() const { return edges_; }

  static QuantileBinner from_edges(std::vector<double> edges);

 private:
  std::vector<double> edges_;  // k-1 inner edges, nondecreasing
};

/// Convenience: fit a K-bin quantile binner on `values` and label them.
std::vector<int> quantize_throughput(const std::vector<double>& values,
                                     std::size_t k);

/// Column layout plus train-derived statistics. `run_column` may be empty
/// (whole file is one run). The stats/binner must come from training rows
/// only; the loader below enforces this.
struct DatasetSchema {
  std::vector<std::string> feature_columns;
  std::string target_column;
  std::string run_column;
  std::size_t t_len = 20;
  std::size_t n_classes = 8;
  NormStats stats;
  QuantileBinner binner;
};

struct CsvTable;  // csv.hpp

/// Raw per-row view of a parsed table under a schema, before windowing.
struct RowBlock {
  Eigen::MatrixXd features;       // n_rows x d, unnormalized
  std::vector<double> target;     // n_rows continuous values
  std::vector<int> run_ids;       // n_rows
  std::vector<std::string> feature_names;
};

RowBlock extract_rows(const CsvTable& table, const DatasetSchema& schema);

/// Sliding windows (stride 1) within each run over normalized features and
/// binned labels; schema stats/binner are applied as-is.
std::vector<SequenceWindow> windows_from_rows(const RowBlock& rows,
                                              const DatasetSchema& schema);

/// Spec-level loader: parse CSV, normalize and label with the statistics
/// already in `schema`, window within runs.
std::vector<SequenceWindow> load_csv(const std::filesystem::path& path,
                                     const DatasetSchema& schema);

struct SplitConfig {
  double test_fraction = 0.1;
  std::uint64_t seed = 0;  // echoed for reproducibility; split is contiguous
};

/// Train/test split result with the schema whose statistics were fitted on
/// the training rows only.
struct SplitDataset {
  Dataset train;
  Dataset test;
  DatasetSchema schema;
};

/// Full leakage-free ingestion: per run, the final ~test_fraction of windows
/// become the test set, windows straddling the boundary are embargoed, and
/// normalization/binning statistics are fitted on training source rows only.
SplitDataset build_split_dataset(const RowBlock& rows, DatasetSchema schema,
                                 const SplitConfig& cfg);

SplitDataset load_split_csv(const std::filesystem::path& path,
                            DatasetSchema schema, const SplitConfig& cfg);

/// Contiguous-in-time split of an already-built window list: per run, the
/// final segment is the test set and train windows whose source rows overlap
/// any test window's rows are dropped (embargo).
std::pair<Dataset, Dataset> split(const Dataset& dataset, double test_fraction,
                                  std::uint64_t seed);

/// Packs the selected windows into a time-major batch (row t*n+i).
nn::Batch make_batch(const Dataset& dataset,
                     const std::vector<std::size_t>& indices);

}  // namespace ibsplit::data

#endif  // IBSPLIT_DATA_DATASET_HPP_
