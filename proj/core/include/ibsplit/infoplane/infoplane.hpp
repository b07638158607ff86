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

#ifndef IBSPLIT_INFOPLANE_INFOPLANE_HPP_
#define IBSPLIT_INFOPLANE_INFOPLANE_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ibsplit/mi/estimate.hpp"
#include "ibsplit/nn/network.hpp"

namespace ibsplit::infoplane {

/// One information-plane point: the layer's representation at one training
/// epoch, placed at (I(X;H), I(Y;H)) in bits.
struct InfoPlanePoint {
  int phase = 1;
  std::size_t epoch = 0;
  std::size_t layer = 1;
  double i_xh_bits = 0.0;
  double i_yh_bits = 0.0;
};

bool operator==(const InfoPlanePoint& a, const InfoPlanePoint& b);

inline constexpr const char* kKindPlane = "plane";
inline constexpr const char* kKindTemporalInfo = "i_ht_y";
inline constexpr const char* kKindCompression = "i_x_h_prefix";

/// One cell of a temporal information surface (epoch x timestep).
/// kind is kKindTemporalInfo for I(H_t;y_tau) or kKindCompression for
/// I(X_{1..t}; H_{1..t}).
struct TemporalCurvePoint {
  std::string kind;
  int phase = 1;
  std::size_t epoch = 0;
  std::size_t layer = 1;
  std::size_t t = 1;  // 1-based timestep
  double value_bits = 0.0;
};

bool operator==(const TemporalCurvePoint& a, const TemporalCurvePoint& b);

/// Conditional-MI redundancy analysis across trailing hidden states:
/// conditional_bits[k-1] = I(X; H_T | H_{T-1},...,H_{T-k}) for k = 1..k_max.
/// k_star is the smallest k whose value falls below threshold_bits (k_max if
/// none does); the plane keeps the last k_star+1 temporal states.
struct RedundancyReport {
  std::vector<double> conditional_bits;
  std::size_t k_star = 1;
  double threshold_bits = 3.0;
  std::vector<std::string> flags;

  nlohmann::json to_json() const;
};

struct PlaneConfig {
  std::size_t tau = 5;           // label timestep for I(Y;H)
  double threshold_bits = 3.0;   // redundancy truncation threshold
  std::size_t k_max = 6;
  std::size_t k_star = 0;        // 0 -> derive from redundancy_truncation
  double max_dim_fraction = 0.1; // project representations wider than n*frac
};

struct PlaneResult {
  std::vector<InfoPlanePoint> points;
  std::size_t k_star = 1;
  std::vector<std::string> flags;
};

struct CurveConfig {
  int phase = 1;                 // which training phase's records to use
  std::size_t layer = 1;         // 1-based encoder layer
  std::size_t tau = 5;           // label timestep (kKindTemporalInfo only)
  double max_dim_fraction = 0.1;
};

struct CurveResult {
  std::vector<TemporalCurvePoint> points;
  std::vector<std::string> flags;
};

/// Flattens a probe batch's inputs into one row per sample with t-major
/// columns: row i, column t*d + f = feature f at timestep t+1.
mi::SampleMatrix flatten_windows(const nn::BatchSeq& x);

/// Variance-ranked linear projection guard: when `data` has more than
/// max_dim columns, projects onto the top-variance principal directions
/// (at most max_dim, fewer if the data has lower rank) and sets *projected.
/// Otherwise returns the input unchanged.
mi::SampleMatrix project_if_needed(const mi::SampleMatrix& data,
                                   std::size_t max_dim, bool* projected);

/// Eq. (3) redundancy analysis on one recorded layer. X, the final state and
/// each conditioning state are independently passed through the projection
/// guard so the Gaussian-copula estimate stays sample-supported.
RedundancyReport redundancy_truncation(const nn::LayerActivations& record,
                                       const mi::SampleMatrix& x_flat,
                                       double threshold_bits = 3.0,
                                       std::size_t k_max = 6,
                                       double max_dim_fraction = 0.1);

/// Convenience overload: runs on the highest-epoch layer-1 record of the
/// latest phase present in `records`.
RedundancyReport redundancy_truncation(
    const std::vector<nn::LayerActivations>& records,
    const mi::SampleMatrix& x_flat, double threshold_bits = 3.0,
    std::size_t k_max = 6, double max_dim_fraction = 0.1);

/// Information plane over every record: i_xh via gcmi(X_flat, H_repr) and
/// i_yh via kde_mi_label(y_tau, H_repr), where H_repr is the concatenation
/// of the last k_star+1 temporal states (projection guard applied).
/// `y_rows` are per-timestep labels in time-major order (index t*n + i).
PlaneResult compute_plane(const std::vector<nn::LayerActivations>& records,
                          const mi::SampleMatrix& x_flat,
                          const std::vector<int>& y_rows,
                          const PlaneConfig& cfg = {});

/// I(H_t; y_tau) surface over (epoch, t) for one layer/phase (Fig. 5 shape).
CurveResult temporal_info_curve(
    const std::vector<nn::LayerActivations>& records,
    const std::vector<int>& y_rows, const CurveConfig& cfg = {});

/// I(X_{1..t}; H_{1..t}) surface over (epoch, t) for one layer/phase
/// (Fig. 6 shape). Both prefixes pass through the projection guard.
CurveResult temporal_compression_curve(
    const std::vector<nn::LayerActivations>& records,
    const mi::SampleMatrix& x_flat, std::size_t n_features,
    const CurveConfig& cfg = {});

enum class CurveFormat { kCsv, kJson };

struct CurveSet {
  std::vector<InfoPlanePoint> plane;
  std::vector<TemporalCurvePoint> curves;
};

bool operator==(const CurveSet& a, const CurveSet& b);

/// Writes plane points and curve points to one file. CSV columns:
/// kind,phase,epoch,layer,t,i_xh_bits,i_yh_bits,value_bits with empty cells
/// where a field does not apply. Values round-trip losslessly.
void export_curves(const CurveSet& set, const std::filesystem::path& path,
                   CurveFormat format = CurveFormat::kCsv);

CurveSet read_curves(const std::filesystem::path& path,
                     CurveFormat format = CurveFormat::kCsv);

/// Activation records plus the probe batch they were measured on, as written
/// by `train` and consumed by `analyze`. States are stored as float32 on
/// disk; probe inputs stay float64.
struct ActivationsFile {
  std::vector<nn::LayerActivations> records;
  nn::Batch probe;
  std::vector<std::size_t> probe_indices;
};

void save_activations(const ActivationsFile& file,
                      const std::filesystem::path& path);

ActivationsFile load_activations(const std::filesystem::path& path);

}  // namespace ibsplit::infoplane

#endif  // IBSPLIT_INFOPLANE_INFOPLANE_HPP_
