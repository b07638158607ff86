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

#include "ibsplit/infoplane/infoplane.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <utility>

#include <Eigen/Eigenvalues>

#include "ibsplit/common/error.hpp"
#include "ibsplit/data/csv.hpp"
#include "ibsplit/mi/gcmi.hpp"
#include "ibsplit/mi/kde.hpp"

namespace ibsplit::infoplane {

namespace {

void add_flag(std::vector<std::string>& flags, const std::string& flag) {
  if (std::find(flags.begin(), flags.end(), flag) == flags.end()) {
    flags.push_back(flag);
  }
}

void merge_flags(std::vector<std::string>& flags,
                 const std::vector<std::string>& extra) {
  for (const auto& f : extra) add_flag(flags, f);
}

std::size_t guard_dim(std::size_t n, double fraction) {
  const auto dim = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * fraction));
  return std::max<std::size_t>(1, dim);
}

bool is_constant(const mi::SampleMatrix& data) {
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    if (data.col(c).maxCoeff() != data.col(c).minCoeff()) return false;
  }
  return true;
}

void require_samples(std::size_t n, std::size_t total_dim,
                     const char* what) {
  // gaussian_entropy_nats needs n > d on the joint; keep one extra sample of
  // headroom for the mean removal.
  const std::size_t required = total_dim + 2;
  if (n < required) {
    throw DataError(std::string(what) + " needs at least " +
                    std::to_string(required) + " probe samples for " +
                    std::to_string(total_dim) + " joint dimensions, got " +
                    std::to_string(n));
  }
}

std::vector<int> labels_at(const std::vector<int>& y_rows, std::size_t n,
                           std::size_t t_len, std::size_t tau) {
  if (tau < 1 || tau > t_len) {
    throw ConfigError("tau must be in 1..T (T=" + std::to_string(t_len) +
                      "), got " + std::to_string(tau));
  }
  if (y_rows.size() != n * t_len) {
    throw ShapeError("label rows have size " + std::to_string(y_rows.size()) +
                     ", expected t_len*n = " + std::to_string(n * t_len));
  }
  const std::size_t base = (tau - 1) * n;
  return std::vector<int>(y_rows.begin() + static_cast<long>(base),
                          y_rows.begin() + static_cast<long>(base + n));
}

// Picks the record with the largest (phase, epoch) for the given layer.
const nn::LayerActivations* reference_record(
    const std::vector<nn::LayerActivations>& records, std::size_t layer) {
  const nn::LayerActivations* best = nullptr;
  for (const auto& r : records) {
    if (r.layer != layer) continue;
    if (!best || r.phase > best->phase ||
        (r.phase == best->phase && r.epoch > best->epoch)) {
      best = &r;
    }
  }
  return best;
}

}  // namespace

bool operator==(const InfoPlanePoint& a, const InfoPlanePoint& b) {
  return a.phase == b.phase && a.epoch == b.epoch && a.layer == b.layer &&
         a.i_xh_bits == b.i_xh_bits && a.i_yh_bits == b.i_yh_bits;
}

bool operator==(const TemporalCurvePoint& a, const TemporalCurvePoint& b) {
  return a.kind == b.kind && a.phase == b.phase && a.epoch == b.epoch &&
         a.layer == b.layer && a.t == b.t && a.value_bits == b.value_bits;
}

bool operator==(const CurveSet& a, const CurveSet& b) {
  return a.plane == b.plane && a.curves == b.curves;
}

nlohmann::json RedundancyReport::to_json() const {
  nlohmann::json j;
  j["conditional_bits"] = conditional_bits;
  j["k_star"] = k_star;
  j["threshold_bits"] = threshold_bits;
  j["flags"] = flags;
  return j;
}

mi::SampleMatrix flatten_windows(const nn::BatchSeq& x) {
  const std::size_t n = x.n;
  const std::size_t d = x.dim();
  mi::SampleMatrix flat(static_cast<Eigen::Index>(n),
                        static_cast<Eigen::Index>(x.t_len * d));
  for (std::size_t t = 0; t < x.t_len; ++t) {
    flat.block(0, static_cast<Eigen::Index>(t * d),
               static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d)) =
        x.values.block(static_cast<Eigen::Index>(t * n), 0,
                       static_cast<Eigen::Index>(n),
                       static_cast<Eigen::Index>(d));
  }
  return flat;
}

mi::SampleMatrix project_if_needed(const mi::SampleMatrix& data,
                                   std::size_t max_dim, bool* projected) {
  if (projected) *projected = false;
  if (static_cast<std::size_t>(data.cols()) <= max_dim) return data;
  if (data.rows() < 2) {
    throw DataError("projection guard needs at least 2 samples");
  }
  if (projected) *projected = true;

  const Eigen::Index n = data.rows();
  const mi::SampleMatrix centered = data.rowwise() - data.colwise().mean();

  // Gram trick: the top principal scores of an n x d matrix with d >> n are
  // U_m * sqrt(lambda_m) from the n x n Gram eigendecomposition.
  const Eigen::MatrixXd gram = centered * centered.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) {
    throw NumericError("projection guard eigendecomposition failed");
  }
  const Eigen::VectorXd& evals = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd& evecs = solver.eigenvectors();

  const double floor_eval =
      std::max(evals.maxCoeff(), 0.0) * 1e-12 +
      std::numeric_limits<double>::min();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = n - 1; i >= 0 && keep.size() < max_dim; --i) {
    if (evals(i) > floor_eval) keep.push_back(i);
  }
  if (keep.empty()) {
    // Constant data: a single zero column keeps downstream shapes valid;
    // callers special-case constant representations before estimating.
    return mi::SampleMatrix::Zero(n, 1);
  }

  mi::SampleMatrix scores(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    scores.col(static_cast<Eigen::Index>(j)) =
        evecs.col(keep[j]) * std::sqrt(evals(keep[j]));
  }
  return scores;
}

RedundancyReport redundancy_truncation(const nn::LayerActivations& record,
                                       const mi::SampleMatrix& x_flat,
                                       double threshold_bits,
                                       std::size_t k_max,
                                       double max_dim_fraction) {
  if (k_max < 1) throw ConfigError("k_max must be >= 1");
  if (record.t_len < 2) {
    throw DataError("redundancy analysis needs at least 2 timesteps");
  }
  if (static_cast<std::size_t>(x_flat.rows()) != record.n) {
    throw ShapeError("x has " + std::to_string(x_flat.rows()) +
                     " rows, record has " + std::to_string(record.n));
  }
  RedundancyReport report;
  report.threshold_bits = threshold_bits;

  const std::size_t n = record.n;
  const std::size_t max_dim = guard_dim(n, max_dim_fraction);
  const std::size_t t_last = record.t_len - 1;
  const std::size_t k_cap = std::min(k_max, t_last);

  bool projected = false;
  const mi::SampleMatrix x = project_if_needed(x_flat, max_dim, &projected);
  if (projected) add_flag(report.flags, "x_projected");
  const mi::SampleMatrix h_final =
      project_if_needed(record.timestep(t_last), max_dim, &projected);
  if (projected) add_flag(report.flags, "h_projected");

  // Each earlier state is projected once; conditioning sets are nested
  // concatenations of these fixed per-state projections.
  std::vector<mi::SampleMatrix> state_proj;
  for (std::size_t k = 1; k <= k_cap; ++k) {
    state_proj.push_back(
        project_if_needed(record.timestep(t_last - k), max_dim, &projected));
    if (projected) add_flag(report.flags, "conditioning_projected");
  }

  std::size_t z_cols = 0;
  for (const auto& s : state_proj) {
    z_cols += static_cast<std::size_t>(s.cols());
  }
  require_samples(n,
                  static_cast<std::size_t>(x.cols() + h_final.cols()) + z_cols,
                  "redundancy analysis");

  mi::SampleMatrix z(static_cast<Eigen::Index>(n), 0);
  for (std::size_t k = 1; k <= k_cap; ++k) {
    const mi::SampleMatrix& s = state_proj[k - 1];
    mi::SampleMatrix grown(static_cast<Eigen::Index>(n), z.cols() + s.cols());
    grown << z, s;
    z = std::move(grown);
    const mi::MIEstimate est = mi::conditional_gcmi(x, h_final, z);
    merge_flags(report.flags, est.flags);
    report.conditional_bits.push_back(est.bits);
  }
  // If k_max exceeds the available history, repeat the last value so the
  // sequence always has k_max entries.
  while (report.conditional_bits.size() < k_max) {
    report.conditional_bits.push_back(report.conditional_bits.back());
  }

  report.k_star = k_max;
  for (std::size_t k = 1; k <= k_max; ++k) {
    if (report.conditional_bits[k - 1] < threshold_bits) {
      report.k_star = k;
      break;
    }
  }
  return report;
}

RedundancyReport redundancy_truncation(
    const std::vector<nn::LayerActivations>& records,
    const mi::SampleMatrix& x_flat, double threshold_bits, std::size_t k_max,
    double max_dim_fraction) {
  const nn::LayerActivations* ref = reference_record(records, 1);
  if (!ref) throw DataError("no layer-1 activation records available");
  return redundancy_truncation(*ref, x_flat, threshold_bits, k_max,
                               max_dim_fraction);
}

PlaneResult compute_plane(const std::vector<nn::LayerActivations>& records,
                          const mi::SampleMatrix& x_flat,
                          const std::vector<int>& y_rows,
                          const PlaneConfig& cfg) {
  if (records.empty()) throw DataError("no activation records to analyze");
  const std::size_t n = records.front().n;
  const std::size_t t_len = records.front().t_len;
  for (const auto& r : records) {
    if (r.n != n || r.t_len != t_len) {
      throw ShapeError("activation records disagree on probe size");
    }
  }
  if (static_cast<std::size_t>(x_flat.rows()) != n) {
    throw ShapeError("x has " + std::to_string(x_flat.rows()) +
                     " rows, records have " + std::to_string(n));
  }

  PlaneResult result;
  result.k_star = cfg.k_star;
  if (result.k_star == 0) {
    RedundancyReport red = redundancy_truncation(
        records, x_flat, cfg.threshold_bits, cfg.k_max, cfg.max_dim_fraction);
    result.k_star = red.k_star;
    merge_flags(result.flags, red.flags);
  }

  const std::vector<int> y_tau = labels_at(y_rows, n, t_len, cfg.tau);
  const std::size_t keep_states = std::min(result.k_star + 1, t_len);
  const std::size_t max_dim = guard_dim(n, cfg.max_dim_fraction);

  for (const auto& r : records) {
    InfoPlanePoint point;
    point.phase = r.phase;
    point.epoch = r.epoch;
    point.layer = r.layer;

    // Eq. (3) truncation: keep the last k_star+1 temporal states.
    const std::size_t first_t = r.t_len - keep_states;
    const mi::SampleMatrix h_repr = r.states.middleCols(
        static_cast<Eigen::Index>(first_t * r.cells),
        static_cast<Eigen::Index>(keep_states * r.cells));

    if (is_constant(h_repr)) {
      // A representation constant across samples carries no information.
      result.points.push_back(point);
      continue;
    }

    bool projected = false;
    const mi::SampleMatrix h =
        project_if_needed(h_repr, max_dim, &projected);
    if (projected) add_flag(result.flags, "h_projected");
    require_samples(n, static_cast<std::size_t>(x_flat.cols() + h.cols()),
                    "information plane");

    const mi::MIEstimate xh = mi::gcmi(x_flat, h);
    merge_flags(result.flags, xh.flags);
    point.i_xh_bits = xh.bits;

    const mi::MIEstimate yh = mi::kde_mi_label(y_tau, h);
    merge_flags(result.flags, yh.flags);
    point.i_yh_bits = yh.bits;

    result.points.push_back(point);
  }

  std::stable_sort(result.points.begin(), result.points.end(),
                   [](const InfoPlanePoint& a, const InfoPlanePoint& b) {
                     if (a.layer != b.layer) return a.layer < b.layer;
                     if (a.phase != b.phase) return a.phase < b.phase;
                     return a.epoch < b.epoch;
                   });
  return result;
}

CurveResult temporal_info_curve(
    const std::vector<nn::LayerActivations>& records,
    const std::vector<int>& y_rows, const CurveConfig& cfg) {
  CurveResult result;
  std::vector<const nn::LayerActivations*> selected;
  for (const auto& r : records) {
    if (r.phase == cfg.phase && r.layer == cfg.layer) selected.push_back(&r);
  }
  if (selected.empty()) {
    throw DataError("no activation records for phase " +
                    std::to_string(cfg.phase) + " layer " +
                    std::to_string(cfg.layer));
  }
  std::stable_sort(selected.begin(), selected.end(),
                   [](const nn::LayerActivations* a,
                      const nn::LayerActivations* b) {
                     return a->epoch < b->epoch;
                   });

  const std::size_t n = selected.front()->n;
  const std::size_t t_len = selected.front()->t_len;
  const std::vector<int> y_tau = labels_at(y_rows, n, t_len, cfg.tau);

  for (const nn::LayerActivations* r : selected) {
    for (std::size_t t = 1; t <= r->t_len; ++t) {
      TemporalCurvePoint point;
      point.kind = kKindTemporalInfo;
      point.phase = r->phase;
      point.epoch = r->epoch;
      point.layer = r->layer;
      point.t = t;
      const mi::SampleMatrix h_t = r->timestep(t - 1);
      if (is_constant(h_t)) {
        point.value_bits = 0.0;
      } else {
        const mi::MIEstimate est = mi::kde_mi_label(y_tau, h_t);
        merge_flags(result.flags, est.flags);
        point.value_bits = est.bits;
      }
      result.points.push_back(std::move(point));
    }
  }
  return result;
}

CurveResult temporal_compression_curve(
    const std::vector<nn::LayerActivations>& records,
    const mi::SampleMatrix& x_flat, std::size_t n_features,
    const CurveConfig& cfg) {
  CurveResult result;
  std::vector<const nn::LayerActivations*> selected;
  for (const auto& r : records) {
    if (r.phase == cfg.phase && r.layer == cfg.layer) selected.push_back(&r);
  }
  if (selected.empty()) {
    throw DataError("no activation records for phase " +
                    std::to_string(cfg.phase) + " layer " +
                    std::to_string(cfg.layer));
  }
  std::stable_sort(selected.begin(), selected.end(),
                   [](const nn::LayerActivations* a,
                      const nn::LayerActivations* b) {
                     return a->epoch < b->epoch;
                   });

  const std::size_t n = selected.front()->n;
  const std::size_t t_len = selected.front()->t_len;
  if (static_cast<std::size_t>(x_flat.cols()) != t_len * n_features) {
    throw ShapeError("x has " + std::to_string(x_flat.cols()) +
                     " columns, expected t_len*d = " +
                     std::to_string(t_len * n_features));
  }
  if (static_cast<std::size_t>(x_flat.rows()) != n) {
    throw ShapeError("x has " + std::to_string(x_flat.rows()) +
                     " rows, records have " + std::to_string(n));
  }
  const std::size_t max_dim = guard_dim(n, cfg.max_dim_fraction);

  // The X prefix is the same for every epoch; project each prefix once.
  std::vector<mi::SampleMatrix> x_prefix;
  for (std::size_t t = 1; t <= t_len; ++t) {
    bool projected = false;
    x_prefix.push_back(project_if_needed(
        x_flat.leftCols(static_cast<Eigen::Index>(t * n_features)), max_dim,
        &projected));
    if (projected) add_flag(result.flags, "x_projected");
  }

  for (const nn::LayerActivations* r : selected) {
    for (std::size_t t = 1; t <= r->t_len; ++t) {
      TemporalCurvePoint point;
      point.kind = kKindCompression;
      point.phase = r->phase;
      point.epoch = r->epoch;
      point.layer = r->layer;
      point.t = t;

      const mi::SampleMatrix h_prefix =
          r->states.leftCols(static_cast<Eigen::Index>(t * r->cells));
      if (is_constant(h_prefix)) {
        point.value_bits = 0.0;
        result.points.push_back(std::move(point));
        continue;
      }
      bool projected = false;
      const mi::SampleMatrix h =
          project_if_needed(h_prefix, max_dim, &projected);
      if (projected) add_flag(result.flags, "h_projected");
      require_samples(
          n, static_cast<std::size_t>(x_prefix[t - 1].cols() + h.cols()),
          "compression curve");
      const mi::MIEstimate est = mi::gcmi(x_prefix[t - 1], h);
      merge_flags(result.flags, est.flags);
      point.value_bits = est.bits;
      result.points.push_back(std::move(point));
    }
  }
  return result;
}

namespace {

constexpr const char* kCurveHeader =
    "kind,phase,epoch,layer,t,i_xh_bits,i_yh_bits,value_bits";

template <typename T>
T parse_field(const std::string& cell, const char* name) {
  T value{};
  const auto* begin = cell.data();
  const auto* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError("curve file field '" + std::string(name) +
                    "' is not numeric: '" + cell + "'");
  }
  return value;
}

double parse_double_field(const std::string& cell, const char* name) {
  double value = 0.0;
  const auto* begin = cell.data();
  const auto* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError("curve file field '" + std::string(name) +
                    "' is not numeric: '" + cell + "'");
  }
  return value;
}

nlohmann::json plane_point_json(const InfoPlanePoint& p) {
  nlohmann::json j;
  j["kind"] = kKindPlane;
  j["phase"] = p.phase;
  j["epoch"] = p.epoch;
  j["layer"] = p.layer;
  j["i_xh_bits"] = p.i_xh_bits;
  j["i_yh_bits"] = p.i_yh_bits;
  return j;
}

nlohmann::json curve_point_json(const TemporalCurvePoint& p) {
  nlohmann::json j;
  j["kind"] = p.kind;
  j["phase"] = p.phase;
  j["epoch"] = p.epoch;
  j["layer"] = p.layer;
  j["t"] = p.t;
  j["value_bits"] = p.value_bits;
  return j;
}

}  // namespace

void export_curves(const CurveSet& set, const std::filesystem::path& path,
                   CurveFormat format) {
  if (format == CurveFormat::kJson) {
    nlohmann::json array = nlohmann::json::array();
    for (const auto& p : set.plane) array.push_back(plane_point_json(p));
    for (const auto& p : set.curves) array.push_back(curve_point_json(p));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << array.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
    return;
  }

  data::CsvWriter writer(path, {"kind", "phase", "epoch", "layer", "t",
                                "i_xh_bits", "i_yh_bits", "value_bits"});
  for (const auto& p : set.plane) {
    writer.write_row({kKindPlane, std::to_string(p.phase),
                      std::to_string(p.epoch), std::to_string(p.layer), "",
                      data::format_double(p.i_xh_bits),
                      data::format_double(p.i_yh_bits), ""});
  }
  for (const auto& p : set.curves) {
    writer.write_row({p.kind, std::to_string(p.phase),
                      std::to_string(p.epoch), std::to_string(p.layer),
                      std::to_string(p.t), "", "",
                      data::format_double(p.value_bits)});
  }
  writer.close();
}

CurveSet read_curves(const std::filesystem::path& path, CurveFormat format) {
  CurveSet set;
  if (format == CurveFormat::kJson) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    nlohmann::json array;
    try {
      in >> array;
    } catch (const nlohmann::json::exception& e) {
      throw DataError("cannot parse " + path.string() + ": " + e.what());
    }
    for (const auto& j : array) {
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == kKindPlane) {
        InfoPlanePoint p;
        p.phase = j.at("phase").get<int>();
        p.epoch = j.at("epoch").get<std::size_t>();
        p.layer = j.at("layer").get<std::size_t>();
        p.i_xh_bits = j.at("i_xh_bits").get<double>();
        p.i_yh_bits = j.at("i_yh_bits").get<double>();
        set.plane.push_back(p);
      } else {
        TemporalCurvePoint p;
        p.kind = kind;
        p.phase = j.at("phase").get<int>();
        p.epoch = j.at("epoch").get<std::size_t>();
        p.layer = j.at("layer").get<std::size_t>();
        p.t = j.at("t").get<std::size_t>();
        p.value_bits = j.at("value_bits").get<double>();
        set.curves.push_back(std::move(p));
      }
    }
    return set;
  }

  const data::CsvTable table = data::read_csv(path);
  if (table.columns !=
      std::vector<std::string>{"kind", "phase", "epoch", "layer", "t",
                               "i_xh_bits", "i_yh_bits", "value_bits"}) {
    throw DataError("curve file " + path.string() +
                    " does not have the expected header: " + kCurveHeader);
  }
  for (std::size_t row = 0; row < table.n_rows(); ++row) {
    const std::string& kind = table.cell(row, 0);
    if (kind == kKindPlane) {
      InfoPlanePoint p;
      p.phase = parse_field<int>(table.cell(row, 1), "phase");
      p.epoch = parse_field<std::size_t>(table.cell(row, 2), "epoch");
      p.layer = parse_field<std::size_t>(table.cell(row, 3), "layer");
      p.i_xh_bits = parse_double_field(table.cell(row, 5), "i_xh_bits");
      p.i_yh_bits = parse_double_field(table.cell(row, 6), "i_yh_bits");
      set.plane.push_back(p);
    } else {
      TemporalCurvePoint p;
      p.kind = kind;
      p.phase = parse_field<int>(table.cell(row, 1), "phase");
      p.epoch = parse_field<std::size_t>(table.cell(row, 2), "epoch");
      p.layer = parse_field<std::size_t>(table.cell(row, 3), "layer");
      p.t = parse_field<std::size_t>(table.cell(row, 4), "t");
      p.value_bits = parse_double_field(table.cell(row, 7), "value_bits");
      set.curves.push_back(std::move(p));
    }
  }
  return set;
}

namespace {

constexpr char kActivationsMagic[8] = {'I', 'B', 'S', 'A',
                                       'C', 'T', '0', '1'};

template <typename T>
void write_scalar(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_scalar(std::ifstream& in, const std::filesystem::path& path) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw IoError("truncated activations file " + path.string());
  return value;
}

}  // namespace

void save_activations(const ActivationsFile& file,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(kActivationsMagic, sizeof(kActivationsMagic));

  const nn::BatchSeq& x = file.probe.x;
  write_scalar<std::uint64_t>(out, x.n);
  write_scalar<std::uint64_t>(out, x.t_len);
  write_scalar<std::uint64_t>(out, x.dim());
  std::vector<double> row_buffer(x.dim());
  for (Eigen::Index r = 0; r < x.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.values.cols(); ++c) {
      row_buffer[static_cast<std::size_t>(c)] = x.values(r, c);
    }
    out.write(reinterpret_cast<const char*>(row_buffer.data()),
              static_cast<std::streamsize>(row_buffer.size() *
                                           sizeof(double)));
  }
  write_scalar<std::uint64_t>(out, file.probe.y.size());
  for (int label : file.probe.y) write_scalar<std::int32_t>(out, label);

  write_scalar<std::uint64_t>(out, file.probe_indices.size());
  for (std::size_t idx : file.probe_indices) {
    write_scalar<std::uint64_t>(out, idx);
  }

  write_scalar<std::uint64_t>(out, file.records.size());
  for (const auto& r : file.records) {
    write_scalar<std::int32_t>(out, r.phase);
    write_scalar<std::uint64_t>(out, r.epoch);
    write_scalar<std::uint64_t>(out, r.layer);
    write_scalar<std::uint64_t>(out, r.n);
    write_scalar<std::uint64_t>(out, r.t_len);
    write_scalar<std::uint64_t>(out, r.cells);
    std::vector<float> states(static_cast<std::size_t>(r.states.cols()));
    for (Eigen::Index row = 0; row < r.states.rows(); ++row) {
      for (Eigen::Index col = 0; col < r.states.cols(); ++col) {
        states[static_cast<std::size_t>(col)] =
            static_cast<float>(r.states(row, col));
      }
      out.write(reinterpret_cast<const char*>(states.data()),
                static_cast<std::streamsize>(states.size() * sizeof(float)));
    }
  }
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

ActivationsFile load_activations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[sizeof(kActivationsMagic)] = {};
  in.read(magic, sizeof(magic));
  if (!in || !std::equal(std::begin(magic), std::end(magic),
                         std::begin(kActivationsMagic))) {
    throw IoError(path.string() + " is not an activations file");
  }

  ActivationsFile file;
  const auto n = read_scalar<std::uint64_t>(in, path);
  const auto t_len = read_scalar<std::uint64_t>(in, path);
  const auto d = read_scalar<std::uint64_t>(in, path);
  file.probe.x = nn::BatchSeq(static_cast<std::size_t>(n),
                              static_cast<std::size_t>(t_len),
                              static_cast<std::size_t>(d));
  std::vector<double> row_buffer(static_cast<std::size_t>(d));
  for (Eigen::Index r = 0; r < file.probe.x.values.rows(); ++r) {
    in.read(reinterpret_cast<char*>(row_buffer.data()),
            static_cast<std::streamsize>(row_buffer.size() * sizeof(double)));
    if (!in) throw IoError("truncated activations file " + path.string());
    for (Eigen::Index c = 0; c < file.probe.x.values.cols(); ++c) {
      file.probe.x.values(r, c) = row_buffer[static_cast<std::size_t>(c)];
    }
  }
  const auto y_size = read_scalar<std::uint64_t>(in, path);
  file.probe.y.resize(static_cast<std::size_t>(y_size));
  for (auto& label : file.probe.y) {
    label = read_scalar<std::int32_t>(in, path);
  }

  const auto idx_size = read_scalar<std::uint64_t>(in, path);
  file.probe_indices.resize(static_cast<std::size_t>(idx_size));
  for (auto& idx : file.probe_indices) {
    idx = static_cast<std::size_t>(read_scalar<std::uint64_t>(in, path));
  }

  const auto n_records = read_scalar<std::uint64_t>(in, path);
  file.records.resize(static_cast<std::size_t>(n_records));
  for (auto& r : file.records) {
    r.phase = read_scalar<std::int32_t>(in, path);
    r.epoch = static_cast<std::size_t>(read_scalar<std::uint64_t>(in, path));
    r.layer = static_cast<std::size_t>(read_scalar<std::uint64_t>(in, path));
    r.n = static_cast<std::size_t>(read_scalar<std::uint64_t>(in, path));
    r.t_len = static_cast<std::size_t>(read_scalar<std::uint64_t>(in, path));
    r.cells = static_cast<std::size_t>(read_scalar<std::uint64_t>(in, path));
    r.states.resize(static_cast<Eigen::Index>(r.n),
                    static_cast<Eigen::Index>(r.t_len * r.cells));
    std::vector<float> states(static_cast<std::size_t>(r.states.cols()));
    for (Eigen::Index row = 0; row < r.states.rows(); ++row) {
      in.read(reinterpret_cast<char*>(states.data()),
              static_cast<std::streamsize>(states.size() * sizeof(float)));
      if (!in) throw IoError("truncated activations file " + path.string());
      for (Eigen::Index col = 0; col < r.states.cols(); ++col) {
        r.states(row, col) =
            static_cast<double>(states[static_cast<std::size_t>(col)]);
      }
    }
  }
  return file;
}

}  // namespace ibsplit::infoplane
