// io.hpp -- file formats: recording CSV + JSON sidecar, model JSON, label
// CSV and report JSON.
//
// Numeric text is written with enough digits (%.17g / shortest-round-trip
// JSON doubles) that a save/load cycle reproduces the binary64 values
// exactly.  Complex numbers are serialized as [re, im] pairs.
#pragma once

#include "scrc/common.hpp"
#include "scrc/pipeline.hpp"
#include "scrc/recording.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace scrc::io {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

/// FNV-1a 64-bit digest of a file's bytes, hex encoded.
inline std::string digest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open for digest: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= std::uint64_t(static_cast<unsigned char>(buf[i]));
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char out[19];
  std::snprintf(out, sizeof out, "%016llx", (unsigned long long)h);
  return std::string("fnv1a64:") + out;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  p.replace_extension();  // drop .csv
  p += ".meta.json";
  return p;
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("bad JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace detail

/// Extra facts carried next to a recording in its .meta.json sidecar.
struct RecordingMeta {
  double sample_rate_hz = 200.0;
  int channels = 0;
  Index length = 0;
  bool has_labels = false;
  std::string kind;     ///< "couple", "sequence", or free-form
  int gesture_id = 0;   ///< 0 when not a couple
  std::uint64_t seed = 0;
};

struct RecordingBundle {
  MultichannelRecording recording;
  std::vector<int> truth;  ///< empty when the CSV has no label column
  RecordingMeta meta;
};

/// Writes `<path>` as CSV (`t,ch0,...[,label]`) and `<base>.meta.json`.
inline void write_recording_csv(const std::filesystem::path& path,
                                const MultichannelRecording& rec,
                                const std::vector<int>* truth = nullptr,
                                std::string kind = "sequence",
                                int gesture_id = 0, std::uint64_t seed = 0) {
  rec.validate();
  if (truth && Index(truth->size()) != rec.length())
    throw DimensionError("truth length does not match recording");
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "t";
  for (int ch = 0; ch < rec.channels(); ++ch) out << ",ch" << ch;
  if (truth) out << ",label";
  out << '\n';
  for (Index i = 0; i < rec.length(); ++i) {
    out << detail::fmt_double(double(i) / rec.sample_rate_hz);
    for (int ch = 0; ch < rec.channels(); ++ch)
      out << ',' << detail::fmt_double(rec.samples(i, ch));
    if (truth) out << ',' << (*truth)[size_t(i)];
    out << '\n';
  }
  if (!out) throw DataError("failed writing " + path.string());

  json meta;
  meta["format_version"] = kFormatVersion;
  meta["sample_rate_hz"] = rec.sample_rate_hz;
  meta["channels"] = rec.channels();
  meta["length"] = rec.length();
  meta["has_labels"] = truth != nullptr;
  meta["kind"] = kind;
  if (gesture_id > 0) meta["gesture_id"] = gesture_id;
  meta["seed"] = seed;
  detail::write_json_file(detail::sidecar_path(path), meta);
}

/// Reads a recording CSV; picks up the sidecar when present, otherwise
/// infers the sample rate from the t column.
inline RecordingBundle read_recording_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header[0] != "t")
    throw DataError(path.string() + ": header must start with t,ch0,...");
  bool has_labels = header.back() == "label";
  const int channels = int(header.size()) - 1 - (has_labels ? 1 : 0);
  if (channels < 1) throw DataError(path.string() + ": no channel columns");
  for (int ch = 0; ch < channels; ++ch)
    if (header[size_t(ch + 1)] != "ch" + std::to_string(ch))
      throw DataError(path.string() + ": unexpected column '" +
                      header[size_t(ch + 1)] + "'");

  std::vector<double> times;
  std::vector<double> flat;
  std::vector<int> truth;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size())
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected " + std::to_string(header.size()) +
                      " cells, got " + std::to_string(cells.size()));
    try {
      times.push_back(std::stod(cells[0]));
      for (int ch = 0; ch < channels; ++ch)
        flat.push_back(std::stod(cells[size_t(ch + 1)]));
      if (has_labels) truth.push_back(std::stoi(cells.back()));
    } catch (const std::exception&) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": unparseable numeric cell");
    }
  }
  const Index length = Index(times.size());
  if (length < 2) throw DataError(path.string() + ": too few samples");
  for (Index i = 1; i < length; ++i)
    if (!(times[size_t(i)] > times[size_t(i - 1)]))
      throw DataError(path.string() + ": t column must increase");

  RecordingBundle bundle;
  bundle.recording.samples = Mat(length, channels);
  for (Index i = 0; i < length; ++i)
    for (int ch = 0; ch < channels; ++ch)
      bundle.recording.samples(i, ch) = flat[size_t(i) * size_t(channels) +
                                             size_t(ch)];
  bundle.truth = std::move(truth);

  const std::filesystem::path side = detail::sidecar_path(path);
  if (std::filesystem::exists(side)) {
    json meta = detail::read_json_file(side);
    bundle.meta.sample_rate_hz = meta.value("sample_rate_hz", 0.0);
    bundle.meta.kind = meta.value("kind", "");
    bundle.meta.gesture_id = meta.value("gesture_id", 0);
    bundle.meta.seed = meta.value("seed", std::uint64_t(0));
    if (!(bundle.meta.sample_rate_hz > 0.0))
      throw DataError(side.string() + ": bad sample_rate_hz");
    if (meta.contains("length") && Index(meta["length"]) != length)
      throw DataError(path.string() + ": length disagrees with sidecar");
    if (meta.contains("channels") && int(meta["channels"]) != channels)
      throw DataError(path.string() + ": channels disagree with sidecar");
  } else {
    bundle.meta.sample_rate_hz =
        1.0 / ((times.back() - times.front()) / double(length - 1));
  }
  bundle.meta.channels = channels;
  bundle.meta.length = length;
  bundle.meta.has_labels = has_labels;
  bundle.recording.sample_rate_hz = bundle.meta.sample_rate_hz;
  bundle.recording.validate();
  if (has_labels)
    for (int t : bundle.truth)
      if (t < 1) throw DataError(path.string() + ": labels must be >= 1");
  return bundle;
}

// ---------------------------------------------------------------------------
// model persistence

struct ProvenanceInput {
  std::string path;
  std::string digest;
};

namespace detail {

inline json to_json_scalar(double v) { return v; }
inline json to_json_scalar(const Complex& v) {
  return json::array({v.real(), v.imag()});
}
inline void from_json_scalar(const json& j, double& v) { v = j.get<double>(); }
inline void from_json_scalar(const json& j, Complex& v) {
  if (!j.is_array() || j.size() != 2)
    throw DataError("complex value must be a [re, im] pair");
  v = Complex(j[0].get<double>(), j[1].get<double>());
}

template <typename Scalar>
json matrix_to_json(const crc::MatX<Scalar>& m) {
  json flat = json::array();
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) flat.push_back(to_json_scalar(m(i, j)));
  return flat;
}

template <typename Scalar>
crc::MatX<Scalar> matrix_from_json(const json& flat, Index rows, Index cols) {
  if (!flat.is_array() || Index(flat.size()) != rows * cols)
    throw DataError("matrix payload has wrong element count");
  crc::MatX<Scalar> m(rows, cols);
  Index at = 0;
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i)
      from_json_scalar(flat[size_t(at++)], m(i, j));
  return m;
}

inline json config_to_json(const pipeline::PipelineConfig& cfg) {
  json j;
  j["window_len"] = cfg.window_len;
  j["step"] = cfg.step;
  j["channels"] = cfg.channels;
  j["sample_rate_hz"] = cfg.sample_rate_hz;
  j["sigma"] = cfg.sigma;
  j["lambda1"] = cfg.lambda1;
  j["lambda2"] = cfg.lambda2;
  j["representatives_per_class"] = cfg.representatives_per_class;
  j["center_windows"] = cfg.center_windows;
  j["cluster_stride"] = cfg.cluster_stride;
  j["active_rule"] =
      cfg.active_rule == pipeline::ActivePhaseRule::kHigherEnergy ? "higher"
                                                                  : "lower";
  j["osc_max_iterations"] = cfg.osc_max_iterations;
  j["osc_tolerance"] = cfg.osc_tolerance;
  j["osc_smoothing"] = cfg.osc_smoothing;
  j["seed"] = cfg.seed;
  return j;
}

inline pipeline::PipelineConfig config_from_json(const json& j) {
  pipeline::PipelineConfig cfg;
  cfg.window_len = j.at("window_len").get<Index>();
  cfg.step = j.at("step").get<Index>();
  cfg.channels = j.at("channels").get<int>();
  cfg.sample_rate_hz = j.at("sample_rate_hz").get<double>();
  cfg.sigma = j.at("sigma").get<double>();
  cfg.lambda1 = j.at("lambda1").get<double>();
  cfg.lambda2 = j.at("lambda2").get<double>();
  cfg.representatives_per_class = j.at("representatives_per_class").get<int>();
  cfg.center_windows = j.at("center_windows").get<bool>();
  cfg.cluster_stride = j.at("cluster_stride").get<Index>();
  cfg.active_rule = j.at("active_rule").get<std::string>() == "lower"
                        ? pipeline::ActivePhaseRule::kLowerEnergy
                        : pipeline::ActivePhaseRule::kHigherEnergy;
  cfg.osc_max_iterations = j.at("osc_max_iterations").get<int>();
  cfg.osc_tolerance = j.at("osc_tolerance").get<double>();
  cfg.osc_smoothing = j.at("osc_smoothing").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

}  // namespace detail

/// Current UTC time as ISO-8601; injectable for reproducible files.
inline std::string iso_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

template <typename Scalar>
void save_model(const std::filesystem::path& path,
                const pipeline::Model<Scalar>& model,
                const std::vector<ProvenanceInput>& inputs = {},
                std::string created = "") {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "gesture-model";
  j["scalar"] = pipeline::Model<Scalar>::is_spectral ? "complex" : "real";
  j["config"] = detail::config_to_json(model.config);
  j["scheme"]["gesture_ids"] = model.scheme.gesture_ids;
  json& d = j["dictionary"];
  d["rows"] = model.dictionary.dim();
  d["cols"] = model.dictionary.size();
  d["class_count"] = model.dictionary.class_count;
  d["class_of"] = model.dictionary.class_of;
  d["column_norms"] = std::vector<double>(
      model.dictionary.column_norms.data(),
      model.dictionary.column_norms.data() + model.dictionary.size());
  {
    json mean = json::array();
    for (Index i = 0; i < model.dictionary.dim(); ++i)
      mean.push_back(detail::to_json_scalar(model.dictionary.column_mean[i]));
    d["column_mean"] = std::move(mean);
  }
  d["columns"] = detail::matrix_to_json<Scalar>(model.dictionary.columns);
  j["operator"]["sigma"] = model.op.sigma;
  j["operator"]["p"] = detail::matrix_to_json<Scalar>(model.op.p);
  json& prov = j["provenance"];
  prov["created"] = created.empty() ? iso_now() : created;
  prov["seed"] = model.config.seed;
  prov["inputs"] = json::array();
  for (const auto& in : inputs)
    prov["inputs"].push_back({{"path", in.path}, {"digest", in.digest}});
  detail::write_json_file(path, j);
}

/// A loaded model of either scalar type, plus its provenance block.
struct LoadedModel {
  std::variant<pipeline::Model<double>, pipeline::Model<Complex>> model;
  json provenance;

  bool is_spectral() const { return model.index() == 1; }
};

namespace detail {

template <typename Scalar>
pipeline::Model<Scalar> model_from_json(const json& j) {
  pipeline::Model<Scalar> model;
  model.config = config_from_json(j.at("config"));
  model.scheme.gesture_ids =
      j.at("scheme").at("gesture_ids").get<std::vector<int>>();
  const json& d = j.at("dictionary");
  const Index rows = d.at("rows").get<Index>();
  const Index cols = d.at("cols").get<Index>();
  model.dictionary.class_count = d.at("class_count").get<int>();
  model.dictionary.class_of = d.at("class_of").get<std::vector<int>>();
  if (Index(model.dictionary.class_of.size()) != cols)
    throw DataError("model: class_of length mismatch");
  const auto norms = d.at("column_norms").get<std::vector<double>>();
  if (Index(norms.size()) != cols)
    throw DataError("model: column_norms length mismatch");
  model.dictionary.column_norms =
      Eigen::Map<const Vec>(norms.data(), Index(norms.size()));
  const json& mean = d.at("column_mean");
  if (Index(mean.size()) != rows)
    throw DataError("model: column_mean length mismatch");
  model.dictionary.column_mean.resize(rows);
  for (Index i = 0; i < rows; ++i)
    from_json_scalar(mean[size_t(i)], model.dictionary.column_mean[i]);
  model.dictionary.columns =
      matrix_from_json<Scalar>(d.at("columns"), rows, cols);
  model.op.sigma = j.at("operator").at("sigma").get<double>();
  model.op.p = matrix_from_json<Scalar>(j.at("operator").at("p"), cols, rows);
  if (model.scheme.internal_class_count() != model.dictionary.class_count)
    throw DataError("model: scheme does not match dictionary class count");
  return model;
}

}  // namespace detail

inline LoadedModel load_model(const std::filesystem::path& path) {
  json j = detail::read_json_file(path);
  if (j.value("kind", "") != "gesture-model")
    throw DataError(path.string() + ": not a model file");
  if (j.value("format_version", -1) != kFormatVersion)
    throw DataError(path.string() + ": unsupported format_version");
  const std::string scalar = j.at("scalar").get<std::string>();
  LoadedModel out;
  out.provenance = j.value("provenance", json::object());
  if (scalar == "complex")
    out.model = detail::model_from_json<Complex>(j);
  else if (scalar == "real")
    out.model = detail::model_from_json<double>(j);
  else
    throw DataError(path.string() + ": unknown scalar kind '" + scalar + "'");
  return out;
}

// ---------------------------------------------------------------------------
// labels and reports

inline void write_labels_csv(const std::filesystem::path& path,
                             const pipeline::LabelTimeline& timeline) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "window_start,label,internal_id,margin\n";
  for (const auto& r : timeline.records)
    out << r.window_start << ',' << r.label << ',' << r.internal_id << ','
        << detail::fmt_double(r.margin) << '\n';
  if (!out) throw DataError("failed writing " + path.string());
}

inline json report_to_json(const pipeline::EvaluationReport& rep) {
  json j;
  j["accuracy"] = rep.accuracy;
  j["correct"] = rep.correct;
  j["total"] = rep.total;
  j["tolerance_windows"] = rep.tolerance_windows;
  j["per_class_accuracy"] = rep.per_class_accuracy;
  json conf = json::array();
  for (Index i = 0; i < rep.confusion.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < rep.confusion.cols(); ++k)
      row.push_back(rep.confusion(i, k));
    conf.push_back(std::move(row));
  }
  j["confusion"] = std::move(conf);
  return j;
}

inline json report_to_json(const pipeline::ComparisonReport& rep) {
  json j;
  j["shift_augmented"] = rep.shift_augmented;
  j["rows"] = json::array();
  for (const auto& row : rep.rows)
    j["rows"].push_back({{"sigma", row.sigma},
                         {"scrc", report_to_json(row.scrc)},
                         {"crc", report_to_json(row.crc)}});
  return j;
}

inline void write_report(const std::filesystem::path& path, const json& j) {
  detail::write_json_file(path, j);
}

}  // namespace scrc::io
