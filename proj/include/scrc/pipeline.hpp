// pipeline.hpp -- end-to-end training and streaming classification.
//
// Training consumes one recording per gesture "couple" (gesture phase
// alternating with relax phase), separates the two phases by ordered
// subspace clustering, identifies the active phase by mean window energy,
// subsamples representatives of each phase, and assembles one dictionary
// over all couples: gesture g contributes an active class and a return
// class.  Classification slides a window across the stream, extracts
// features (spectral eigenvalues or raw time samples, by scalar type), codes
// against the dictionary and reports per-window labels; return-phase classes
// collapse onto the relax label unless mapping is disabled.
#pragma once

#include "scrc/common.hpp"
#include "scrc/crc.hpp"
#include "scrc/osc.hpp"
#include "scrc/recording.hpp"
#include "scrc/spectral.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace scrc::pipeline {

enum class ActivePhaseRule {
  kHigherEnergy,  ///< cluster with higher mean window energy is active
  kLowerEnergy,   ///< override for inverted setups
};

struct PipelineConfig {
  Index window_len = 100;
  Index step = 1;
  int channels = 8;
  double sample_rate_hz = 200.0;
  double sigma = 0.0;  ///< ridge weight; <= 0 selects the default rule
  double lambda1 = 0.1;
  double lambda2 = 0.1;
  int representatives_per_class = 25;
  bool center_windows = true;
  Index cluster_stride = 2;  ///< training-time window decimation before OSC
  ActivePhaseRule active_rule = ActivePhaseRule::kHigherEnergy;
  int osc_max_iterations = 200;
  double osc_tolerance = 3e-3;
  double osc_smoothing = 0.1;
  std::uint64_t seed = 1;

  void validate() const {
    if (window_len < 2) throw ConfigError("window length must be >= 2");
    if (step < 1) throw ConfigError("step must be >= 1");
    if (channels < 1) throw ConfigError("need at least one channel");
    if (!(sample_rate_hz > 0.0)) throw ConfigError("bad sample rate");
    if (representatives_per_class < 1)
      throw ConfigError("representatives_per_class must be >= 1");
    if (cluster_stride < 1) throw ConfigError("cluster stride must be >= 1");
    if (lambda1 < 0.0 || lambda2 < 0.0)
      throw ConfigError("penalty weights must be nonnegative");
    if (osc_max_iterations < 1 || !(osc_tolerance > 0.0) ||
        !(osc_smoothing > 0.0))
      throw ConfigError("bad clustering solver limits");
  }
};

/// Maps between internal dictionary classes and external labels.
///
/// Internal classes come in pairs per trained gesture, ordered by ascending
/// gesture id: couple q (0-based) owns active class 2q+1 and return class
/// 2q+2.  External labels are 1 = relax, gesture id + 1 for active phases;
/// every return phase maps to relax.
struct ClassScheme {
  std::vector<int> gesture_ids;  ///< sorted ascending, unique

  int couple_count() const { return int(gesture_ids.size()); }
  int internal_class_count() const { return 2 * couple_count(); }

  bool is_active(int internal_id) const { return internal_id % 2 == 1; }
  int couple_index(int internal_id) const { return (internal_id - 1) / 2; }
  int gesture_of(int internal_id) const {
    return gesture_ids[size_t(couple_index(internal_id))];
  }
  int external_label(int internal_id) const {
    return is_active(internal_id) ? gesture_of(internal_id) + 1 : 1;
  }
};

/// One training recording: a single gesture alternating with relax.
struct GestureCoupleRecording {
  MultichannelRecording recording;
  int gesture_id = 0;
  std::vector<int> truth;  ///< optional per-sample labels (diagnostics only)
  std::string source;      ///< optional provenance note
};

template <typename Scalar>
struct Model {
  PipelineConfig config;
  ClassScheme scheme;
  crc::Dictionary<Scalar> dictionary;
  crc::RegressionOperator<Scalar> op;

  static constexpr bool is_spectral = std::is_same_v<Scalar, Complex>;
};

using ScrcModel = Model<Complex>;  ///< spectral features
using CrcModel = Model<double>;    ///< raw time-domain features

/// One window position across all channels.
struct WindowGroup {
  Mat samples;  ///< window_len x channels
  Index start = 0;
};

inline std::vector<WindowGroup> slide_windows(const MultichannelRecording& rec,
                                              const PipelineConfig& cfg) {
  rec.validate();
  if (rec.channels() != cfg.channels)
    throw DimensionError("recording has " + std::to_string(rec.channels()) +
                         " channels, config expects " +
                         std::to_string(cfg.channels));
  if (rec.length() < cfg.window_len)
    throw DataError("recording shorter than one window");
  const Index count = (rec.length() - cfg.window_len) / cfg.step + 1;
  std::vector<WindowGroup> out;
  out.reserve(size_t(count));
  for (Index w = 0; w < count; ++w) {
    const Index start = w * cfg.step;
    out.push_back({rec.samples.middleRows(start, cfg.window_len), start});
  }
  return out;
}

namespace detail {

/// Sum of squared per-channel-centered samples of one window group.
inline double window_energy(const Mat& w) {
  double e = 0.0;
  for (Index ch = 0; ch < w.cols(); ++ch)
    e += (w.col(ch).array() - w.col(ch).mean()).matrix().squaredNorm();
  return e;
}

inline CVec spectral_observation(const Mat& w, bool center) {
  const Index n = w.rows();
  CVec out(n * w.cols());
  for (Index ch = 0; ch < w.cols(); ++ch) {
    if (center) {
      Vec c = w.col(ch).array() - w.col(ch).mean();
      out.segment(ch * n, n) = spectral::eigenvalues_fast(c);
    } else {
      out.segment(ch * n, n) = spectral::eigenvalues_fast(w.col(ch));
    }
  }
  return out;
}

inline Vec time_observation(const Mat& w, bool center) {
  const Index n = w.rows();
  Vec out(n * w.cols());
  for (Index ch = 0; ch < w.cols(); ++ch) {
    if (center)
      out.segment(ch * n, n) = w.col(ch).array() - w.col(ch).mean();
    else
      out.segment(ch * n, n) = w.col(ch);
  }
  return out;
}

template <typename Scalar>
crc::VecX<Scalar> make_observation(const Mat& w, bool center) {
  if constexpr (std::is_same_v<Scalar, Complex>)
    return spectral_observation(w, center);
  else
    return time_observation(w, center);
}

/// Real-valued clustering column for one window: per-channel eigenvalue
/// magnitudes.  Phase is dropped on purpose — disjoint windows of the same
/// activity carry independent phase, so phase-bearing features make distant
/// same-phase windows nearly orthogonal and the self-expression graph
/// degenerates into a chain of overlapping neighbors.  Magnitudes gather
/// each phase around a common direction no matter how far apart in time the
/// windows sit, which is exactly what the phase split needs.  Both model
/// flavors cluster on the same column so they pick identical representatives.
inline Vec clustering_column(const Mat& w, bool center) {
  return spectral_observation(w, center).cwiseAbs();
}

/// Evenly spaced subsample of 0..count-1 (at most `want` indices).
inline std::vector<Index> spread_indices(Index count, Index want) {
  std::vector<Index> idx;
  if (count <= want) {
    idx.resize(size_t(count));
    for (Index i = 0; i < count; ++i) idx[size_t(i)] = i;
    return idx;
  }
  if (want == 1) return {0};
  idx.reserve(size_t(want));
  for (Index r = 0; r < want; ++r) {
    const Index i = (r * (count - 1) + (want - 1) / 2) / (want - 1);
    if (idx.empty() || idx.back() != i) idx.push_back(i);
  }
  return idx;
}

/// Majority truth label over one window span.
inline int majority_label(const std::vector<int>& truth, Index start,
                          Index len) {
  std::vector<std::pair<int, Index>> counts;
  for (Index i = start; i < start + len; ++i) {
    const int lab = truth[size_t(i)];
    auto it = std::find_if(counts.begin(), counts.end(),
                           [lab](const auto& p) { return p.first == lab; });
    if (it == counts.end())
      counts.emplace_back(lab, 1);
    else
      ++it->second;
  }
  return std::max_element(counts.begin(), counts.end(),
                          [](const auto& a, const auto& b) {
                            return a.second < b.second;
                          })
      ->first;
}

}  // namespace detail

/// Fraction of windows whose cluster agrees with the dominant reference
/// label of that cluster.
inline double cluster_purity(const std::vector<int>& cluster_labels,
                             const std::vector<int>& reference_labels) {
  if (cluster_labels.size() != reference_labels.size() ||
      cluster_labels.empty())
    throw DimensionError("purity needs matching nonempty label vectors");
  std::vector<std::pair<std::pair<int, int>, Index>> counts;
  for (size_t i = 0; i < cluster_labels.size(); ++i) {
    const std::pair<int, int> key{cluster_labels[i], reference_labels[i]};
    auto it = std::find_if(counts.begin(), counts.end(),
                           [&](const auto& p) { return p.first == key; });
    if (it == counts.end())
      counts.push_back({key, 1});
    else
      ++it->second;
  }
  std::vector<int> clusters;
  for (const auto& [key, cnt] : counts)
    if (std::find(clusters.begin(), clusters.end(), key.first) ==
        clusters.end())
      clusters.push_back(key.first);
  Index agree = 0;
  for (int c : clusters) {
    Index best = 0;
    for (const auto& [key, cnt] : counts)
      if (key.first == c) best = std::max(best, cnt);
    agree += best;
  }
  return double(agree) / double(cluster_labels.size());
}

struct CoupleDiagnostics {
  int gesture_id = 0;
  Index window_count = 0;     ///< windows before decimation
  Index clustered_count = 0;  ///< columns given to the clustering solve
  Index active_count = 0;     ///< active-cluster members (pre subsample)
  Index return_count = 0;
  bool solver_converged = false;
  double purity = -1.0;  ///< vs provided truth; -1 when truth absent
};

template <typename Scalar>
struct TrainResult {
  Model<Scalar> model;
  std::vector<CoupleDiagnostics> diagnostics;  ///< ascending gesture id
};

/// Trains a model from gesture couples.  Scalar selects the feature space:
/// Complex -> spectral eigenvalue features, double -> raw time windows.
template <typename Scalar = Complex>
TrainResult<Scalar> train(const std::vector<GestureCoupleRecording>& couples,
                          const PipelineConfig& cfg) {
  cfg.validate();
  if (couples.empty()) throw DataError("no training couples");

  std::vector<size_t> order(couples.size());
  for (size_t i = 0; i < couples.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return couples[a].gesture_id < couples[b].gesture_id;
  });
  for (size_t i = 0; i + 1 < order.size(); ++i)
    if (couples[order[i]].gesture_id == couples[order[i + 1]].gesture_id)
      throw DataError("duplicate couple for gesture id " +
                      std::to_string(couples[order[i]].gesture_id));

  TrainResult<Scalar> result;
  for (size_t q : order)
    result.model.scheme.gesture_ids.push_back(couples[q].gesture_id);
  result.model.config = cfg;

  std::vector<crc::VecX<Scalar>> atoms;
  std::vector<int> atom_class;

  for (size_t qi = 0; qi < order.size(); ++qi) {
    const GestureCoupleRecording& couple = couples[order[qi]];
    const std::string who = "gesture " + std::to_string(couple.gesture_id);
    if (couple.gesture_id < 1) throw DataError("gesture ids must be >= 1");
    if (couple.recording.length() < 2 * cfg.window_len)
      throw DataError(who + ": recording shorter than two windows");
    if (!couple.truth.empty() &&
        Index(couple.truth.size()) != couple.recording.length())
      throw DataError(who + ": truth length does not match recording");

    std::vector<WindowGroup> windows = slide_windows(couple.recording, cfg);
    std::vector<Index> picked;
    for (Index i = 0; i < Index(windows.size()); i += cfg.cluster_stride)
      picked.push_back(i);
    if (Index(picked.size()) < 6)
      throw DataError(who + ": too few windows to cluster");

    std::vector<crc::VecX<Scalar>> obs(picked.size());
    Mat x(cfg.window_len * cfg.channels, Index(picked.size()));
    for (size_t j = 0; j < picked.size(); ++j) {
      const Mat& w = windows[size_t(picked[j])].samples;
      obs[j] = detail::make_observation<Scalar>(w, cfg.center_windows);
      x.col(Index(j)) = detail::clustering_column(w, cfg.center_windows);
    }

    osc::CoupleClusterOptions copt;
    copt.lambda1 = cfg.lambda1;
    copt.lambda2 = cfg.lambda2;
    copt.solver.max_iterations = cfg.osc_max_iterations;
    copt.solver.tolerance = cfg.osc_tolerance;
    copt.solver.smoothing = cfg.osc_smoothing;
    copt.seed = mix_seed(cfg.seed, qi);
    osc::ClusterAssignment clusters = osc::cluster_couple(x, 2, copt);

    std::array<std::vector<Index>, 2> members;  // window indices per cluster
    for (size_t j = 0; j < picked.size(); ++j)
      members[size_t(clusters.labels[j] - 1)].push_back(picked[j]);
    for (const auto& m : members)
      if (Index(m.size()) < 3)
        throw DataError(who + ": a phase cluster has fewer than 3 windows");

    std::array<double, 2> mean_energy = {0.0, 0.0};
    for (int c = 0; c < 2; ++c) {
      for (Index w : members[size_t(c)])
        mean_energy[size_t(c)] +=
            detail::window_energy(windows[size_t(w)].samples);
      mean_energy[size_t(c)] /= double(members[size_t(c)].size());
    }
    int active = mean_energy[0] >= mean_energy[1] ? 0 : 1;
    if (cfg.active_rule == ActivePhaseRule::kLowerEnergy) active = 1 - active;

    CoupleDiagnostics diag;
    diag.gesture_id = couple.gesture_id;
    diag.window_count = Index(windows.size());
    diag.clustered_count = Index(picked.size());
    diag.active_count = Index(members[size_t(active)].size());
    diag.return_count = Index(members[size_t(1 - active)].size());
    diag.solver_converged = clusters.solver_converged;
    if (!couple.truth.empty()) {
      std::vector<int> window_truth(picked.size());
      for (size_t j = 0; j < picked.size(); ++j)
        window_truth[j] = detail::majority_label(
            couple.truth, windows[size_t(picked[j])].start, cfg.window_len);
      diag.purity = cluster_purity(clusters.labels, window_truth);
    }
    result.diagnostics.push_back(diag);

    // Windows whose span reaches into the other cluster's run sit on a phase
    // crossfade; keeping them out of the dictionary stops mixed-content
    // atoms from pulling queries of the opposite phase into this class.
    std::array<std::vector<Index>, 2> interior;
    for (int c = 0; c < 2; ++c) {
      const auto& own = members[size_t(c)];
      const auto& other = members[size_t(1 - c)];
      for (Index idx : own) {
        auto it = std::lower_bound(other.begin(), other.end(), idx);
        const bool near_next =
            it != other.end() && (*it - idx) * cfg.step < cfg.window_len;
        const bool near_prev =
            it != other.begin() &&
            (idx - *std::prev(it)) * cfg.step < cfg.window_len;
        if (!near_next && !near_prev) interior[size_t(c)].push_back(idx);
      }
      if (Index(interior[size_t(c)].size()) < 3)
        interior[size_t(c)] = own;  // degenerate split, keep everything
    }

    for (int phase = 0; phase < 2; ++phase) {
      const int cluster = phase == 0 ? active : 1 - active;
      const auto& m = interior[size_t(cluster)];
      const std::vector<Index> keep = detail::spread_indices(
          Index(m.size()), Index(cfg.representatives_per_class));
      const int class_id = 2 * int(qi) + 1 + phase;
      for (Index k : keep) {
        // map back from the member list to the decimated observation slot
        const Index slot = Index(std::find(picked.begin(), picked.end(),
                                           m[size_t(k)]) -
                                 picked.begin());
        atoms.push_back(obs[size_t(slot)]);
        atom_class.push_back(class_id);
      }
    }
  }

  crc::MatX<Scalar> raw(atoms[0].size(), Index(atoms.size()));
  for (size_t j = 0; j < atoms.size(); ++j) raw.col(Index(j)) = atoms[j];

  double sigma = cfg.sigma;
  if (!(sigma > 0.0)) {
    // dictionary conditioning leaves every column at unit energy, so the
    // default rule is evaluated on that scale, not on the raw features
    sigma = crc::default_sigma(raw.rows(), raw.cols());
  }
  result.model.config.sigma = sigma;

  auto [dict, op] = crc::build_dictionary<Scalar>(raw, atom_class, sigma);
  result.model.dictionary = std::move(dict);
  result.model.op = std::move(op);
  return result;
}

/// One emitted label.
struct LabelRecord {
  Index window_start = 0;
  int internal_id = 0;  ///< dictionary class, 1..2G
  int label = 0;        ///< external label (or internal id when unmapped)
  double margin = 0.0;
};

struct LabelTimeline {
  std::vector<LabelRecord> records;
  Index window_len = 0;
  Index step = 1;
  Index count() const { return Index(records.size()); }
};

/// Feeds samples one at a time and emits a label whenever a full window at
/// the configured step is available.  Keeps a ring buffer of the last
/// window_len samples; a model borrowed by reference must outlive this.
template <typename Scalar>
class StreamClassifier {
 public:
  explicit StreamClassifier(const Model<Scalar>& model, bool map_labels = true)
      : model_(model),
        map_labels_(map_labels),
        ring_(model.config.window_len, model.config.channels) {
    model.config.validate();
  }

  /// Pushes one frame (one sample per channel); returns a record when this
  /// frame completes a window aligned with the step grid.
  std::optional<LabelRecord> push(const Eigen::Ref<const Eigen::RowVectorXd>& frame) {
    const Index n = model_.config.window_len;
    if (frame.size() != ring_.cols())
      throw DimensionError("frame channel count mismatch");
    ring_.row(seen_ % n) = frame;
    ++seen_;
    if (seen_ < n) return std::nullopt;
    const Index start = seen_ - n;
    if (start % model_.config.step != 0) return std::nullopt;

    Mat window(n, ring_.cols());
    const Index head = seen_ % n;  // oldest sample's slot
    window.topRows(n - head) = ring_.bottomRows(n - head);
    window.bottomRows(head) = ring_.topRows(head);

    const auto obs = detail::make_observation<Scalar>(
        window, model_.config.center_windows);
    const crc::ResidualVector res =
        crc::classify_one_shot(model_.dictionary, model_.op, obs);
    LabelRecord rec;
    rec.window_start = start;
    rec.internal_id = res.label;
    rec.label = map_labels_ ? model_.scheme.external_label(res.label)
                            : res.label;
    rec.margin = res.margin;
    return rec;
  }

 private:
  const Model<Scalar>& model_;
  bool map_labels_;
  Mat ring_;
  Index seen_ = 0;
};

/// Labels every step-aligned window of a recording.
template <typename Scalar>
LabelTimeline classify_stream(const Model<Scalar>& model,
                              const MultichannelRecording& rec,
                              bool map_labels = true) {
  rec.validate();
  if (rec.channels() != model.config.channels)
    throw DimensionError("recording channel count does not match model");
  if (rec.sample_rate_hz != model.config.sample_rate_hz)
    throw DataError("recording sample rate does not match model");
  if (rec.length() < model.config.window_len)
    throw DataError("recording shorter than one window");
  LabelTimeline out;
  out.window_len = model.config.window_len;
  out.step = model.config.step;
  out.records.reserve(
      size_t((rec.length() - model.config.window_len) / model.config.step + 1));
  StreamClassifier<Scalar> stream(model, map_labels);
  for (Index t = 0; t < rec.length(); ++t)
    if (auto rec_opt = stream.push(rec.samples.row(t)))
      out.records.push_back(*rec_opt);
  return out;
}

/// Batch variant over precomputed window groups, with an optional circular
/// shift applied per window (used for augmentation experiments).
template <typename Scalar>
LabelTimeline classify_groups(
    const Model<Scalar>& model, const std::vector<WindowGroup>& groups,
    bool map_labels = true,
    const std::function<Index(Index)>& shift_of = nullptr) {
  LabelTimeline out;
  out.window_len = model.config.window_len;
  out.step = model.config.step;
  out.records.reserve(groups.size());
  const Index n = model.config.window_len;
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    Mat window = groups[gi].samples;
    if (window.rows() != n || window.cols() != model.config.channels)
      throw DimensionError("window group shape does not match model");
    if (shift_of) {
      const Index s = ((shift_of(Index(gi)) % n) + n) % n;
      if (s != 0) {
        Mat rotated(n, window.cols());
        rotated.topRows(n - s) = window.bottomRows(n - s);
        rotated.bottomRows(s) = window.topRows(s);
        window = rotated;
      }
    }
    const auto obs =
        detail::make_observation<Scalar>(window, model.config.center_windows);
    const crc::ResidualVector res =
        crc::classify_one_shot(model.dictionary, model.op, obs);
    LabelRecord rec;
    rec.window_start = groups[gi].start;
    rec.internal_id = res.label;
    rec.label =
        map_labels ? model.scheme.external_label(res.label) : res.label;
    rec.margin = res.margin;
    out.records.push_back(rec);
  }
  return out;
}

struct EvaluationReport {
  double accuracy = 0.0;
  Index correct = 0;
  Index total = 0;
  Eigen::MatrixXi confusion;  ///< row = truth at window end, col = predicted
  std::vector<double> per_class_accuracy;  ///< -1 for classes never seen
  Index tolerance_windows = 0;
};

/// Scores a timeline against per-sample truth.  A window is judged at its
/// final sample; with a nonzero tolerance the prediction may match the truth
/// anywhere within +-tolerance_windows * step samples of that point, which
/// absorbs labeling jitter around phase switches.
inline EvaluationReport evaluate(const LabelTimeline& timeline,
                                 const std::vector<int>& truth,
                                 Index tolerance_windows = 0) {
  if (timeline.records.empty()) throw DataError("empty timeline");
  if (tolerance_windows < 0) throw ConfigError("negative tolerance");
  const Index last_end =
      timeline.records.back().window_start + timeline.window_len - 1;
  if (Index(truth.size()) <= last_end)
    throw DataError("truth is shorter than the labeled stream");

  int k = 0;
  for (const auto& r : timeline.records) {
    if (r.label < 1) throw DataError("labels must be >= 1");
    k = std::max(k, r.label);
  }
  for (int t : truth) {
    if (t < 1) throw DataError("truth labels must be >= 1");
    k = std::max(k, t);
  }

  EvaluationReport rep;
  rep.tolerance_windows = tolerance_windows;
  rep.confusion = Eigen::MatrixXi::Zero(k, k);
  std::vector<Index> class_total(size_t(k), 0), class_correct(size_t(k), 0);
  const Index slack = tolerance_windows * timeline.step;
  for (const auto& r : timeline.records) {
    const Index at = r.window_start + timeline.window_len - 1;
    const int strict = truth[size_t(at)];
    bool ok = r.label == strict;
    for (Index off = 1; !ok && off <= slack; ++off) {
      if (at >= off && truth[size_t(at - off)] == r.label) ok = true;
      if (at + off < Index(truth.size()) && truth[size_t(at + off)] == r.label)
        ok = true;
    }
    rep.confusion(strict - 1, r.label - 1) += 1;
    ++rep.total;
    ++class_total[size_t(strict - 1)];
    if (ok) {
      ++rep.correct;
      ++class_correct[size_t(strict - 1)];
    }
  }
  rep.accuracy = double(rep.correct) / double(rep.total);
  rep.per_class_accuracy.resize(size_t(k));
  for (int c = 0; c < k; ++c)
    rep.per_class_accuracy[size_t(c)] =
        class_total[size_t(c)] == 0
            ? -1.0
            : double(class_correct[size_t(c)]) / double(class_total[size_t(c)]);
  return rep;
}

struct ComparisonRow {
  double sigma = 0.0;
  EvaluationReport scrc;
  EvaluationReport crc;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  bool shift_augmented = false;
};

/// Trains spectral and time-domain models on the same couples and scores
/// both on one test stream, once per sigma value.  With shift augmentation
/// every test window is circularly rotated by a seed-derived offset (the
/// same rotation for both models), probing shift robustness.
inline ComparisonReport compare_crc_scrc(
    const std::vector<GestureCoupleRecording>& couples,
    const MultichannelRecording& test, const std::vector<int>& truth,
    const PipelineConfig& cfg, std::vector<double> sigmas = {},
    bool shift_augment = false, Index tolerance_windows = 0) {
  if (sigmas.empty()) sigmas.push_back(cfg.sigma);
  ComparisonReport report;
  report.shift_augmented = shift_augment;
  for (double sigma : sigmas) {
    PipelineConfig run = cfg;
    run.sigma = sigma;
    TrainResult<Complex> spectral_model = train<Complex>(couples, run);
    TrainResult<double> time_model = train<double>(couples, run);
    const std::vector<WindowGroup> groups = slide_windows(test, run);
    std::function<Index(Index)> shift_of;
    if (shift_augment) {
      const Index n = run.window_len;
      const std::uint64_t seed = run.seed;
      shift_of = [n, seed](Index w) {
        return Index(1 + mix_seed(seed, 0xA06u + std::uint64_t(w)) %
                             std::uint64_t(n - 1));
      };
    }
    LabelTimeline scrc_labels =
        classify_groups(spectral_model.model, groups, true, shift_of);
    LabelTimeline crc_labels =
        classify_groups(time_model.model, groups, true, shift_of);
    ComparisonRow row;
    row.sigma = sigma;
    row.scrc = evaluate(scrc_labels, truth, tolerance_windows);
    row.crc = evaluate(crc_labels, truth, tolerance_windows);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace scrc::pipeline
