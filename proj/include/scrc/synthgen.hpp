// synthgen.hpp -- seeded synthetic gesture streams with ground truth.
//
// Each class is a per-channel band-limited noise process: white Gaussian
// noise shaped in the frequency domain to the class's band, scaled to unit
// RMS and then by a per-channel amplitude.  A scripted label sequence mixes
// the class processes with piecewise-linear cross-fade envelopes; ramp
// samples carry the destination segment's truth label.  All randomness is
// derived from one seed through fixed per-(label, channel) substreams, so a
// given script and seed reproduce byte-identical output regardless of
// generation order.
#pragma once

#include "scrc/common.hpp"
#include "scrc/recording.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace scrc::synth {

/// Spectral signature of one class: a passband and an amplitude per channel,
/// plus a small white accompaniment floor.
struct ClassSignature {
  std::vector<double> band_low;   ///< normalized frequency, 0..0.5
  std::vector<double> band_high;
  std::vector<double> amplitude;
  double noise_floor = 0.05;
};

struct SynthConfig {
  int channels = 8;
  double sample_rate_hz = 200.0;
  Index half_period = 100;  ///< samples per phase in a gesture couple
  Index ramp = 8;           ///< cross-fade length between segments
  std::vector<ClassSignature> signatures;  ///< index = external label - 1

  static SynthConfig defaults();
};

/// External label ids.  Label 1 is the relax state; labels 2..6 are the
/// active gestures.
inline constexpr int kRelaxLabel = 1;
inline const char* label_name(int label) {
  switch (label) {
    case 1: return "relax";
    case 2: return "fist";
    case 3: return "wave-in";
    case 4: return "wave-out";
    case 5: return "spread";
    case 6: return "double-tap";
    default: return "unknown";
  }
}

/// One scripted segment: `duration` samples of `label`, the first `ramp` of
/// which cross-fade from the previous segment (ramp is ignored for the first
/// segment).
struct ScriptSegment {
  int label = 1;
  Index duration = 0;
  Index ramp = 0;
};

struct ScriptedSequence {
  std::vector<ScriptSegment> segments;
};

struct LabeledRecording {
  MultichannelRecording recording;
  std::vector<int> truth;  ///< external label per sample
};

inline SynthConfig SynthConfig::defaults() {
  SynthConfig cfg;
  cfg.signatures.resize(6);
  const int c = cfg.channels;
  // Relax: low-amplitude high-band tremor on every channel, parked above
  // the gesture bands so it occupies its own narrow slice of the spectrum.
  ClassSignature& relax = cfg.signatures[0];
  relax.band_low.assign(size_t(c), 0.47);
  relax.band_high.assign(size_t(c), 0.498);
  relax.amplitude.assign(size_t(c), 0.6);
  relax.noise_floor = 0.05;
  // Active gestures: staggered narrow bands that brush against their
  // neighbors only through the per-channel shifts, with a smooth amplitude
  // lobe so each gesture favors a different part of the array.
  for (int g = 0; g < 5; ++g) {
    ClassSignature& sig = cfg.signatures[size_t(g + 1)];
    const double center = 0.08 + 0.07 * g;
    const double lobe_center = 1.75 * g;  // sweeps across the 8 channels
    sig.band_low.resize(size_t(c));
    sig.band_high.resize(size_t(c));
    sig.amplitude.resize(size_t(c));
    for (int ch = 0; ch < c; ++ch) {
      const double shift = 0.004 * (ch % 3);
      sig.band_low[size_t(ch)] = center - 0.035 + shift;
      sig.band_high[size_t(ch)] = center + 0.035 + shift;
      const double d = std::abs(ch - lobe_center);
      const double lobe = d < 3.0 ? std::cos(d * std::numbers::pi / 6.0) : 0.0;
      sig.amplitude[size_t(ch)] = 0.4 + 0.8 * lobe;
    }
    sig.noise_floor = 0.05;
  }
  return cfg;
}

namespace detail {

/// Unit-RMS white Gaussian stream of length n from a dedicated substream.
inline Vec white_stream(std::uint64_t seed, std::uint64_t key_a,
                        std::uint64_t key_b, Index n) {
  std::mt19937_64 rng(mix_seed(mix_seed(seed, key_a), key_b));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec out(n);
  for (Index i = 0; i < n; ++i) out[i] = gauss(rng);
  const double rms = std::sqrt(out.squaredNorm() / double(n));
  if (rms > 0.0) out /= rms;
  return out;
}

/// Band-limits a real signal by zeroing DFT bins outside [low, high]
/// (normalized frequency), then rescales to unit RMS.
inline Vec band_limit(const Vec& x, double low, double high) {
  const Index n = x.size();
  thread_local Eigen::FFT<double> fft;
  std::vector<double> in(x.data(), x.data() + n);
  std::vector<Complex> spec;
  fft.fwd(spec, in);
  for (Index k = 0; k < n; ++k) {
    const double freq =
        double(k <= n / 2 ? k : n - k) / double(n);  // 0..0.5
    if (freq < low || freq > high) spec[size_t(k)] = Complex(0.0, 0.0);
  }
  std::vector<double> back;
  fft.inv(back, spec);
  Vec out = Eigen::Map<const Vec>(back.data(), n);
  const double rms = std::sqrt(out.squaredNorm() / double(n));
  if (rms > 1e-30) out /= rms;
  return out;
}

}  // namespace detail

/// Generates a recording plus per-sample truth from a scripted sequence.
inline LabeledRecording gen_sequence(const ScriptedSequence& script,
                                     const SynthConfig& cfg,
                                     std::uint64_t seed) {
  if (script.segments.empty()) throw DataError("empty script");
  if (cfg.channels < 1 || !(cfg.sample_rate_hz > 0.0))
    throw ConfigError("bad channel count or sample rate");
  Index total = 0;
  for (const auto& seg : script.segments) {
    if (seg.duration < 1) throw DataError("segment duration must be positive");
    if (seg.ramp < 0 || seg.ramp > seg.duration)
      throw DataError("segment ramp must fit inside the segment");
    if (seg.label < 1 || size_t(seg.label) > cfg.signatures.size())
      throw DataError("segment label " + std::to_string(seg.label) +
                      " has no signature");
    const ClassSignature& sig = cfg.signatures[size_t(seg.label - 1)];
    if (Index(sig.band_low.size()) != cfg.channels ||
        Index(sig.band_high.size()) != cfg.channels ||
        Index(sig.amplitude.size()) != cfg.channels)
      throw ConfigError("signature channel count mismatch for label " +
                        std::to_string(seg.label));
    for (int ch = 0; ch < cfg.channels; ++ch) {
      const double lo = sig.band_low[size_t(ch)];
      const double hi = sig.band_high[size_t(ch)];
      if (!(0.0 <= lo && lo < hi && hi <= 0.5))
        throw ConfigError("signature band must satisfy 0 <= low < high <= 0.5");
    }
    total += seg.duration;
  }

  // Per-label envelopes with linear cross-fades.  Ramps live at the start of
  // the incoming segment; envelope weights always sum to 1.
  std::vector<int> labels_used;
  for (const auto& seg : script.segments)
    if (std::find(labels_used.begin(), labels_used.end(), seg.label) ==
        labels_used.end())
      labels_used.push_back(seg.label);

  LabeledRecording out;
  out.recording.sample_rate_hz = cfg.sample_rate_hz;
  out.recording.samples = Mat::Zero(total, cfg.channels);
  out.truth.assign(size_t(total), 0);

  std::vector<std::pair<int, Vec>> envelopes;  // label -> weight over time
  for (int lab : labels_used) envelopes.emplace_back(lab, Vec::Zero(total));
  auto env_of = [&](int lab) -> Vec& {
    for (auto& [l, e] : envelopes)
      if (l == lab) return e;
    throw DataError("internal: missing envelope");
  };

  Index t = 0;
  for (size_t s = 0; s < script.segments.size(); ++s) {
    const auto& seg = script.segments[s];
    const Index ramp = (s == 0) ? 0 : seg.ramp;
    const int prev = (s == 0) ? seg.label : script.segments[s - 1].label;
    Vec& inc = env_of(seg.label);
    Vec& dec = env_of(prev);
    for (Index i = 0; i < seg.duration; ++i) {
      const Index at = t + i;
      out.truth[size_t(at)] = seg.label;
      if (i < ramp && seg.label != prev) {
        const double w = double(i + 1) / double(ramp + 1);
        inc[at] += w;
        dec[at] += 1.0 - w;
      } else {
        inc[at] += 1.0;
      }
    }
    t += seg.duration;
  }

  // Mix the class processes under their envelopes.
  for (int lab : labels_used) {
    const ClassSignature& sig = cfg.signatures[size_t(lab - 1)];
    const Vec& env = env_of(lab);
    for (int ch = 0; ch < cfg.channels; ++ch) {
      Vec raw = detail::white_stream(seed, std::uint64_t(lab),
                                     std::uint64_t(ch), total);
      Vec shaped = detail::band_limit(raw, sig.band_low[size_t(ch)],
                                      sig.band_high[size_t(ch)]);
      out.recording.samples.col(ch).array() +=
          env.array() * shaped.array() * sig.amplitude[size_t(ch)];
    }
  }
  // White accompaniment floor, weighted by the active signature's floor.
  Vec floor_weight = Vec::Zero(total);
  for (int lab : labels_used)
    floor_weight +=
        env_of(lab) * cfg.signatures[size_t(lab - 1)].noise_floor;
  for (int ch = 0; ch < cfg.channels; ++ch) {
    Vec white = detail::white_stream(seed, 0, std::uint64_t(ch), total);
    out.recording.samples.col(ch).array() +=
        floor_weight.array() * white.array();
  }
  out.recording.validate();
  return out;
}

/// Generates one training couple: `cycles` repetitions of gesture phase then
/// relax phase, each cfg.half_period samples long.
inline LabeledRecording gen_couple(int gesture_id, int cycles,
                                   const SynthConfig& cfg,
                                   std::uint64_t seed) {
  if (gesture_id < 1 || size_t(gesture_id + 1) > cfg.signatures.size())
    throw ConfigError("gesture id " + std::to_string(gesture_id) +
                      " has no signature");
  if (cycles < 1) throw ConfigError("cycle count must be positive");
  if (cfg.half_period < 2) throw ConfigError("half period too short");
  ScriptedSequence script;
  for (int cyc = 0; cyc < cycles; ++cyc) {
    script.segments.push_back(
        {gesture_id + 1, cfg.half_period, cyc == 0 ? 0 : cfg.ramp});
    script.segments.push_back({kRelaxLabel, cfg.half_period, cfg.ramp});
  }
  return gen_sequence(script, cfg, seed);
}

}  // namespace scrc::synth
