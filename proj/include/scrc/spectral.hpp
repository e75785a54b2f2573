// spectral.hpp -- circulant embeddings of signal windows and their DFT
// eigenvalue features.
//
// A window a of length n is identified with the circulant matrix whose first
// row is a; its eigenvalues are the unnormalized forward DFT of a with kernel
// exp(-2*pi*i/n).  Computing them through an FFT gives an O(n log n) feature
// transform that is equivariant under circular shifts: shifting the window
// rotates the phase of each eigenvalue but leaves the magnitudes untouched.
#pragma once

#include "scrc/common.hpp"

#include <unsupported/Eigen/FFT>

#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace scrc::spectral {

/// A fixed-length window cut from one channel of a recording.
struct SignalWindow {
  Vec samples;
  Index start_index = 0;  ///< index of the first sample in the source stream
  int channel_id = 0;
};

/// Circulant matrix, stored by its first row.  Row j is the first row
/// circularly shifted j places to the right.
class CirculantMatrix {
 public:
  explicit CirculantMatrix(Vec first_row) : first_row_(std::move(first_row)) {
    if (first_row_.size() < 2)
      throw DimensionError("circulant order must be at least 2");
    if (!all_finite(first_row_))
      throw NumericError("circulant first row has non-finite entries");
  }

  const Vec& first_row() const { return first_row_; }
  Index order() const { return first_row_.size(); }

  /// Dense n x n form; entry (j, k) = first_row[(k - j) mod n].
  Mat materialize() const {
    const Index n = order();
    Mat c(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k) c(j, k) = first_row_[(k - j + n) % n];
    return c;
  }

 private:
  Vec first_row_;
};

inline CirculantMatrix circulant_from_vector(const Vec& a) {
  return CirculantMatrix(a);
}

/// Unitary DFT matrix of order n: F(j, k) = w^(jk) / sqrt(n) with
/// w = exp(-2*pi*i/n).
inline CMat dft_matrix(Index n) {
  if (n < 2) throw DimensionError("DFT order must be at least 2");
  CMat f(n, n);
  const double scale = 1.0 / std::sqrt(double(n));
  const double base = -2.0 * std::numbers::pi / double(n);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k) {
      // reduce jk mod n first so the angle stays small for large n
      const double angle = base * double((j * k) % n);
      f(j, k) = scale * Complex(std::cos(angle), std::sin(angle));
    }
  return f;
}

/// Eigenvalues of circ(a) in DFT bin order: lambda_k = sum_j a_j w^(jk).
/// This is the unnormalized forward DFT of a, evaluated with an FFT.
inline CVec eigenvalues_fast(const Vec& a) {
  if (a.size() < 2) throw DimensionError("window length must be at least 2");
  if (!all_finite(a)) throw NumericError("window has non-finite samples");
  thread_local Eigen::FFT<double> fft;
  thread_local std::vector<double> in;
  thread_local std::vector<Complex> out;
  in.assign(a.data(), a.data() + a.size());
  fft.fwd(out, in);  // full spectrum, unnormalized
  return Eigen::Map<const CVec>(out.data(), Index(out.size()));
}

/// Reference eigenvalues via a dense (non-FFT) eigensolver, for cross
/// checking.  Orders the result to match eigenvalues_fast by greedy nearest
/// matching, which is well defined when eigenvalues are pairwise distinct
/// relative to the matching tolerance.  Guarded to small orders: dense
/// eigensolving is O(n^3).
inline CVec eigenvalues_dense(const CirculantMatrix& c, Index max_order = 256) {
  const Index n = c.order();
  if (n > max_order)
    throw ConfigError("dense eigensolver guard: order " + std::to_string(n) +
                      " exceeds cap " + std::to_string(max_order));
  Eigen::ComplexEigenSolver<CMat> es(c.materialize().cast<Complex>(), false);
  if (es.info() != Eigen::Success)
    throw NumericError("dense eigensolver failed to converge");
  CVec unordered = es.eigenvalues();
  CVec fast = eigenvalues_fast(c.first_row());
  CVec matched(n);
  std::vector<bool> used(size_t(n), false);
  for (Index k = 0; k < n; ++k) {
    Index best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      if (used[size_t(j)]) continue;
      const double d = std::abs(unordered[j] - fast[k]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    used[size_t(best)] = true;
    matched[k] = unordered[best];
  }
  return matched;
}

/// Concatenated eigenvalue features of one multichannel window group.
struct SpectralFeatureVector {
  CVec values;            ///< length n * channels, channel-major blocks
  Index window_start = 0;
};

/// Transforms a group of per-channel windows (same start, same length) into
/// one stacked eigenvalue feature vector.  When `center` is set, each
/// channel's window mean is removed before the transform so the DC bin
/// carries no offset.
inline SpectralFeatureVector extract_features(
    std::span<const SignalWindow> windows, bool center = true) {
  if (windows.empty()) throw DimensionError("empty window group");
  const Index n = windows[0].samples.size();
  const Index start = windows[0].start_index;
  for (const auto& w : windows) {
    if (w.samples.size() != n)
      throw DimensionError("window group mixes window lengths");
    if (w.start_index != start)
      throw DimensionError("window group mixes start indices");
  }
  SpectralFeatureVector out;
  out.window_start = start;
  out.values.resize(n * Index(windows.size()));
  for (Index ch = 0; ch < Index(windows.size()); ++ch) {
    const Vec& s = windows[size_t(ch)].samples;
    if (center) {
      Vec centered = s.array() - s.mean();
      out.values.segment(ch * n, n) = eigenvalues_fast(centered);
    } else {
      out.values.segment(ch * n, n) = eigenvalues_fast(s);
    }
  }
  return out;
}

}  // namespace scrc::spectral
