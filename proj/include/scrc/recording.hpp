// recording.hpp -- in-memory multichannel sample streams.
#pragma once

#include "scrc/common.hpp"

namespace scrc {

/// Uniformly sampled multichannel recording; one column per channel.
struct MultichannelRecording {
  Mat samples;  ///< length x channels
  double sample_rate_hz = 200.0;

  Index length() const { return samples.rows(); }
  int channels() const { return int(samples.cols()); }

  void validate() const {
    if (length() < 1 || channels() < 1)
      throw DimensionError("recording is empty");
    if (!(sample_rate_hz > 0.0))
      throw ConfigError("sample rate must be positive");
    if (!all_finite(samples))
      throw NumericError("recording has non-finite samples");
  }
};

}  // namespace scrc
