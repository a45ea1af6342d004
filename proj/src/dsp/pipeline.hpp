#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/config.hpp"
#include "motion/pose.hpp"
#include "sim/simulator.hpp"

namespace bw::dsp {

// Multi-channel 2D depth spectrogram: one column per chirp across all
// frames (chirps are never averaged within a frame — each keeps its own
// time column), bins = N/2 + 1. After subtraction, values are signed
// differences.
struct RangeProfileTensor {
  uint32_t channels = 0;
  uint32_t bins = 0;
  size_t columns = 0;
  std::vector<double> values;  // [channel][column][bin]
  std::vector<double> column_timestamps_s;

  double& at(uint32_t ch, size_t col, uint32_t bin) {
    return values[(static_cast<size_t>(ch) * columns + col) * bins + bin];
  }
  double at(uint32_t ch, size_t col, uint32_t bin) const {
    return values[(static_cast<size_t>(ch) * columns + col) * bins + bin];
  }
  std::span<const double> column(uint32_t ch, size_t col) const {
    return {values.data() + (static_cast<size_t>(ch) * columns + col) * bins, bins};
  }
  void validate() const;
};

// Magnitude column of one chirp: one-sided FFT of its N samples.
// Applies cfg.window_function. Throws ShapeMismatch on a wrong sample count.
std::vector<double> chirp_magnitude_column(std::span<const double> samples,
                                           const RadarConfig& cfg);

// Every chirp of every frame, processed independently, per channel.
RangeProfileTensor range_profile(const sim::RawFrameStream& stream);

// Zeroes bins whose center frequency falls outside
// [bandpass_low_hz, bandpass_high_hz]. For the default config this blanks
// bins 0..10 and leaves the rest (the upper corner is Nyquist).
void bandpass_mask(RangeProfileTensor& profile, const RadarConfig& cfg);
uint32_t first_passband_bin(const RadarConfig& cfg);
uint32_t last_passband_bin(const RadarConfig& cfg);

// Column-wise temporal differencing: output column k = input k+1 - input k.
// Suppresses static reflections exactly; drops the first column.
// Throws TooFewColumns for fewer than 2 columns.
RangeProfileTensor successive_subtraction(const RangeProfileTensor& profile);

// Model-ready sliding windows plus their pose labels, float32 storage.
struct WindowDataset {
  uint32_t channels = 0;
  uint32_t cols = 0;  // columns per window (60 for the default config)
  uint32_t bins = 0;
  std::vector<float> tensors;        // n * channels * cols * bins, normalized
  std::vector<float> labels;         // n * 39 (pose at the window-end frame)
  std::vector<double> start_times_s;

  size_t size() const { return start_times_s.size(); }
  size_t tensor_elems() const {
    return static_cast<size_t>(channels) * cols * bins;
  }
  const float* tensor(size_t i) const { return tensors.data() + i * tensor_elems(); }
  const float* label(size_t i) const { return labels.data() + i * 39; }
};

// range_profile -> bandpass_mask -> successive_subtraction.
RangeProfileTensor processed_profile(const sim::RawFrameStream& stream);

// Columns per 0.5 s window: half a second of frames times chirps per frame.
uint32_t window_columns(const RadarConfig& cfg);

// Sliding windows of window_columns(cfg) consecutive columns, stride one
// frame (C columns). Each window is labeled with the pose of the frame
// containing its last column and normalized per channel slab:
// (x - mean) / (std + 1e-8). Throws InsufficientColumns when the profile is
// shorter than one window.
WindowDataset make_windows(const RangeProfileTensor& profile,
                           const motion::PoseSequence& poses, const RadarConfig& cfg);

}  // namespace bw::dsp
