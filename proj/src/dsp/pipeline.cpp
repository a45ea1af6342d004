#include "dsp/pipeline.hpp"

#include <cmath>

#include "core/error.hpp"
#include "dsp/fft.hpp"

namespace bw::dsp {

void RangeProfileTensor::validate() const {
  require(values.size() == static_cast<size_t>(channels) * columns * bins,
          Errc::shape_mismatch, "profile value count != channels*columns*bins");
  require(column_timestamps_s.size() == columns, Errc::shape_mismatch,
          "profile timestamp count != columns");
  for (size_t i = 1; i < column_timestamps_s.size(); ++i)
    require(column_timestamps_s[i] > column_timestamps_s[i - 1], Errc::invalid_argument,
            "column timestamps must be strictly increasing");
}

std::vector<double> chirp_magnitude_column(std::span<const double> samples,
                                           const RadarConfig& cfg) {
  require(samples.size() == cfg.samples_per_chirp, Errc::shape_mismatch,
          "chirp sample count != samples_per_chirp");
  if (cfg.window_function == "hann") {
    const size_t n = samples.size();
    std::vector<double> windowed(n);
    for (size_t i = 0; i < n; ++i) {
      double w = 0.5 - 0.5 * std::cos(2.0 * 3.14159265358979323846 * i / (n - 1));
      windowed[i] = samples[i] * w;
    }
    return real_fft_magnitude(windowed);
  }
  return real_fft_magnitude(samples);
}

RangeProfileTensor range_profile(const sim::RawFrameStream& stream) {
  const RadarConfig& cfg = stream.cfg;
  const uint32_t V = cfg.num_virtual_channels;
  const uint32_t C = cfg.chirps_per_frame;
  const uint32_t N = cfg.samples_per_chirp;

  RangeProfileTensor profile;
  profile.channels = V;
  profile.bins = N / 2 + 1;
  profile.columns = stream.frames.size() * static_cast<size_t>(C);
  profile.values.assign(static_cast<size_t>(V) * profile.columns * profile.bins, 0.0);
  profile.column_timestamps_s.resize(profile.columns);

  const long total = static_cast<long>(profile.columns);
#pragma omp parallel for schedule(static)
  for (long col = 0; col < total; ++col) {
    const size_t f = static_cast<size_t>(col) / C;
    const uint32_t c = static_cast<uint32_t>(col % C);
    const sim::Frame& frame = stream.frames[f];
    profile.column_timestamps_s[col] = frame.timestamp_s + c * cfg.chirp_repetition_s;
    for (uint32_t v = 0; v < V; ++v) {
      std::span<const double> chirp{
          frame.samples.data() + (static_cast<size_t>(v) * C + c) * N, N};
      std::vector<double> mag = chirp_magnitude_column(chirp, cfg);
      double* dst = profile.values.data() +
                    (static_cast<size_t>(v) * profile.columns + col) * profile.bins;
      for (uint32_t b = 0; b < profile.bins; ++b) dst[b] = mag[b];
    }
  }
  return profile;
}

uint32_t first_passband_bin(const RadarConfig& cfg) {
  const double df = cfg.adc_rate_hz / cfg.samples_per_chirp;
  uint32_t bin = 0;
  while (bin * df < cfg.bandpass_low_hz) ++bin;
  return bin;
}

uint32_t last_passband_bin(const RadarConfig& cfg) {
  const double df = cfg.adc_rate_hz / cfg.samples_per_chirp;
  uint32_t last = cfg.samples_per_chirp / 2;
  while (last > 0 && last * df > cfg.bandpass_high_hz + 1e-9) --last;
  return last;
}

void bandpass_mask(RangeProfileTensor& profile, const RadarConfig& cfg) {
  require(profile.bins == cfg.samples_per_chirp / 2 + 1, Errc::shape_mismatch,
          "profile bin count != N/2+1");
  const uint32_t lo = first_passband_bin(cfg);
  const uint32_t hi = last_passband_bin(cfg);
  for (uint32_t v = 0; v < profile.channels; ++v) {
    for (size_t col = 0; col < profile.columns; ++col) {
      double* c = profile.values.data() +
                  (static_cast<size_t>(v) * profile.columns + col) * profile.bins;
      for (uint32_t b = 0; b < lo; ++b) c[b] = 0.0;
      for (uint32_t b = hi + 1; b < profile.bins; ++b) c[b] = 0.0;
    }
  }
}

RangeProfileTensor successive_subtraction(const RangeProfileTensor& profile) {
  require(profile.columns >= 2, Errc::too_few_columns,
          "successive subtraction needs at least 2 columns");
  RangeProfileTensor out;
  out.channels = profile.channels;
  out.bins = profile.bins;
  out.columns = profile.columns - 1;
  out.values.resize(static_cast<size_t>(out.channels) * out.columns * out.bins);
  out.column_timestamps_s.assign(profile.column_timestamps_s.begin() + 1,
                                 profile.column_timestamps_s.end());
  for (uint32_t v = 0; v < out.channels; ++v) {
    for (size_t col = 0; col < out.columns; ++col) {
      const double* prev = profile.values.data() +
                           (static_cast<size_t>(v) * profile.columns + col) * profile.bins;
      const double* next = prev + profile.bins;
      double* dst = out.values.data() +
                    (static_cast<size_t>(v) * out.columns + col) * out.bins;
      for (uint32_t b = 0; b < out.bins; ++b) dst[b] = next[b] - prev[b];
    }
  }
  return out;
}

RangeProfileTensor processed_profile(const sim::RawFrameStream& stream) {
  RangeProfileTensor profile = range_profile(stream);
  bandpass_mask(profile, stream.cfg);
  return successive_subtraction(profile);
}

uint32_t window_columns(const RadarConfig& cfg) {
  long frames = std::lround(0.5 * cfg.frame_rate_hz);
  if (frames < 1) frames = 1;
  return static_cast<uint32_t>(frames) * cfg.chirps_per_frame;
}

WindowDataset make_windows(const RangeProfileTensor& profile,
                           const motion::PoseSequence& poses, const RadarConfig& cfg) {
  const uint32_t wcols = window_columns(cfg);
  require(profile.columns >= wcols, Errc::insufficient_columns,
          "profile has fewer columns than one window (" + std::to_string(profile.columns) +
              " < " + std::to_string(wcols) + ")");
  require(!poses.empty(), Errc::empty_dataset, "pose sequence is empty");

  WindowDataset ds;
  ds.channels = profile.channels;
  ds.cols = wcols;
  ds.bins = profile.bins;

  const uint32_t stride = cfg.chirps_per_frame;  // one frame
  const size_t n_windows = (profile.columns - wcols) / stride + 1;
  const size_t elems = ds.tensor_elems();
  ds.tensors.resize(n_windows * elems);
  ds.labels.resize(n_windows * 39);
  ds.start_times_s.resize(n_windows);

  for (size_t w = 0; w < n_windows; ++w) {
    const size_t s = w * stride;
    ds.start_times_s[w] = profile.column_timestamps_s[s];

    // label: pose of the frame containing the window's last column
    const double t_end = profile.column_timestamps_s[s + wcols - 1];
    const size_t frame = static_cast<size_t>(std::floor(t_end * cfg.frame_rate_hz + 1e-9));
    require(frame < poses.size(), Errc::length_mismatch,
            "pose sequence does not cover the profile time span");
    const motion::Pose& pose = poses.frames[frame];
    for (int j = 0; j < motion::kNumJoints; ++j) {
      ds.labels[w * 39 + 3 * j + 0] = static_cast<float>(pose[j].x);
      ds.labels[w * 39 + 3 * j + 1] = static_cast<float>(pose[j].y);
      ds.labels[w * 39 + 3 * j + 2] = static_cast<float>(pose[j].z);
    }

    float* dst = ds.tensors.data() + w * elems;
    const size_t slab = static_cast<size_t>(wcols) * profile.bins;
    for (uint32_t v = 0; v < profile.channels; ++v) {
      const double* src = profile.values.data() +
                          (static_cast<size_t>(v) * profile.columns + s) * profile.bins;
      double mean = 0.0;
      for (size_t i = 0; i < slab; ++i) mean += src[i];
      mean /= static_cast<double>(slab);
      double var = 0.0;
      for (size_t i = 0; i < slab; ++i) {
        double d = src[i] - mean;
        var += d * d;
      }
      var /= static_cast<double>(slab);
      const double inv = 1.0 / (std::sqrt(var) + 1e-8);
      float* out = dst + static_cast<size_t>(v) * slab;
      for (size_t i = 0; i < slab; ++i)
        out[i] = static_cast<float>((src[i] - mean) * inv);
    }
  }
  return ds;
}

}  // namespace bw::dsp
