#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "core/vec3.hpp"

namespace bw {

// Propagation speed used for all range math. Kept at 3e8 (not the exact
// physical constant) so the derived constants land on round numbers.
inline constexpr double kSpeedOfLight = 3e8;

// Full FMCW parameterization plus antenna geometry. All coordinates are in
// the head frame: origin at the headset center, +x right, +y down (radar
// boresight), +z forward, units meters.
struct RadarConfig {
  double start_freq_hz = 58e9;       // f0
  double end_freq_hz = 63e9;         // f1
  double adc_rate_hz = 1e6;          // fs
  uint32_t samples_per_chirp = 128;  // N
  uint32_t chirps_per_frame = 4;     // C
  double frame_rate_hz = 30.0;       // F
  double chirp_repetition_s = 5e-4;  // time between chirp starts within a frame
  double bandpass_low_hz = 80e3;
  double bandpass_high_hz = 500e3;
  uint32_t num_virtual_channels = 8;  // V
  std::vector<Vec3> channel_positions_m;
  double tx_amplitude = 1.0;
  double noise_std = 0.0;
  uint64_t rng_seed = 0;

  // Optional cosine^k boresight gain for the simulator; 0 = isotropic.
  double directivity_exponent = 0.0;
  // FFT window applied per chirp: "rect" (default) or "hann".
  std::string window_function = "rect";

  RadarConfig();

  double bandwidth_hz() const { return end_freq_hz - start_freq_hz; }
  // Active sweep time of one chirp, N / fs. This (not the repetition time)
  // sets the slope: it is the only choice under which the default config's
  // max range, Nyquist beat and band-pass low corner are mutually consistent.
  double chirp_duration_s() const { return samples_per_chirp / adc_rate_hz; }
  double slope_hz_per_s() const { return bandwidth_hz() / chirp_duration_s(); }
  uint32_t range_bins() const { return samples_per_chirp / 2 + 1; }

  // Throws Error(invalid_argument) describing the first violated invariant.
  void validate() const;
};

// Two clusters of four phase centers at x = -/+0.07 m (left/right bottom
// edge), 2.5 mm intra-cluster spacing (half wavelength at 60 GHz).
std::vector<Vec3> default_channel_positions();

// --- derived physics -------------------------------------------------------

// c / (2B): minimal displacement resolvable by the sweep.
double range_resolution(const RadarConfig& cfg);

// N * resolution / 2.
double max_range(const RadarConfig& cfg);

// Beat (IF) frequency of a target at range_m: 2 * R * S / c.
// Throws Error(range_out_of_bounds) outside [0, max_range].
double beat_frequency(const RadarConfig& cfg, double range_m);

// Center range of FFT bin `bin`; bin N/2 maps to max_range.
// Throws Error(bin_out_of_bounds) for bin > N/2.
double bin_to_range(const RadarConfig& cfg, uint32_t bin);

// Range whose beat frequency equals the band-pass low corner.
double min_detectable_range(const RadarConfig& cfg);

// --- serialization ----------------------------------------------------------

// Human-editable "key = value" text, one key per line, SI units, '#' comments.
std::string serialize_config(const RadarConfig& cfg);
RadarConfig parse_config(std::string_view text);
RadarConfig load_config_file(const std::string& path);
void save_config_file(const RadarConfig& cfg, const std::string& path);

// FNV-1a over the canonical serialization; recorded in output headers.
uint64_t config_hash(const RadarConfig& cfg);

inline constexpr const char* kToolVersion = "bodywave 0.1.0";

}  // namespace bw
