#pragma once

#include <cstdint>
#include <vector>

#include "core/config.hpp"
#include "motion/scene.hpp"

namespace bw::sim {

struct Frame {
  double timestamp_s = 0.0;
  // V x C x N real IF samples, channel-major: (v * C + c) * N + n.
  std::vector<double> samples;
};

struct RawFrameStream {
  RadarConfig cfg;
  uint64_t seed = 0;
  std::vector<Frame> frames;
  // chirps during which some scatterer exceeded max_range (its beat aliases,
  // matching physical behavior; informational, not fatal)
  uint64_t out_of_range_chirps = 0;

  size_t samples_per_frame() const {
    return static_cast<size_t>(cfg.num_virtual_channels) * cfg.chirps_per_frame *
           cfg.samples_per_chirp;
  }
  void validate() const;
};

// Synthesizes the IF signal every virtual channel digitizes. For each chirp
// the scatterer positions are frozen at the chirp start (stop-and-hop); each
// scatterer contributes a * cos(2 pi f_b tau + phi) with
//   f_b  = 2 R S / c,              R = scatterer-to-phase-center distance
//   phi  = 2 pi f0 (2R/c) mod 2pi
//   a    = tx_amplitude * rcs / max(R, 0.1)^2
// plus Gaussian noise with a per-frame substream of `seed`. Frames are
// synthesized in parallel; output is identical for every worker count.
RawFrameStream simulate(const motion::Scene& scene, const RadarConfig& cfg,
                        double duration_s, uint64_t seed);

}  // namespace bw::sim
