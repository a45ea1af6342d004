#include "sim/simulator.hpp"

#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace bw::sim {

void RawFrameStream::validate() const {
  cfg.validate();
  const size_t per_frame = samples_per_frame();
  const double dt = 1.0 / cfg.frame_rate_hz;
  for (size_t i = 0; i < frames.size(); ++i) {
    require(frames[i].samples.size() == per_frame, Errc::shape_mismatch,
            "frame sample count != V*C*N");
    if (i > 0)
      require(std::abs(frames[i].timestamp_s - frames[i - 1].timestamp_s - dt) < 1e-9,
              Errc::invalid_argument, "frame timestamps must be spaced 1/frame_rate");
    for (double s : frames[i].samples)
      require(std::isfinite(s), Errc::non_finite, "non-finite IF sample");
  }
}

RawFrameStream simulate(const motion::Scene& scene, const RadarConfig& cfg,
                        double duration_s, uint64_t seed) {
  cfg.validate();
  require(duration_s > 0, Errc::invalid_argument, "duration must be positive");

  RawFrameStream stream;
  stream.cfg = cfg;
  stream.seed = seed;

  const long n_frames = std::lround(duration_s * cfg.frame_rate_hz);
  const uint32_t V = cfg.num_virtual_channels;
  const uint32_t C = cfg.chirps_per_frame;
  const uint32_t N = cfg.samples_per_chirp;
  const double slope = cfg.slope_hz_per_s();
  const double rmax = max_range(cfg);
  const double two_pi = 2.0 * 3.14159265358979323846;

  stream.frames.resize(n_frames);

  uint64_t oor_total = 0;
#pragma omp parallel for schedule(static) reduction(+ : oor_total)
  for (long f = 0; f < n_frames; ++f) {
    Frame& frame = stream.frames[f];
    frame.timestamp_s = static_cast<double>(f) / cfg.frame_rate_hz;
    frame.samples.assign(stream.samples_per_frame(), 0.0);

    for (uint32_t c = 0; c < C; ++c) {
      const double t_chirp = frame.timestamp_s + c * cfg.chirp_repetition_s;
      bool chirp_oor = false;
      for (const auto& track : scene) {
        const Vec3 pos = track.position_fn(t_chirp);
        for (uint32_t v = 0; v < V; ++v) {
          const Vec3 rel = pos - cfg.channel_positions_m[v];
          const double r = rel.norm();
          if (r > rmax) chirp_oor = true;
          double amp = cfg.tx_amplitude * track.rcs / (std::max(r, 0.1) * std::max(r, 0.1));
          if (cfg.directivity_exponent > 0.0 && r > 0.0) {
            double cos_bore = rel.y / r;  // boresight is +y (downward)
            amp *= cos_bore > 0.0 ? std::pow(cos_bore, cfg.directivity_exponent) : 0.0;
          }
          const double f_beat = 2.0 * r * slope / kSpeedOfLight;
          const double phase = std::fmod(two_pi * cfg.start_freq_hz * (2.0 * r / kSpeedOfLight), two_pi);
          const double step = two_pi * f_beat / cfg.adc_rate_hz;  // rad per sample
          // rotating-phasor recurrence instead of a cos() per sample
          double re = std::cos(phase), im = std::sin(phase);
          const double cs = std::cos(step), sn = std::sin(step);
          double* dst = frame.samples.data() + (static_cast<size_t>(v) * C + c) * N;
          for (uint32_t n = 0; n < N; ++n) {
            dst[n] += amp * re;
            const double nre = re * cs - im * sn;
            im = re * sn + im * cs;
            re = nre;
          }
        }
      }
      if (chirp_oor) ++oor_total;
    }

    if (cfg.noise_std > 0.0) {
      Rand rng(derive_seed(seed, 0x4e4f4953ULL, static_cast<uint64_t>(f)));
      for (double& s : frame.samples) s += cfg.noise_std * rng.normal();
    }
  }
  stream.out_of_range_chirps = oor_total;
  return stream;
}

}  // namespace bw::sim
