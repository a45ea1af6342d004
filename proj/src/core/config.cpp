#include "core/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace bw {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& s) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    require(pos == s.size(), Errc::invalid_argument, "trailing junk in value for " + key);
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(Errc::invalid_argument, "bad numeric value for " + key + ": '" + s + "'");
  }
}

uint64_t parse_u64(const std::string& key, const std::string& s) {
  try {
    size_t pos = 0;
    uint64_t v = std::stoull(s, &pos);
    require(pos == s.size(), Errc::invalid_argument, "trailing junk in value for " + key);
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(Errc::invalid_argument, "bad integer value for " + key + ": '" + s + "'");
  }
}

std::string trim(std::string s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  size_t b = s.find_last_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

}  // namespace

RadarConfig::RadarConfig() : channel_positions_m(default_channel_positions()) {}

std::vector<Vec3> default_channel_positions() {
  std::vector<Vec3> p;
  const double spacing = 2.5e-3;
  for (double center : {-0.07, 0.07}) {
    for (int k = 0; k < 4; ++k) {
      p.push_back({center + (k - 1.5) * spacing, 0.0, 0.0});
    }
  }
  return p;
}

void RadarConfig::validate() const {
  require(start_freq_hz > 0 && end_freq_hz > 0, Errc::invalid_argument, "carrier frequencies must be positive");
  require(end_freq_hz > start_freq_hz, Errc::invalid_argument, "end_freq_hz must exceed start_freq_hz (bandwidth > 0)");
  require(adc_rate_hz > 0, Errc::invalid_argument, "adc_rate_hz must be positive");
  require(samples_per_chirp >= 2, Errc::invalid_argument, "samples_per_chirp must be >= 2");
  require(chirps_per_frame >= 1, Errc::invalid_argument, "chirps_per_frame must be >= 1");
  require(frame_rate_hz > 0, Errc::invalid_argument, "frame_rate_hz must be positive");
  require(chirp_repetition_s > 0, Errc::invalid_argument, "chirp_repetition_s must be positive");
  require(samples_per_chirp / adc_rate_hz <= chirp_repetition_s + 1e-15,
          Errc::invalid_argument, "chirp does not fit its repetition slot (N/fs > chirp_repetition_s)");
  require(bandpass_low_hz >= 0, Errc::invalid_argument, "bandpass_low_hz must be >= 0");
  require(bandpass_high_hz >= bandpass_low_hz, Errc::invalid_argument, "bandpass_high_hz must be >= bandpass_low_hz");
  require(bandpass_high_hz <= adc_rate_hz / 2 + 1e-9, Errc::invalid_argument,
          "bandpass_high_hz must not exceed Nyquist (adc_rate_hz / 2)");
  require(num_virtual_channels >= 1, Errc::invalid_argument, "num_virtual_channels must be >= 1");
  require(num_virtual_channels == channel_positions_m.size(), Errc::invalid_argument,
          "num_virtual_channels must equal the number of channel positions");
  for (const auto& p : channel_positions_m)
    require(p.finite(), Errc::invalid_argument, "channel positions must be finite");
  require(chirps_per_frame * chirp_repetition_s <= 1.0 / frame_rate_hz + 1e-15,
          Errc::invalid_argument, "chirps do not fit within one frame period");
  require(tx_amplitude >= 0, Errc::invalid_argument, "tx_amplitude must be >= 0");
  require(noise_std >= 0, Errc::invalid_argument, "noise_std must be >= 0");
  require(directivity_exponent >= 0, Errc::invalid_argument, "directivity_exponent must be >= 0");
  require(window_function == "rect" || window_function == "hann",
          Errc::invalid_argument, "window_function must be 'rect' or 'hann'");
}

double range_resolution(const RadarConfig& cfg) {
  return kSpeedOfLight / (2.0 * cfg.bandwidth_hz());
}

double max_range(const RadarConfig& cfg) {
  return cfg.samples_per_chirp * range_resolution(cfg) / 2.0;
}

double beat_frequency(const RadarConfig& cfg, double range_m) {
  double rmax = max_range(cfg);
  require(range_m >= -1e-12 && range_m <= rmax * (1.0 + 1e-12),
          Errc::range_out_of_bounds,
          "range " + fmt_double(range_m) + " m outside [0, " + fmt_double(rmax) + "]");
  return 2.0 * range_m * cfg.slope_hz_per_s() / kSpeedOfLight;
}

double bin_to_range(const RadarConfig& cfg, uint32_t bin) {
  require(bin <= cfg.samples_per_chirp / 2, Errc::bin_out_of_bounds,
          "bin " + std::to_string(bin) + " outside [0, N/2]");
  return bin * range_resolution(cfg);
}

double min_detectable_range(const RadarConfig& cfg) {
  return cfg.bandpass_low_hz * kSpeedOfLight / (2.0 * cfg.slope_hz_per_s());
}

std::string serialize_config(const RadarConfig& cfg) {
  std::ostringstream os;
  os << "# FMCW radar configuration (SI units)\n";
  os << "start_freq_hz = " << fmt_double(cfg.start_freq_hz) << "\n";
  os << "end_freq_hz = " << fmt_double(cfg.end_freq_hz) << "\n";
  os << "adc_rate_hz = " << fmt_double(cfg.adc_rate_hz) << "\n";
  os << "samples_per_chirp = " << cfg.samples_per_chirp << "\n";
  os << "chirps_per_frame = " << cfg.chirps_per_frame << "\n";
  os << "frame_rate_hz = " << fmt_double(cfg.frame_rate_hz) << "\n";
  os << "chirp_repetition_s = " << fmt_double(cfg.chirp_repetition_s) << "\n";
  os << "bandpass_low_hz = " << fmt_double(cfg.bandpass_low_hz) << "\n";
  os << "bandpass_high_hz = " << fmt_double(cfg.bandpass_high_hz) << "\n";
  os << "num_virtual_channels = " << cfg.num_virtual_channels << "\n";
  os << "channel_positions_m =";
  for (size_t i = 0; i < cfg.channel_positions_m.size(); ++i) {
    const Vec3& p = cfg.channel_positions_m[i];
    os << (i ? " ; " : " ") << fmt_double(p.x) << " " << fmt_double(p.y) << " " << fmt_double(p.z);
  }
  os << "\n";
  os << "tx_amplitude = " << fmt_double(cfg.tx_amplitude) << "\n";
  os << "noise_std = " << fmt_double(cfg.noise_std) << "\n";
  os << "rng_seed = " << cfg.rng_seed << "\n";
  os << "directivity_exponent = " << fmt_double(cfg.directivity_exponent) << "\n";
  os << "window_function = " << cfg.window_function << "\n";
  // Recorded for reference only; the simulation amplitude is tx_amplitude.
  os << "# tx_power_level = 31 (device register value, no simulation effect)\n";
  os << "# if_gain_db = 33 (device register value, no simulation effect)\n";
  return os.str();
}

RadarConfig parse_config(std::string_view text) {
  RadarConfig cfg;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    require(eq != std::string::npos, Errc::invalid_argument, "config line missing '=': " + line);
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "start_freq_hz") cfg.start_freq_hz = parse_double(key, val);
    else if (key == "end_freq_hz") cfg.end_freq_hz = parse_double(key, val);
    else if (key == "adc_rate_hz") cfg.adc_rate_hz = parse_double(key, val);
    else if (key == "samples_per_chirp") cfg.samples_per_chirp = static_cast<uint32_t>(parse_u64(key, val));
    else if (key == "chirps_per_frame") cfg.chirps_per_frame = static_cast<uint32_t>(parse_u64(key, val));
    else if (key == "frame_rate_hz") cfg.frame_rate_hz = parse_double(key, val);
    else if (key == "chirp_repetition_s") cfg.chirp_repetition_s = parse_double(key, val);
    else if (key == "bandpass_low_hz") cfg.bandpass_low_hz = parse_double(key, val);
    else if (key == "bandpass_high_hz") cfg.bandpass_high_hz = parse_double(key, val);
    else if (key == "num_virtual_channels") cfg.num_virtual_channels = static_cast<uint32_t>(parse_u64(key, val));
    else if (key == "tx_amplitude") cfg.tx_amplitude = parse_double(key, val);
    else if (key == "noise_std") cfg.noise_std = parse_double(key, val);
    else if (key == "rng_seed") cfg.rng_seed = parse_u64(key, val);
    else if (key == "directivity_exponent") cfg.directivity_exponent = parse_double(key, val);
    else if (key == "window_function") cfg.window_function = val;
    else if (key == "channel_positions_m") {
      cfg.channel_positions_m.clear();
      std::istringstream ps(val);
      std::string triple;
      while (std::getline(ps, triple, ';')) {
        triple = trim(triple);
        if (triple.empty()) continue;
        std::istringstream ts(triple);
        Vec3 p;
        require(static_cast<bool>(ts >> p.x >> p.y >> p.z), Errc::invalid_argument,
                "bad channel position triple: '" + triple + "'");
        cfg.channel_positions_m.push_back(p);
      }
    } else {
      fail(Errc::invalid_argument, "unknown config key: " + key);
    }
  }
  cfg.validate();
  return cfg;
}

RadarConfig load_config_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(static_cast<bool>(f), Errc::io_failure, "cannot open config file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse_config(os.str());
}

void save_config_file(const RadarConfig& cfg, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), Errc::io_failure, "cannot write config file: " + path);
  f << serialize_config(cfg);
  require(static_cast<bool>(f), Errc::io_failure, "write failed: " + path);
}

uint64_t config_hash(const RadarConfig& cfg) {
  std::string text = serialize_config(cfg);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace bw
