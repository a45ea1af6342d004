#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dsp/pipeline.hpp"
#include "motion/gestures.hpp"
#include "motion/pose.hpp"
#include "sim/simulator.hpp"

namespace bw::io {

// Provenance stamped into every output header: the experiment seed, a hash
// of the radar config, and the tool version.
struct FileMeta {
  uint64_t seed = 0;
  uint64_t config_hash = 0;
  std::string tool_version;

  std::string comment_lines() const;  // "# key = value\n" block
};

// --- raw IF stream, magic "BWRF" --------------------------------------------
// Little-endian: magic, u32 version, u32 config length, UTF-8 config text,
// then per frame: f64 timestamp + V*C*N float32 samples in
// (channel, chirp, sample) order. Frame count is implied by the file size.
void save_raw(const sim::RawFrameStream& stream, const std::string& path,
              const FileMeta& meta);
sim::RawFrameStream load_raw(const std::string& path);

// --- range profile, magic "BWRP" --------------------------------------------
// magic, u32 version, u32 dims (channels, columns, bins), float32 values
// channel-major, f64 column timestamps, optional meta trailer.
void save_profile(const dsp::RangeProfileTensor& profile, const std::string& path,
                  const FileMeta& meta);
dsp::RangeProfileTensor load_profile(const std::string& path);

// --- window dataset, magic "BWDS" -------------------------------------------
// magic, u32 version, u32 dims (channels, cols, bins), u64 record count,
// then per record: window tensor float32 + 39 float32 label + f64 timestamp.
void save_windows(const dsp::WindowDataset& ds, const std::string& path,
                  const FileMeta& meta);
dsp::WindowDataset load_windows(const std::string& path);

// Zero-copy view of one BWDS file (mmap); keeps the mapping alive.
class MappedWindows {
 public:
  explicit MappedWindows(const std::string& path);
  ~MappedWindows();
  MappedWindows(const MappedWindows&) = delete;
  MappedWindows& operator=(const MappedWindows&) = delete;

  size_t size() const { return count_; }
  uint32_t channels() const { return channels_; }
  uint32_t cols() const { return cols_; }
  uint32_t bins() const { return bins_; }
  size_t tensor_elems() const { return static_cast<size_t>(channels_) * cols_ * bins_; }
  const float* tensor(size_t i) const;
  const float* label(size_t i) const;
  double timestamp(size_t i) const;

 private:
  void* map_ = nullptr;
  size_t map_size_ = 0;
  const unsigned char* records_ = nullptr;
  size_t record_stride_ = 0;
  size_t count_ = 0;
  uint32_t channels_ = 0, cols_ = 0, bins_ = 0;
};

// --- pose / keyframe CSV -----------------------------------------------------
// One row per frame: timestamp_s followed by 39 coordinates (x,y,z per joint
// in canonical order). '#' lines carry provenance and are ignored on read.
void save_poses_csv(const motion::PoseSequence& seq, const std::string& path,
                    const FileMeta& meta);
motion::PoseSequence load_poses_csv(const std::string& path);

// Keyframe CSV rows are time_s + 39 coordinates.
std::vector<motion::Keyframe> load_keyframes_csv(const std::string& path);

// --- manifest CSV ------------------------------------------------------------
struct ManifestRecord {
  std::string file_ref;  // window dataset file, relative to the manifest
  std::string user_id;
  std::string session_id;  // pretrain_1 | pretrain_2 | calibration | test
  std::string gesture_id;
  uint64_t seed = 0;
};

struct Manifest {
  std::filesystem::path base_dir;
  std::vector<ManifestRecord> records;

  std::string resolve(const ManifestRecord& r) const {
    std::filesystem::path p(r.file_ref);
    return p.is_absolute() ? p.string() : (base_dir / p).string();
  }
};

Manifest load_manifest(const std::string& path);
void save_manifest(const Manifest& m, const std::string& path);

// --- portable graymap --------------------------------------------------------
// rows x cols bytes, P5, max value 255.
void save_pgm(const std::vector<unsigned char>& pixels, size_t rows, size_t cols,
              const std::string& path, const FileMeta& meta);

// Byte-compare two files.
bool files_identical(const std::string& a, const std::string& b);

}  // namespace bw::io
