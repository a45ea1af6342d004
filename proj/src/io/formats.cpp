#include "io/formats.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts are unsupported");

namespace bw::io {

namespace {

constexpr uint32_t kFormatVersion = 1;

void write_bytes(std::ofstream& f, const void* p, size_t n) {
  f.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void write_u32(std::ofstream& f, uint32_t v) { write_bytes(f, &v, 4); }
void write_u64(std::ofstream& f, uint64_t v) { write_bytes(f, &v, 8); }
void write_f64(std::ofstream& f, double v) { write_bytes(f, &v, 8); }

class Reader {
 public:
  Reader(const std::string& path, const char* magic) : path_(path), f_(path, std::ios::binary) {
    require(static_cast<bool>(f_), Errc::io_failure, "cannot open file: " + path);
    char m[4];
    read(m, 4, "magic");
    require(std::memcmp(m, magic, 4) == 0, Errc::corrupt_file,
            path + ": bad magic (expected " + magic + ")");
    uint32_t version = u32("version");
    require(version == kFormatVersion, Errc::corrupt_file,
            path + ": unsupported format version " + std::to_string(version));
  }

  void read(void* p, size_t n, const char* what) {
    f_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    require(static_cast<size_t>(f_.gcount()) == n, Errc::corrupt_file,
            path_ + ": truncated while reading " + what);
  }

  bool try_read(void* p, size_t n) {
    f_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (f_.gcount() == 0) return false;
    require(static_cast<size_t>(f_.gcount()) == n, Errc::corrupt_file,
            path_ + ": truncated record");
    return true;
  }

  uint32_t u32(const char* what) {
    uint32_t v;
    read(&v, 4, what);
    return v;
  }
  uint64_t u64(const char* what) {
    uint64_t v;
    read(&v, 8, what);
    return v;
  }
  double f64(const char* what) {
    double v;
    read(&v, 8, what);
    return v;
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream f_;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(f), Errc::io_failure, "cannot write file: " + path);
  return f;
}

void finish_out(std::ofstream& f, const std::string& path) {
  f.flush();
  require(static_cast<bool>(f), Errc::io_failure, "write failed: " + path);
}

std::string fmt_g(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// meta trailer shared by BWRP/BWDS: "BWMT" + u32 length + text
void write_meta_trailer(std::ofstream& f, const FileMeta& meta) {
  std::string text = meta.comment_lines();
  write_bytes(f, "BWMT", 4);
  write_u32(f, static_cast<uint32_t>(text.size()));
  write_bytes(f, text.data(), text.size());
}

}  // namespace

std::string FileMeta::comment_lines() const {
  std::ostringstream os;
  os << "# seed = " << seed << "\n";
  os << "# config_hash = " << config_hash << "\n";
  os << "# tool_version = " << tool_version << "\n";
  return os.str();
}

// --- BWRF --------------------------------------------------------------------

void save_raw(const sim::RawFrameStream& stream, const std::string& path,
              const FileMeta& meta) {
  std::ofstream f = open_out(path);
  std::string cfg_text = serialize_config(stream.cfg) + meta.comment_lines();
  write_bytes(f, "BWRF", 4);
  write_u32(f, kFormatVersion);
  write_u32(f, static_cast<uint32_t>(cfg_text.size()));
  write_bytes(f, cfg_text.data(), cfg_text.size());
  std::vector<float> buf;
  for (const auto& frame : stream.frames) {
    write_f64(f, frame.timestamp_s);
    buf.resize(frame.samples.size());
    for (size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(frame.samples[i]);
    write_bytes(f, buf.data(), buf.size() * sizeof(float));
  }
  finish_out(f, path);
}

sim::RawFrameStream load_raw(const std::string& path) {
  Reader r(path, "BWRF");
  uint32_t cfg_len = r.u32("config length");
  std::string cfg_text(cfg_len, '\0');
  r.read(cfg_text.data(), cfg_len, "config text");

  sim::RawFrameStream stream;
  stream.cfg = parse_config(cfg_text);
  // restore the recorded seed from the provenance comments
  size_t pos = cfg_text.find("# seed = ");
  if (pos != std::string::npos) stream.seed = std::stoull(cfg_text.substr(pos + 9));

  const size_t per_frame = stream.samples_per_frame();
  std::vector<float> buf(per_frame);
  double ts;
  while (r.try_read(&ts, 8)) {
    r.read(buf.data(), per_frame * sizeof(float), "frame samples");
    sim::Frame frame;
    frame.timestamp_s = ts;
    frame.samples.assign(buf.begin(), buf.end());
    stream.frames.push_back(std::move(frame));
  }
  return stream;
}

// --- BWRP --------------------------------------------------------------------

void save_profile(const dsp::RangeProfileTensor& profile, const std::string& path,
                  const FileMeta& meta) {
  profile.validate();
  std::ofstream f = open_out(path);
  write_bytes(f, "BWRP", 4);
  write_u32(f, kFormatVersion);
  write_u32(f, profile.channels);
  write_u32(f, static_cast<uint32_t>(profile.columns));
  write_u32(f, profile.bins);
  std::vector<float> buf(profile.values.size());
  for (size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(profile.values[i]);
  write_bytes(f, buf.data(), buf.size() * sizeof(float));
  write_bytes(f, profile.column_timestamps_s.data(),
              profile.column_timestamps_s.size() * sizeof(double));
  write_meta_trailer(f, meta);
  finish_out(f, path);
}

dsp::RangeProfileTensor load_profile(const std::string& path) {
  Reader r(path, "BWRP");
  dsp::RangeProfileTensor profile;
  profile.channels = r.u32("channels");
  profile.columns = r.u32("columns");
  profile.bins = r.u32("bins");
  const size_t n = static_cast<size_t>(profile.channels) * profile.columns * profile.bins;
  std::vector<float> buf(n);
  r.read(buf.data(), n * sizeof(float), "profile values");
  profile.values.assign(buf.begin(), buf.end());
  profile.column_timestamps_s.resize(profile.columns);
  r.read(profile.column_timestamps_s.data(), profile.columns * sizeof(double),
         "column timestamps");
  profile.validate();
  return profile;
}

// --- BWDS --------------------------------------------------------------------

namespace {
constexpr size_t kBwdsHeader = 4 + 4 + 4 + 4 + 4 + 8;

size_t bwds_record_stride(size_t tensor_elems) {
  return tensor_elems * sizeof(float) + 39 * sizeof(float) + sizeof(double);
}
}  // namespace

void save_windows(const dsp::WindowDataset& ds, const std::string& path,
                  const FileMeta& meta) {
  std::ofstream f = open_out(path);
  write_bytes(f, "BWDS", 4);
  write_u32(f, kFormatVersion);
  write_u32(f, ds.channels);
  write_u32(f, ds.cols);
  write_u32(f, ds.bins);
  write_u64(f, ds.size());
  const size_t elems = ds.tensor_elems();
  for (size_t i = 0; i < ds.size(); ++i) {
    write_bytes(f, ds.tensor(i), elems * sizeof(float));
    write_bytes(f, ds.label(i), 39 * sizeof(float));
    write_f64(f, ds.start_times_s[i]);
  }
  write_meta_trailer(f, meta);
  finish_out(f, path);
}

dsp::WindowDataset load_windows(const std::string& path) {
  Reader r(path, "BWDS");
  dsp::WindowDataset ds;
  ds.channels = r.u32("channels");
  ds.cols = r.u32("cols");
  ds.bins = r.u32("bins");
  uint64_t count = r.u64("record count");
  const size_t elems = ds.tensor_elems();
  ds.tensors.resize(count * elems);
  ds.labels.resize(count * 39);
  ds.start_times_s.resize(count);
  for (uint64_t i = 0; i < count; ++i) {
    r.read(ds.tensors.data() + i * elems, elems * sizeof(float), "window tensor");
    r.read(ds.labels.data() + i * 39, 39 * sizeof(float), "window label");
    ds.start_times_s[i] = r.f64("window timestamp");
  }
  return ds;
}

MappedWindows::MappedWindows(const std::string& path) {
  int fd = ::open(path.c_str(), O_RDONLY);
  require(fd >= 0, Errc::io_failure, "cannot open dataset file: " + path);
  struct stat st{};
  if (::fstat(fd, &st) != 0) {
    ::close(fd);
    fail(Errc::io_failure, "cannot stat dataset file: " + path);
  }
  map_size_ = static_cast<size_t>(st.st_size);
  map_ = ::mmap(nullptr, map_size_, PROT_READ, MAP_PRIVATE, fd, 0);
  ::close(fd);
  require(map_ != MAP_FAILED, Errc::io_failure, "mmap failed: " + path);

  const unsigned char* p = static_cast<const unsigned char*>(map_);
  require(map_size_ >= kBwdsHeader, Errc::corrupt_file, path + ": truncated header");
  require(std::memcmp(p, "BWDS", 4) == 0, Errc::corrupt_file, path + ": bad magic");
  uint32_t version;
  std::memcpy(&version, p + 4, 4);
  require(version == kFormatVersion, Errc::corrupt_file, path + ": unsupported version");
  std::memcpy(&channels_, p + 8, 4);
  std::memcpy(&cols_, p + 12, 4);
  std::memcpy(&bins_, p + 16, 4);
  uint64_t count;
  std::memcpy(&count, p + 20, 8);
  count_ = count;
  record_stride_ = bwds_record_stride(tensor_elems());
  records_ = p + kBwdsHeader;
  require(map_size_ >= kBwdsHeader + count_ * record_stride_, Errc::corrupt_file,
          path + ": file shorter than declared record count");
}

MappedWindows::~MappedWindows() {
  if (map_ != nullptr && map_ != MAP_FAILED) ::munmap(map_, map_size_);
}

const float* MappedWindows::tensor(size_t i) const {
  return reinterpret_cast<const float*>(records_ + i * record_stride_);
}

const float* MappedWindows::label(size_t i) const {
  return reinterpret_cast<const float*>(records_ + i * record_stride_ +
                                        tensor_elems() * sizeof(float));
}

double MappedWindows::timestamp(size_t i) const {
  double v;
  std::memcpy(&v, records_ + i * record_stride_ + (tensor_elems() + 39) * sizeof(float), 8);
  return v;
}

// --- pose CSV ------------------------------------------------------------------

void save_poses_csv(const motion::PoseSequence& seq, const std::string& path,
                    const FileMeta& meta) {
  std::ofstream f = open_out(path);
  f << meta.comment_lines();
  f << "# columns: timestamp_s";
  for (const auto& name : motion::joint_names()) f << "," << name << "_xyz";
  f << "\n";
  for (size_t i = 0; i < seq.size(); ++i) {
    f << fmt_g(seq.timestamps_s[i]);
    for (const Vec3& p : seq.frames[i])
      f << "," << fmt_g(p.x) << "," << fmt_g(p.y) << "," << fmt_g(p.z);
    f << "\n";
  }
  finish_out(f, path);
}

namespace {

std::vector<double> parse_csv_row(const std::string& line, const std::string& path) {
  std::vector<double> vals;
  std::istringstream is(line);
  std::string cell;
  while (std::getline(is, cell, ',')) {
    try {
      vals.push_back(std::stod(cell));
    } catch (const std::exception&) {
      fail(Errc::corrupt_file, path + ": bad CSV number '" + cell + "'");
    }
  }
  return vals;
}

std::vector<std::vector<double>> load_numeric_csv(const std::string& path, size_t row_len) {
  std::ifstream f(path, std::ios::binary);
  require(static_cast<bool>(f), Errc::io_failure, "cannot open file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto vals = parse_csv_row(line, path);
    require(vals.size() == row_len, Errc::corrupt_file,
            path + ": expected " + std::to_string(row_len) + " columns, got " +
                std::to_string(vals.size()));
    rows.push_back(std::move(vals));
  }
  return rows;
}

motion::Pose pose_from_row(const std::vector<double>& row, size_t offset) {
  motion::Pose pose;
  for (int j = 0; j < motion::kNumJoints; ++j)
    pose[j] = {row[offset + 3 * j], row[offset + 3 * j + 1], row[offset + 3 * j + 2]};
  return pose;
}

}  // namespace

motion::PoseSequence load_poses_csv(const std::string& path) {
  auto rows = load_numeric_csv(path, 40);
  motion::PoseSequence seq;
  if (rows.empty()) return seq;
  if (rows.size() >= 2) seq.frame_rate_hz = 1.0 / (rows[1][0] - rows[0][0]);
  for (const auto& row : rows) {
    seq.timestamps_s.push_back(row[0]);
    seq.frames.push_back(pose_from_row(row, 1));
  }
  seq.validate();
  return seq;
}

std::vector<motion::Keyframe> load_keyframes_csv(const std::string& path) {
  auto rows = load_numeric_csv(path, 40);
  std::vector<motion::Keyframe> kfs;
  for (const auto& row : rows) {
    motion::Keyframe kf;
    kf.time_s = row[0];
    kf.pose = pose_from_row(row, 1);
    kfs.push_back(kf);
  }
  return kfs;
}

// --- manifest CSV ---------------------------------------------------------------

Manifest load_manifest(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(static_cast<bool>(f), Errc::io_failure, "cannot open manifest: " + path);
  Manifest m;
  m.base_dir = std::filesystem::path(path).parent_path();
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    ManifestRecord r;
    std::string seed;
    require(std::getline(is, r.file_ref, ',') && std::getline(is, r.user_id, ',') &&
                std::getline(is, r.session_id, ',') && std::getline(is, r.gesture_id, ',') &&
                std::getline(is, seed, ','),
            Errc::corrupt_file, path + ": manifest row needs 5 columns: " + line);
    try {
      r.seed = std::stoull(seed);
    } catch (const std::exception&) {
      fail(Errc::corrupt_file, path + ": bad seed '" + seed + "'");
    }
    m.records.push_back(std::move(r));
  }
  return m;
}

void save_manifest(const Manifest& m, const std::string& path) {
  std::ofstream f = open_out(path);
  f << "# columns: file_ref,user_id,session_id,gesture_id,seed\n";
  for (const auto& r : m.records)
    f << r.file_ref << "," << r.user_id << "," << r.session_id << "," << r.gesture_id << ","
      << r.seed << "\n";
  finish_out(f, path);
}

// --- PGM -------------------------------------------------------------------------

void save_pgm(const std::vector<unsigned char>& pixels, size_t rows, size_t cols,
              const std::string& path, const FileMeta& meta) {
  require(pixels.size() == rows * cols, Errc::shape_mismatch, "pixel count != rows*cols");
  std::ofstream f = open_out(path);
  f << "P5\n" << meta.comment_lines() << cols << " " << rows << "\n255\n";
  write_bytes(f, pixels.data(), pixels.size());
  finish_out(f, path);
}

bool files_identical(const std::string& a, const std::string& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  require(static_cast<bool>(fa), Errc::io_failure, "cannot open file: " + a);
  require(static_cast<bool>(fb), Errc::io_failure, "cannot open file: " + b);
  std::ostringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

}  // namespace bw::io
