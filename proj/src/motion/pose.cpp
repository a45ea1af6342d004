#include "motion/pose.hpp"

#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace bw::motion {

const std::array<std::string, kNumJoints>& joint_names() {
  static const std::array<std::string, kNumJoints> names = {
      "head",    "l_shoulder", "r_shoulder", "l_elbow", "r_elbow",
      "l_wrist", "r_wrist",    "l_hip",      "r_hip",   "l_knee",
      "r_knee",  "l_ankle",    "r_ankle"};
  return names;
}

void PoseSequence::validate() const {
  require(timestamps_s.size() == frames.size(), Errc::invalid_argument,
          "pose sequence timestamp/frame count mismatch");
  require(frame_rate_hz > 0, Errc::invalid_argument, "frame rate must be positive");
  const double dt = 1.0 / frame_rate_hz;
  for (size_t i = 0; i < frames.size(); ++i) {
    if (i > 0) {
      double gap = timestamps_s[i] - timestamps_s[i - 1];
      require(gap > 0 && std::abs(gap - dt) < 1e-9, Errc::invalid_argument,
              "pose timestamps must increase at 1/frame_rate spacing");
    }
    for (const Vec3& p : frames[i]) {
      require(p.finite(), Errc::non_finite, "pose coordinate not finite");
      require(std::abs(p.x) <= 3.0 && std::abs(p.y) <= 3.0 && std::abs(p.z) <= 3.0,
              Errc::invalid_argument, "pose coordinate exceeds 3 m body-scale bound");
    }
  }
}

namespace {

Vec3 catmull_rom(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3, double w) {
  double w2 = w * w, w3 = w2 * w;
  return 0.5 * ((2.0 * p1) + (p2 - p0) * w +
                (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * w2 +
                (3.0 * p1 - p0 - 3.0 * p2 + p3) * w3);
}

}  // namespace

Vec3 joint_at_time(const PoseSequence& seq, int joint, double t) {
  require(!seq.empty(), Errc::invalid_argument, "cannot sample an empty pose sequence");
  const size_t n = seq.size();
  if (n == 1) return seq.frames[0][joint];
  double s = (t - seq.timestamps_s[0]) * seq.frame_rate_hz;
  if (s <= 0.0) return seq.frames[0][joint];
  if (s >= static_cast<double>(n - 1)) return seq.frames[n - 1][joint];
  size_t i = static_cast<size_t>(s);
  double w = s - static_cast<double>(i);
  auto at = [&](long k) -> const Vec3& {
    long c = std::clamp<long>(k, 0, static_cast<long>(n) - 1);
    return seq.frames[static_cast<size_t>(c)][joint];
  };
  if (w == 0.0) return at(static_cast<long>(i));
  return catmull_rom(at(static_cast<long>(i) - 1), at(static_cast<long>(i)),
                     at(static_cast<long>(i) + 1), at(static_cast<long>(i) + 2), w);
}

Pose pose_at_time(const PoseSequence& seq, double t) {
  Pose p;
  for (int j = 0; j < kNumJoints; ++j) p[j] = joint_at_time(seq, j, t);
  return p;
}

namespace {

// Canonical standing skeleton, meters, head frame. The wearer hangs "down"
// along +y from the device.
const Pose& canonical_skeleton() {
  static const Pose p = [] {
    Pose s;
    s[kHead] = {0.0, 0.06, -0.02};
    s[kLShoulder] = {-0.18, 0.28, -0.04};
    s[kRShoulder] = {0.18, 0.28, -0.04};
    s[kLElbow] = {-0.18, 0.57, -0.04};
    s[kRElbow] = {0.18, 0.57, -0.04};
    s[kLWrist] = {-0.18, 0.83, -0.04};
    s[kRWrist] = {0.18, 0.83, -0.04};
    s[kLHip] = {-0.10, 0.78, -0.02};
    s[kRHip] = {0.10, 0.78, -0.02};
    s[kLKnee] = {-0.10, 1.20, -0.02};
    s[kRKnee] = {0.10, 1.20, -0.02};
    s[kLAnkle] = {-0.10, 1.64, -0.02};
    s[kRAnkle] = {0.10, 1.64, -0.02};
    return s;
  }();
  return p;
}

}  // namespace

UserProfile derive_user_profile(uint64_t study_seed, uint32_t user_id) {
  UserProfile prof;
  Rand rng(derive_seed(study_seed, 0x5052464cULL, user_id));
  prof.limb_scale = rng.uniform(0.9, 1.1);
  prof.rcs_multiplier = rng.uniform(0.8, 1.2);
  for (int j = 0; j < kNumJoints; ++j) {
    // direction on the unit sphere times a magnitude <= 2 cm
    double mag = rng.uniform(0.008, 0.02);
    Vec3 dir{rng.normal(), rng.normal(), rng.normal()};
    prof.joint_offset[j] = dir.normalized() * mag;
  }
  return prof;
}

Pose neutral_pose(const UserProfile& profile) {
  const Pose& canon = canonical_skeleton();
  Pose out;
  const Vec3 head = canon[kHead];
  for (int j = 0; j < kNumJoints; ++j) {
    out[j] = head + profile.limb_scale * (canon[j] - head) + profile.joint_offset[j];
  }
  return out;
}

}  // namespace bw::motion
