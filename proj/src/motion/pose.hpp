#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/vec3.hpp"

namespace bw::motion {

inline constexpr int kNumJoints = 13;

// Canonical joint order. The head-mounted device defines the frame; all
// coordinates are head-relative meters (+x right, +y down, +z forward).
enum Joint : int {
  kHead = 0,
  kLShoulder,
  kRShoulder,
  kLElbow,
  kRElbow,
  kLWrist,
  kRWrist,
  kLHip,
  kRHip,
  kLKnee,
  kRKnee,
  kLAnkle,
  kRAnkle,
};

const std::array<std::string, kNumJoints>& joint_names();

using Pose = std::array<Vec3, kNumJoints>;

struct PoseSequence {
  double frame_rate_hz = 30.0;
  std::vector<double> timestamps_s;  // strictly increasing at 1/frame_rate
  std::vector<Pose> frames;

  size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }

  // Throws on non-finite coordinates, |coord| > 3 m, or bad timestamps.
  void validate() const;
};

// Catmull-Rom interpolation over the frame grid, clamped at the ends.
// Exact at frame timestamps.
Pose pose_at_time(const PoseSequence& seq, double t);
Vec3 joint_at_time(const PoseSequence& seq, int joint, double t);

// Per-user variation: uniform limb scale, a constant per-joint offset and an
// rcs multiplier. Offsets are applied to the skeleton before kinematics, so
// bone lengths stay constant over time.
struct UserProfile {
  double limb_scale = 1.0;
  double rcs_multiplier = 1.0;
  std::array<Vec3, kNumJoints> joint_offset{};
};

// Deterministic profile for a study user: scale in [0.9, 1.1], per-joint
// offsets up to 2 cm, rcs multiplier in [0.8, 1.2].
UserProfile derive_user_profile(uint64_t study_seed, uint32_t user_id);

// Rest-pose joint positions for a profile (scale + offsets applied).
Pose neutral_pose(const UserProfile& profile);

}  // namespace bw::motion
