#include "motion/scene.hpp"

#include <cmath>
#include <memory>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

namespace bw::motion {

namespace {

double rcs_for_distance_from_torso(double d) { return std::max(0.2, 1.1 - 0.5 * d); }

}  // namespace

Scene scene_from_pose(const PoseSequence& seq, uint32_t scatterers_per_joint,
                      uint64_t seed, double rcs_scale) {
  require(scatterers_per_joint >= 1, Errc::invalid_argument, "scatterers_per_joint must be >= 1");
  Scene scene;
  if (seq.empty()) return scene;

  auto shared = std::make_shared<PoseSequence>(seq);
  const Pose& first = shared->frames.front();
  const Vec3 torso = 0.25 * (first[kLShoulder] + first[kRShoulder] + first[kLHip] + first[kRHip]);

  uint32_t next_id = 0;
  for (int j = 0; j < kNumJoints; ++j) {
    double base_rcs = rcs_for_distance_from_torso(distance(first[j], torso)) * rcs_scale;
    ScattererTrack primary;
    primary.id = next_id++;
    primary.rcs = base_rcs;
    primary.attached_joint = j;
    primary.position_fn = [shared, j](double t) { return joint_at_time(*shared, j, t); };
    scene.push_back(std::move(primary));

    Rand rng(derive_seed(seed, 0x53415456ULL, static_cast<uint64_t>(j)));
    for (uint32_t k = 1; k < scatterers_per_joint; ++k) {
      Vec3 dir{rng.normal(), rng.normal(), rng.normal()};
      Vec3 offset = dir.normalized() * rng.uniform(0.01, 0.045);
      ScattererTrack sat;
      sat.id = next_id++;
      sat.rcs = 0.4 * base_rcs;
      sat.attached_joint = j;
      sat.position_fn = [shared, j, offset](double t) {
        return joint_at_time(*shared, j, t) + offset;
      };
      scene.push_back(std::move(sat));
    }
  }
  return scene;
}

double metal_plate_range(double t) {
  return 1.0 + 0.3 * std::sin(2.0 * 3.14159265358979323846 * 0.25 * t);
}

Scene controlled_scene(const std::string& kind, const RadarConfig& cfg) {
  if (kind == "metal_plate") {
    ScattererTrack plate;
    plate.id = 0;
    plate.rcs = 5.0;  // flat metal reflects strongly
    plate.attached_joint = -1;
    plate.position_fn = [](double t) { return Vec3{0.0, metal_plate_range(t), 0.0}; };
    return {plate};
  }
  UserProfile neutral;
  if (kind == "squat") {
    auto script = make_gesture_script("leg_squat", kControlledDuration, Side::both, Speed::slow, 0);
    return scene_from_pose(render_pose_sequence(script, cfg, neutral), 2, 0xC011);
  }
  if (kind == "arm_lift_left" || kind == "arm_lift_right") {
    Side side = kind == "arm_lift_left" ? Side::left : Side::right;
    auto script = make_gesture_script("arm_lift", kControlledDuration, side, Speed::slow, 0);
    return scene_from_pose(render_pose_sequence(script, cfg, neutral), 2, 0xC012);
  }
  fail(Errc::unknown_gesture, "unknown controlled scene kind '" + kind + "'");
}

}  // namespace bw::motion
