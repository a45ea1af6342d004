#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "motion/gestures.hpp"
#include "motion/pose.hpp"

namespace bw { struct RadarConfig; }

namespace bw::motion {

// A point reflector the radar illuminates. position_fn must be pure and
// defined for every sampled time (clamped outside the source sequence).
struct ScattererTrack {
  uint32_t id = 0;
  std::function<Vec3(double)> position_fn;
  double rcs = 1.0;           // unitless reflectivity, >= 0
  int attached_joint = -1;    // joint index, or -1 for free scatterers
};

using Scene = std::vector<ScattererTrack>;

// One primary scatterer per joint at the joint position, plus
// (scatterers_per_joint - 1) satellites jittered within 5 cm of it.
// Reflectivity decreases with distance from the torso center; rcs_scale
// multiplies everything (per-user reflectivity variation).
Scene scene_from_pose(const PoseSequence& seq, uint32_t scatterers_per_joint,
                      uint64_t seed, double rcs_scale = 1.0);

// Controlled validation scenes: "metal_plate" (strong reflector at
// 1.0 + 0.3 sin(2 pi 0.25 t) m on boresight, two periods in 8 s), "squat"
// (full-body squatting scene), "arm_lift_left" / "arm_lift_right".
Scene controlled_scene(const std::string& kind, const RadarConfig& cfg);

// Analytic boresight range of the controlled metal plate.
double metal_plate_range(double t);

// Nominal duration over which a controlled scene performs its motions.
inline constexpr double kControlledDuration = 8.0;

}  // namespace bw::motion
