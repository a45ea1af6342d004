#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "motion/pose.hpp"

namespace bw { struct RadarConfig; }

namespace bw::motion {

enum class Side { both, left, right };
enum class Speed { slow, fast };

Side parse_side(const std::string& s);
Speed parse_speed(const std::string& s);

struct Keyframe {
  double time_s = 0.0;
  Pose pose;
};

// A motion recipe. Built-in gestures are procedural (evaluated by forward
// kinematics exactly at frame timestamps); gestures loaded from keyframe
// files are resampled with piecewise-cubic interpolation.
struct GestureScript {
  std::string gesture_id;
  double duration_s = 8.0;
  std::vector<Keyframe> keyframes;  // empty for procedural scripts
  Side side = Side::both;
  Speed speed = Speed::slow;
  uint64_t session_seed = 0;  // per-session amplitude/timing jitter
  bool procedural = true;
};

// The full protocol registry. Scripted gestures have procedural definitions;
// the rest are declared and must be supplied as keyframe files.
const std::vector<std::string>& gesture_registry();
const std::vector<std::string>& scripted_gestures();
bool gesture_known(const std::string& name);
bool gesture_scripted(const std::string& name);

// Controlled validation motions for interpreting range profiles.
inline constexpr const char* kControlledKinds[] = {"metal_plate", "squat",
                                                   "arm_lift_left", "arm_lift_right"};
bool controlled_kind(const std::string& name);

// Throws Error(unknown_gesture) for names outside the registry, and for
// registered gestures that have no procedural script (those need keyframes).
GestureScript make_gesture_script(const std::string& name, double duration_s,
                                  Side side, Speed speed, uint64_t session_seed);

// Builds a file-backed script from parsed keyframes. First and last keyframe
// must agree within 2 mm (motions recover to the starting pose).
GestureScript script_from_keyframes(const std::string& name, double duration_s,
                                    std::vector<Keyframe> keyframes);

// Samples the script at cfg.frame_rate_hz over [0, duration]. Procedural
// scripts respect constant bone lengths per profile to better than 1e-6 m.
PoseSequence render_pose_sequence(const GestureScript& script, const RadarConfig& cfg,
                                  const UserProfile& profile);

}  // namespace bw::motion
