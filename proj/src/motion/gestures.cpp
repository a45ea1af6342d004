#include "motion/gestures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

namespace bw::motion {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDeg = kPi / 180.0;
}  // namespace

Side parse_side(const std::string& s) {
  if (s == "both") return Side::both;
  if (s == "left") return Side::left;
  if (s == "right") return Side::right;
  fail(Errc::invalid_argument, "side must be both|left|right, got '" + s + "'");
}

Speed parse_speed(const std::string& s) {
  if (s == "slow") return Speed::slow;
  if (s == "fast") return Speed::fast;
  fail(Errc::invalid_argument, "speed must be slow|fast, got '" + s + "'");
}

const std::vector<std::string>& gesture_registry() {
  static const std::vector<std::string> all = {
      "arm_lift",     "arm_stretch",  "arm_cross",      "arm_chin",
      "arm_open",     "arm_gaming",   "leg_walking",    "leg_lunge",
      "leg_squat",    "leg_step",     "leg_kick",       "leg_weightShift",
      "leg_jump",     "leg_back",     "head_staticLR",  "head_static",
      "head_walkingLR", "head_walking", "head_IDK"};
  return all;
}

const std::vector<std::string>& scripted_gestures() {
  static const std::vector<std::string> scripted = {
      "arm_lift", "arm_stretch", "arm_cross", "arm_open",
      "leg_squat", "leg_walking", "leg_kick", "head_staticLR"};
  return scripted;
}

bool gesture_known(const std::string& name) {
  const auto& reg = gesture_registry();
  return std::find(reg.begin(), reg.end(), name) != reg.end();
}

bool gesture_scripted(const std::string& name) {
  const auto& s = scripted_gestures();
  return std::find(s.begin(), s.end(), name) != s.end();
}

bool controlled_kind(const std::string& name) {
  for (const char* k : kControlledKinds)
    if (name == k) return true;
  return false;
}

GestureScript make_gesture_script(const std::string& name, double duration_s,
                                  Side side, Speed speed, uint64_t session_seed) {
  require(duration_s >= 0, Errc::invalid_argument, "duration must be >= 0");
  if (!gesture_scripted(name)) {
    if (gesture_known(name))
      fail(Errc::unknown_gesture,
           "gesture '" + name + "' is in the registry but has no procedural script; "
           "supply a keyframe CSV for it");
    fail(Errc::unknown_gesture, "unknown gesture '" + name + "'");
  }
  GestureScript s;
  s.gesture_id = name;
  s.duration_s = duration_s;
  s.side = side;
  s.speed = speed;
  s.session_seed = session_seed;
  s.procedural = true;
  return s;
}

GestureScript script_from_keyframes(const std::string& name, double duration_s,
                                    std::vector<Keyframe> keyframes) {
  require(!keyframes.empty(), Errc::invalid_argument, "keyframe list is empty");
  for (size_t i = 1; i < keyframes.size(); ++i)
    require(keyframes[i].time_s > keyframes[i - 1].time_s, Errc::invalid_argument,
            "keyframe times must be strictly increasing");
  require(keyframes.front().time_s >= 0 && keyframes.back().time_s <= duration_s + 1e-9,
          Errc::invalid_argument, "keyframe times must lie within [0, duration]");
  double recover = 0.0;
  for (int j = 0; j < kNumJoints; ++j)
    recover = std::max(recover, distance(keyframes.front().pose[j], keyframes.back().pose[j]));
  require(recover <= 2e-3, Errc::invalid_argument,
          "first and last keyframe must match within 2 mm (recover-to-start)");
  GestureScript s;
  s.gesture_id = name;
  s.duration_s = duration_s;
  s.keyframes = std::move(keyframes);
  s.procedural = false;
  return s;
}

// --- procedural gesture evaluation ------------------------------------------

namespace {

// Joint rotations driving the skeleton at one instant. Angles in radians.
struct BodyState {
  double body_yaw = 0.0;      // whole body about +y through the head
  double torso_pitch = 0.0;   // lean forward (hips recede along -z)
  double arm_abduct[2]{};     // upper arm outward (+) / inward (-)
  double arm_flex[2]{};       // upper arm forward (+z)
  double elbow_flex[2]{};     // forearm bend, forward
  double thigh_flex[2]{};     // thigh forward (+z)
  double knee_flex[2]{};      // shin bend relative to thigh, backward
};

// smooth one-cycle bump, zero with zero slope at both ends
double bump(double u) {
  double s = std::sin(kPi * u);
  return s * s;
}

// reps repetitions of the bump over [0, 1]
double bumps(double u, int reps) {
  double s = std::sin(kPi * reps * std::clamp(u, 0.0, 1.0));
  return s * s;
}

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

// 0 -> 1 -> hold -> 0 envelope with smooth edges
double plateau(double u, double rise = 0.25) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return std::min(smoothstep(u / rise), smoothstep((1.0 - u) / rise));
}

// monotone time warp fixing the endpoints
double warp(double u, double a) { return u + a * std::sin(2.0 * kPi * u) / (2.0 * kPi); }

struct Jitter {
  double amp = 1.0;
  double warp_a = 0.0;
};

Jitter session_jitter(uint64_t session_seed) {
  Rand rng(derive_seed(session_seed, 0x4a495454ULL));
  Jitter j;
  j.amp = rng.uniform(0.92, 1.08);
  j.warp_a = rng.uniform(-0.22, 0.22);
  return j;
}

int rep_count(const GestureScript& s) {
  double cycle = s.speed == Speed::fast ? 2.0 : 4.0;
  return std::max(1, static_cast<int>(std::lround(s.duration_s / cycle)));
}

void for_sides(Side side, const std::function<void(int)>& fn) {
  if (side == Side::both || side == Side::left) fn(0);
  if (side == Side::both || side == Side::right) fn(1);
}

BodyState eval_state(const GestureScript& s, double u, const Jitter& jit) {
  BodyState st;
  const int r = rep_count(s);
  const double uw = warp(std::clamp(u, 0.0, 1.0), jit.warp_a);
  const double A = jit.amp;
  const std::string& g = s.gesture_id;

  if (g == "arm_lift") {
    for_sides(s.side, [&](int i) { st.arm_abduct[i] = 158.0 * kDeg * A * bumps(uw, r); });
  } else if (g == "arm_stretch") {
    for_sides(s.side, [&](int i) {
      st.arm_flex[i] = 95.0 * kDeg * A * bumps(uw, r);
      st.arm_abduct[i] = 8.0 * kDeg * bumps(uw, r);
    });
  } else if (g == "arm_cross") {
    double env = plateau(uw);
    for (int i = 0; i < 2; ++i) {
      st.arm_flex[i] = 75.0 * kDeg * A * env;
      st.arm_abduct[i] = -35.0 * kDeg * A * env;
      st.elbow_flex[i] = 30.0 * kDeg * env;
    }
  } else if (g == "arm_open") {
    for (int i = 0; i < 2; ++i) {
      st.arm_abduct[i] = 100.0 * kDeg * A * bumps(uw, r);
      st.arm_flex[i] = 15.0 * kDeg * bumps(uw, r);
      st.elbow_flex[i] = 20.0 * kDeg * bumps(uw, r);
    }
  } else if (g == "leg_squat") {
    double b = bumps(uw, r);
    for (int i = 0; i < 2; ++i) {
      st.thigh_flex[i] = 65.0 * kDeg * A * b;
      st.knee_flex[i] = 2.0 * st.thigh_flex[i];
      st.arm_flex[i] = 25.0 * kDeg * b;  // balance
    }
    st.torso_pitch = 18.0 * kDeg * A * b;
  } else if (g == "leg_walking") {
    int steps = 2 * r;
    double th = 2.0 * kPi * steps * uw;
    double lift_l = std::max(0.0, std::sin(th));
    double lift_r = std::max(0.0, -std::sin(th));
    st.thigh_flex[0] = 38.0 * kDeg * A * lift_l;
    st.thigh_flex[1] = 38.0 * kDeg * A * lift_r;
    st.knee_flex[0] = 1.3 * st.thigh_flex[0];
    st.knee_flex[1] = 1.3 * st.thigh_flex[1];
    double env = plateau(uw, 0.15);
    st.arm_flex[0] = env * (55.0 + 18.0 * std::sin(th)) * kDeg;
    st.arm_flex[1] = env * (55.0 - 18.0 * std::sin(th)) * kDeg;
    st.elbow_flex[0] = st.elbow_flex[1] = 55.0 * kDeg * env;
  } else if (g == "leg_kick") {
    double ur = std::fmod(uw * r, 1.0);
    if (uw >= 1.0) ur = 0.0;
    for_sides(s.side == Side::both ? Side::right : s.side, [&](int i) {
      if (ur < 0.5) {  // kick one foot forward
        double b = bump(ur * 2.0);
        st.thigh_flex[i] = 45.0 * kDeg * A * b;
        st.knee_flex[i] = 10.0 * kDeg * b;
      } else {  // then raise the thigh
        double b = bump(ur * 2.0 - 1.0);
        st.thigh_flex[i] = 75.0 * kDeg * A * b;
        st.knee_flex[i] = 85.0 * kDeg * b;
      }
    });
  } else if (g == "head_staticLR") {
    double dir = s.side == Side::right ? -1.0 : 1.0;  // look left = body yaws +
    double ur = std::fmod(uw * r, 1.0);
    if (uw >= 1.0) ur = 0.0;
    st.body_yaw = dir * 42.0 * kDeg * A * plateau(ur);
  } else {
    fail(Errc::unknown_gesture, "no procedural script for gesture '" + g + "'");
  }
  return st;
}

Pose fk(const Pose& rest, const BodyState& st) {
  Pose out = rest;
  const Vec3 head = rest[kHead];

  // torso: shoulders and hips pivot about the head when leaning
  auto lean = [&](Joint j) { out[j] = head + rotate_x(rest[j] - head, -st.torso_pitch); };
  lean(kLShoulder);
  lean(kRShoulder);
  lean(kLHip);
  lean(kRHip);

  // arms: left = 0, right = 1; abduction rotates outward about z
  const Joint sh[2] = {kLShoulder, kRShoulder};
  const Joint el[2] = {kLElbow, kRElbow};
  const Joint wr[2] = {kLWrist, kRWrist};
  for (int i = 0; i < 2; ++i) {
    double zsign = i == 0 ? 1.0 : -1.0;
    Vec3 upper = rest[el[i]] - rest[sh[i]];
    Vec3 fore = rest[wr[i]] - rest[el[i]];
    auto arm_rot = [&](const Vec3& v) {
      return rotate_x(rotate_z(rotate_x(v, st.arm_flex[i]), zsign * st.arm_abduct[i]),
                      -st.torso_pitch);
    };
    out[el[i]] = out[sh[i]] + arm_rot(upper);
    out[wr[i]] = out[el[i]] + arm_rot(rotate_x(fore, st.elbow_flex[i]));
  }

  // legs: thigh flexes forward, shin bends backward relative to the thigh
  const Joint hip[2] = {kLHip, kRHip};
  const Joint knee[2] = {kLKnee, kRKnee};
  const Joint ankle[2] = {kLAnkle, kRAnkle};
  for (int i = 0; i < 2; ++i) {
    Vec3 thigh = rest[knee[i]] - rest[hip[i]];
    Vec3 shin = rest[ankle[i]] - rest[knee[i]];
    out[knee[i]] = out[hip[i]] + rotate_x(thigh, st.thigh_flex[i]);
    out[ankle[i]] = out[knee[i]] + rotate_x(shin, st.thigh_flex[i] - st.knee_flex[i]);
  }

  if (st.body_yaw != 0.0) {
    for (int j = 0; j < kNumJoints; ++j) out[j] = head + rotate_y(out[j] - head, st.body_yaw);
  }
  return out;
}

Pose resample_keyframes(const std::vector<Keyframe>& kfs, double t) {
  const size_t n = kfs.size();
  if (t <= kfs.front().time_s) return kfs.front().pose;
  if (t >= kfs.back().time_s) return kfs.back().pose;
  size_t i = 0;
  while (i + 1 < n && kfs[i + 1].time_s <= t) ++i;
  double w = (t - kfs[i].time_s) / (kfs[i + 1].time_s - kfs[i].time_s);
  auto at = [&](long k) -> const Pose& {
    return kfs[static_cast<size_t>(std::clamp<long>(k, 0, static_cast<long>(n) - 1))].pose;
  };
  Pose out;
  for (int j = 0; j < kNumJoints; ++j) {
    const Vec3 &p0 = at(static_cast<long>(i) - 1)[j], &p1 = at(i)[j],
               &p2 = at(i + 1)[j], &p3 = at(static_cast<long>(i) + 2)[j];
    double w2 = w * w, w3 = w2 * w;
    out[j] = 0.5 * ((2.0 * p1) + (p2 - p0) * w + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * w2 +
                    (3.0 * p1 - p0 - 3.0 * p2 + p3) * w3);
  }
  return out;
}

}  // namespace

PoseSequence render_pose_sequence(const GestureScript& script, const RadarConfig& cfg,
                                  const UserProfile& profile) {
  PoseSequence seq;
  seq.frame_rate_hz = cfg.frame_rate_hz;
  const long n = std::lround(script.duration_s * cfg.frame_rate_hz);
  if (n <= 0) return seq;
  seq.timestamps_s.reserve(n);
  seq.frames.reserve(n);

  const Pose rest = neutral_pose(profile);
  const Jitter jit = script.procedural ? session_jitter(script.session_seed) : Jitter{};

  for (long k = 0; k < n; ++k) {
    double t = static_cast<double>(k) / cfg.frame_rate_hz;
    Pose p;
    if (script.procedural) {
      double u = script.duration_s > 0 ? t / script.duration_s : 0.0;
      p = fk(rest, eval_state(script, u, jit));
    } else {
      p = resample_keyframes(script.keyframes, t);
      const Vec3 head = p[kHead];
      for (int j = 0; j < kNumJoints; ++j)
        p[j] = head + profile.limb_scale * (p[j] - head) + profile.joint_offset[j];
    }
    seq.timestamps_s.push_back(t);
    seq.frames.push_back(p);
  }
  seq.validate();
  return seq;
}

}  // namespace bw::motion
