#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "io/formats.hpp"
#include "motion/pose.hpp"

namespace bw::eval {

// Mean over frames of the mean over joints of the Euclidean keypoint error,
// meters. Sequences must have equal frame counts and aligned timestamps.
double mpjpe(const motion::PoseSequence& pred, const motion::PoseSequence& truth);

// Mean over windows of the mean over joints of the Euclidean error between
// flattened 13x3 float labels.
double mpjpe_flat(const std::vector<std::array<float, 39>>& pred,
                  const std::vector<const float*>& truth);

// Multiplies every coordinate by height_m (normalized units -> meters).
motion::PoseSequence rescale_by_height(const motion::PoseSequence& seq, double height_m);

// --- protocol splits (indices into manifest.records) --------------------------

struct IndependentSplit {
  std::vector<size_t> train;  // all records of every other user
  std::vector<size_t> test;   // held-out user's test session
};
IndependentSplit split_user_independent(const io::Manifest& manifest,
                                        const std::string& held_out_user);

struct AdaptiveSplit {
  std::vector<size_t> pretrain;     // other users' records
  std::vector<size_t> calibration;  // held-out user's calibration session
  std::vector<size_t> test;         // held-out user's test session
};
AdaptiveSplit split_user_adaptive(const io::Manifest& manifest,
                                  const std::string& held_out_user);

struct GestureSplit {
  std::vector<size_t> train;  // everything except the gesture
  std::vector<size_t> test;   // only the gesture
};
GestureSplit split_leave_one_gesture_out(const io::Manifest& manifest,
                                         const std::string& gesture_id);

std::vector<std::string> manifest_users(const io::Manifest& manifest);

// --- reporting -----------------------------------------------------------------

// Predictions per manifest record, one 13x3 keypoint set per window.
using PredStore = std::map<size_t, std::vector<std::array<float, 39>>>;

struct AxisStat {
  std::string key;
  double mpjpe_m = 0.0;
  size_t windows = 0;
};

struct EvalReport {
  double overall_mpjpe_m = 0.0;
  size_t window_count = 0;
  std::vector<AxisStat> per_user;
  std::vector<AxisStat> per_gesture;
  std::vector<AxisStat> per_joint;  // 13 rows, canonical joint order
};

// Builds the MPJPE breakdown for `records` (indices into the manifest).
// Ground truth comes from the referenced window files' labels. Throws
// Error(missing_prediction) when a record has no predictions.
EvalReport make_report(const PredStore& preds, const io::Manifest& manifest,
                       const std::vector<size_t>& records);

std::string report_text(const EvalReport& report);
void save_report_csv(const EvalReport& report, const std::string& path, uint64_t seed);

// Window-count-weighted merge of per-fold reports.
EvalReport merge_reports(const std::vector<EvalReport>& reports);

}  // namespace bw::eval
