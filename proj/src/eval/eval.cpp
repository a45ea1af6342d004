#include "eval/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "core/config.hpp"
#include "core/error.hpp"

namespace bw::eval {

double mpjpe(const motion::PoseSequence& pred, const motion::PoseSequence& truth) {
  require(pred.size() == truth.size(), Errc::length_mismatch,
          "prediction and truth frame counts differ");
  require(!pred.empty(), Errc::length_mismatch, "cannot score empty sequences");
  for (size_t i = 0; i < pred.size(); ++i)
    require(std::abs(pred.timestamps_s[i] - truth.timestamps_s[i]) < 1e-9,
            Errc::length_mismatch, "prediction and truth timestamps are not aligned");
  double total = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    double frame = 0.0;
    for (int j = 0; j < motion::kNumJoints; ++j)
      frame += distance(pred.frames[i][j], truth.frames[i][j]);
    total += frame / motion::kNumJoints;
  }
  return total / static_cast<double>(pred.size());
}

double mpjpe_flat(const std::vector<std::array<float, 39>>& pred,
                  const std::vector<const float*>& truth) {
  require(pred.size() == truth.size(), Errc::length_mismatch,
          "prediction and truth window counts differ");
  require(!pred.empty(), Errc::length_mismatch, "cannot score zero windows");
  double total = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    double w = 0.0;
    for (int j = 0; j < motion::kNumJoints; ++j) {
      const double dx = static_cast<double>(pred[i][3 * j]) - truth[i][3 * j];
      const double dy = static_cast<double>(pred[i][3 * j + 1]) - truth[i][3 * j + 1];
      const double dz = static_cast<double>(pred[i][3 * j + 2]) - truth[i][3 * j + 2];
      w += std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    total += w / motion::kNumJoints;
  }
  return total / static_cast<double>(pred.size());
}

motion::PoseSequence rescale_by_height(const motion::PoseSequence& seq, double height_m) {
  require(height_m > 0, Errc::non_positive_height, "height must be positive");
  motion::PoseSequence out = seq;
  for (auto& frame : out.frames)
    for (auto& p : frame) p = p * height_m;
  return out;
}

std::vector<std::string> manifest_users(const io::Manifest& manifest) {
  std::set<std::string> users;
  for (const auto& r : manifest.records) users.insert(r.user_id);
  return {users.begin(), users.end()};
}

IndependentSplit split_user_independent(const io::Manifest& manifest,
                                        const std::string& held_out_user) {
  bool seen = false;
  IndependentSplit split;
  for (size_t i = 0; i < manifest.records.size(); ++i) {
    const auto& r = manifest.records[i];
    if (r.user_id == held_out_user) {
      seen = true;
      if (r.session_id == "test") split.test.push_back(i);
    } else {
      split.train.push_back(i);
    }
  }
  require(seen, Errc::unknown_user, "user '" + held_out_user + "' not in manifest");
  require(!split.train.empty(), Errc::unknown_user,
          "no training users remain after holding out '" + held_out_user + "'");
  require(!split.test.empty(), Errc::missing_session,
          "held-out user '" + held_out_user + "' has no test session");
  return split;
}

AdaptiveSplit split_user_adaptive(const io::Manifest& manifest,
                                  const std::string& held_out_user) {
  bool seen = false;
  AdaptiveSplit split;
  for (size_t i = 0; i < manifest.records.size(); ++i) {
    const auto& r = manifest.records[i];
    if (r.user_id == held_out_user) {
      seen = true;
      if (r.session_id == "calibration") split.calibration.push_back(i);
      else if (r.session_id == "test") split.test.push_back(i);
    } else {
      split.pretrain.push_back(i);
    }
  }
  require(seen, Errc::unknown_user, "user '" + held_out_user + "' not in manifest");
  require(!split.pretrain.empty(), Errc::unknown_user,
          "no pretraining users remain after holding out '" + held_out_user + "'");
  require(!split.calibration.empty(), Errc::missing_session,
          "held-out user '" + held_out_user + "' has no calibration session");
  require(!split.test.empty(), Errc::missing_session,
          "held-out user '" + held_out_user + "' has no test session");
  return split;
}

GestureSplit split_leave_one_gesture_out(const io::Manifest& manifest,
                                         const std::string& gesture_id) {
  GestureSplit split;
  for (size_t i = 0; i < manifest.records.size(); ++i) {
    if (manifest.records[i].gesture_id == gesture_id) split.test.push_back(i);
    else split.train.push_back(i);
  }
  require(!split.test.empty(), Errc::unknown_gesture,
          "gesture '" + gesture_id + "' not in manifest");
  return split;
}

namespace {

struct Accum {
  double sum = 0.0;  // sum over windows of per-window mean joint error
  size_t n = 0;
};

}  // namespace

EvalReport make_report(const PredStore& preds, const io::Manifest& manifest,
                       const std::vector<size_t>& records) {
  EvalReport report;
  std::map<std::string, Accum> by_user, by_gesture;
  std::array<Accum, motion::kNumJoints> by_joint{};
  Accum overall;

  for (size_t idx : records) {
    auto it = preds.find(idx);
    require(it != preds.end(), Errc::missing_prediction,
            "no predictions for manifest record " + std::to_string(idx) + " (" +
                manifest.records[idx].file_ref + ")");
    const auto& pred = it->second;
    io::MappedWindows truth(manifest.resolve(manifest.records[idx]));
    require(pred.size() == truth.size(), Errc::length_mismatch,
            "prediction count != window count for " + manifest.records[idx].file_ref);
    const auto& rec = manifest.records[idx];
    for (size_t w = 0; w < pred.size(); ++w) {
      const float* lab = truth.label(w);
      double mean_joint = 0.0;
      for (int j = 0; j < motion::kNumJoints; ++j) {
        const double dx = static_cast<double>(pred[w][3 * j]) - lab[3 * j];
        const double dy = static_cast<double>(pred[w][3 * j + 1]) - lab[3 * j + 1];
        const double dz = static_cast<double>(pred[w][3 * j + 2]) - lab[3 * j + 2];
        const double e = std::sqrt(dx * dx + dy * dy + dz * dz);
        by_joint[j].sum += e;
        by_joint[j].n += 1;
        mean_joint += e;
      }
      mean_joint /= motion::kNumJoints;
      overall.sum += mean_joint;
      overall.n += 1;
      by_user[rec.user_id].sum += mean_joint;
      by_user[rec.user_id].n += 1;
      by_gesture[rec.gesture_id].sum += mean_joint;
      by_gesture[rec.gesture_id].n += 1;
    }
  }

  require(overall.n > 0, Errc::missing_prediction, "no windows to report on");
  report.overall_mpjpe_m = overall.sum / static_cast<double>(overall.n);
  report.window_count = overall.n;
  for (const auto& [user, acc] : by_user)
    report.per_user.push_back({user, acc.sum / static_cast<double>(acc.n), acc.n});
  for (const auto& [gesture, acc] : by_gesture)
    report.per_gesture.push_back({gesture, acc.sum / static_cast<double>(acc.n), acc.n});
  for (int j = 0; j < motion::kNumJoints; ++j)
    report.per_joint.push_back({motion::joint_names()[j],
                                by_joint[j].sum / static_cast<double>(by_joint[j].n),
                                by_joint[j].n});
  return report;
}

EvalReport merge_reports(const std::vector<EvalReport>& reports) {
  require(!reports.empty(), Errc::invalid_argument, "no reports to merge");
  EvalReport out;
  std::map<std::string, Accum> by_user, by_gesture;
  std::map<std::string, Accum> by_joint;
  Accum overall;
  for (const auto& r : reports) {
    overall.sum += r.overall_mpjpe_m * static_cast<double>(r.window_count);
    overall.n += r.window_count;
    for (const auto& s : r.per_user) {
      by_user[s.key].sum += s.mpjpe_m * static_cast<double>(s.windows);
      by_user[s.key].n += s.windows;
    }
    for (const auto& s : r.per_gesture) {
      by_gesture[s.key].sum += s.mpjpe_m * static_cast<double>(s.windows);
      by_gesture[s.key].n += s.windows;
    }
    for (const auto& s : r.per_joint) {
      by_joint[s.key].sum += s.mpjpe_m * static_cast<double>(s.windows);
      by_joint[s.key].n += s.windows;
    }
  }
  out.overall_mpjpe_m = overall.sum / static_cast<double>(overall.n);
  out.window_count = overall.n;
  for (const auto& [k, a] : by_user) out.per_user.push_back({k, a.sum / a.n, a.n});
  for (const auto& [k, a] : by_gesture) out.per_gesture.push_back({k, a.sum / a.n, a.n});
  for (const auto& name : motion::joint_names()) {
    auto it = by_joint.find(name);
    if (it != by_joint.end())
      out.per_joint.push_back({name, it->second.sum / it->second.n, it->second.n});
  }
  return out;
}

std::string report_text(const EvalReport& report) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "overall MPJPE: %.6f m (%.2f cm) over %zu windows\n",
                report.overall_mpjpe_m, report.overall_mpjpe_m * 100.0, report.window_count);
  os << buf;
  auto section = [&](const char* title, const std::vector<AxisStat>& rows) {
    if (rows.empty()) return;
    os << title << "\n";
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof(buf), "  %-16s %.6f m  (%7zu windows)\n", r.key.c_str(),
                    r.mpjpe_m, r.windows);
      os << buf;
    }
  };
  section("per user:", report.per_user);
  section("per gesture:", report.per_gesture);
  section("per joint:", report.per_joint);
  return os.str();
}

void save_report_csv(const EvalReport& report, const std::string& path, uint64_t seed) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(f), Errc::io_failure, "cannot write report: " + path);
  f << "# seed = " << seed << "\n# tool_version = " << kToolVersion << "\n";
  f << "# columns: axis,key,mpjpe_m,windows\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf), "overall,all,%.9g,%zu\n", report.overall_mpjpe_m,
                report.window_count);
  f << buf;
  auto rows = [&](const char* axis, const std::vector<AxisStat>& stats) {
    for (const auto& s : stats) {
      std::snprintf(buf, sizeof(buf), "%s,%s,%.9g,%zu\n", axis, s.key.c_str(), s.mpjpe_m,
                    s.windows);
      f << buf;
    }
  };
  rows("user", report.per_user);
  rows("gesture", report.per_gesture);
  rows("joint", report.per_joint);
  require(static_cast<bool>(f), Errc::io_failure, "write failed: " + path);
}

}  // namespace bw::eval
