#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "eval/eval.hpp"
#include "io/formats.hpp"
#include "nn/dataset.hpp"
#include "nn/train.hpp"

namespace bw::exp {

// WindowSource over an mmapped "BWDS" file.
class MappedSource final : public nn::WindowSource {
 public:
  explicit MappedSource(const std::string& path)
      : map_(std::make_shared<io::MappedWindows>(path)) {}
  size_t size() const override { return map_->size(); }
  uint32_t channels() const override { return map_->channels(); }
  uint32_t cols() const override { return map_->cols(); }
  uint32_t bins() const override { return map_->bins(); }
  const float* tensor(size_t i) const override { return map_->tensor(i); }
  const float* label(size_t i) const override { return map_->label(i); }

 private:
  std::shared_ptr<io::MappedWindows> map_;
};

// Keeps window files mapped once per experiment.
class DatasetCache {
 public:
  std::shared_ptr<const nn::WindowSource> get(const std::string& path);

 private:
  std::map<std::string, std::shared_ptr<const nn::WindowSource>> open_;
};

std::shared_ptr<const nn::WindowSource> concat_records(const io::Manifest& manifest,
                                                       const std::vector<size_t>& records,
                                                       DatasetCache& cache);

// --- synthetic study generation ----------------------------------------------

struct SessionSpec {
  std::string name;    // pretrain_1 | pretrain_2 | calibration | test
  double duration_s = 10.0;
};

struct StudySpec {
  std::vector<std::string> gestures = {"arm_lift", "arm_stretch", "leg_squat", "leg_walking"};
  uint32_t users = 4;
  std::vector<SessionSpec> sessions = {{"pretrain_1", 10.0}, {"pretrain_2", 10.0}};
  uint32_t scatterers_per_joint = 2;
  uint64_t seed = 42;
  bool save_raw = true;
};

// Simulates every (user, session, gesture) cell through the full pipeline
// and writes window files plus manifest.csv under out_dir. Per-user profiles
// (limb scale, constant joint offsets, reflectivity) come from the study
// seed, so cross-user generalization gaps are built in.
io::Manifest generate_study(const StudySpec& spec, const RadarConfig& cfg,
                            const std::filesystem::path& out_dir);

// --- protocol runners -----------------------------------------------------------

struct ExperimentOptions {
  std::filesystem::path out_dir;
  nn::TrainConfig tcfg;
  double val_fraction = 0.1;
  bool reuse_checkpoints = true;
  uint64_t config_hash = 0;
};

struct FoldResult {
  std::string fold_id;
  eval::EvalReport report;
  std::string checkpoint_path;
  nn::TrainHistory history;
};

struct ProtocolResult {
  std::string protocol;
  std::vector<FoldResult> folds;
  eval::EvalReport aggregate;
  std::string report_csv_path;
};

// Leave-one-user-out: train on every other user's records, test on the
// held-out user's test session.
ProtocolResult run_user_independent(const io::Manifest& manifest,
                                    const ExperimentOptions& opts);

// Same folds, but the cached independent checkpoint is fine-tuned on the
// held-out user's calibration session before testing.
ProtocolResult run_user_adaptive(const io::Manifest& manifest, const ExperimentOptions& opts);

// Per user: train on pretrain_1, test on pretrain_2 (disjoint sessions of
// the same user).
ProtocolResult run_user_dependent(const io::Manifest& manifest, const ExperimentOptions& opts);

// All users pooled: train on every pretrain_1 record, test on pretrain_2.
ProtocolResult run_pooled(const io::Manifest& manifest, const ExperimentOptions& opts);

struct LogoResult {
  std::string gesture;
  double logo_mpjpe_m = 0.0;  // trained without the gesture
  double full_mpjpe_m = 0.0;  // trained on everything (pooled model)
  double drop_m = 0.0;        // logo - full
};

// Leave-one-gesture-out in pretraining: both models train on pretrain_1
// (one with the gesture removed) and are scored on the gesture's pretrain_2
// records.
LogoResult run_logo(const io::Manifest& manifest, const std::string& gesture,
                    const ExperimentOptions& opts);

// Oracle: predict the training-set mean pose for every test window.
double mean_pose_baseline(const nn::WindowSource& train, const nn::WindowSource& test);

}  // namespace bw::exp
