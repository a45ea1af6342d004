#include "exp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "core/rng.hpp"
#include "dsp/pipeline.hpp"
#include "motion/scene.hpp"
#include "sim/simulator.hpp"

namespace bw::exp {

namespace fs = std::filesystem;

std::shared_ptr<const nn::WindowSource> DatasetCache::get(const std::string& path) {
  auto it = open_.find(path);
  if (it != open_.end()) return it->second;
  auto src = std::make_shared<MappedSource>(path);
  open_.emplace(path, src);
  return src;
}

std::shared_ptr<const nn::WindowSource> concat_records(const io::Manifest& manifest,
                                                       const std::vector<size_t>& records,
                                                       DatasetCache& cache) {
  auto concat = std::make_shared<nn::ConcatSource>();
  for (size_t idx : records) concat->add(cache.get(manifest.resolve(manifest.records[idx])));
  require(!concat->empty(), Errc::empty_dataset, "record selection is empty");
  return concat;
}

// --- study generation -----------------------------------------------------------

io::Manifest generate_study(const StudySpec& spec, const RadarConfig& cfg,
                            const fs::path& out_dir) {
  require(spec.users >= 1, Errc::invalid_argument, "study needs at least one user");
  fs::create_directories(out_dir);
  io::Manifest manifest;
  manifest.base_dir = out_dir;

  for (uint32_t u = 0; u < spec.users; ++u) {
    const std::string user = "u" + std::to_string(u);
    const motion::UserProfile profile = motion::derive_user_profile(spec.seed, u);
    for (size_t si = 0; si < spec.sessions.size(); ++si) {
      const SessionSpec& session = spec.sessions[si];
      for (size_t gi = 0; gi < spec.gestures.size(); ++gi) {
        const std::string& gesture = spec.gestures[gi];
        const uint64_t cell_seed = derive_seed(spec.seed, u, si, gi);

        // deterministic side/speed variants across sessions
        motion::Side side = (si + gi) % 2 == 0 ? motion::Side::left : motion::Side::right;
        motion::Speed speed = gi % 2 == 0 ? motion::Speed::slow : motion::Speed::fast;
        auto script =
            motion::make_gesture_script(gesture, session.duration_s, side, speed, cell_seed);
        motion::PoseSequence poses = motion::render_pose_sequence(script, cfg, profile);

        motion::Scene scene = motion::scene_from_pose(poses, spec.scatterers_per_joint,
                                                      cell_seed, profile.rcs_multiplier);
        RadarConfig sim_cfg = cfg;
        sim_cfg.rng_seed = cell_seed;
        sim::RawFrameStream stream = sim::simulate(scene, sim_cfg, session.duration_s, cell_seed);

        const std::string stem = gesture + "_" + user + "_" + session.name;
        io::FileMeta meta{cell_seed, config_hash(sim_cfg), kToolVersion};
        if (spec.save_raw) {
          io::save_raw(stream, (out_dir / (stem + ".bwrf")).string(), meta);
          io::save_poses_csv(poses, (out_dir / (stem + ".poses.csv")).string(), meta);
        }

        dsp::RangeProfileTensor profile_t = dsp::processed_profile(stream);
        dsp::WindowDataset windows = dsp::make_windows(profile_t, poses, cfg);
        io::save_windows(windows, (out_dir / (stem + ".bwds")).string(), meta);

        manifest.records.push_back({stem + ".bwds", user, session.name, gesture, cell_seed});
      }
    }
  }
  io::save_manifest(manifest, (out_dir / "manifest.csv").string());
  return manifest;
}

// --- protocol runners -------------------------------------------------------------

namespace {

uint64_t fold_seed(const nn::TrainConfig& tcfg, const std::string& fold_id) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : fold_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return derive_seed(tcfg.rng_seed, h);
}

nn::ModelDims dims_for(const nn::WindowSource& src) {
  nn::ModelDims dims;
  dims.in_channels = src.channels();
  dims.window_cols = src.cols();
  dims.bins = src.bins();
  dims.validate();
  return dims;
}

// Train (or reuse) a checkpoint for one fold. The cache key is the fold id
// plus the training seed; anything else invalidates by filename mismatch.
nn::Model obtain_model(const io::Manifest& manifest, const std::vector<size_t>& train_records,
                       const std::string& tag, const ExperimentOptions& opts,
                       DatasetCache& cache, nn::TrainHistory* history_out) {
  const std::string name =
      "ckpt_" + tag + "_seed" + std::to_string(opts.tcfg.rng_seed) + ".bwnn";
  const fs::path ckpt = opts.out_dir / name;
  if (opts.reuse_checkpoints && fs::exists(ckpt)) {
    return nn::load_model(ckpt.string());
  }
  auto train_src = concat_records(manifest, train_records, cache);
  nn::TrainConfig tcfg = opts.tcfg;
  tcfg.rng_seed = fold_seed(opts.tcfg, tag);
  nn::Model model(dims_for(*train_src), tcfg.rng_seed);
  nn::TrainHistory history = nn::train(model, *train_src, tcfg, opts.val_fraction);
  fs::create_directories(opts.out_dir);
  nn::save_model(model, ckpt.string(), opts.tcfg.rng_seed, opts.config_hash);
  nn::save_history_csv(history, (opts.out_dir / ("history_" + tag + ".csv")).string(),
                       opts.tcfg.rng_seed, opts.config_hash);
  if (history_out) *history_out = std::move(history);
  return model;
}

eval::EvalReport score_records(nn::Model& model, const io::Manifest& manifest,
                               const std::vector<size_t>& records, DatasetCache& cache) {
  eval::PredStore preds;
  for (size_t idx : records) {
    auto src = cache.get(manifest.resolve(manifest.records[idx]));
    preds[idx] = nn::predict(model, *src);
  }
  return eval::make_report(preds, manifest, records);
}

void finalize(ProtocolResult& result, const ExperimentOptions& opts) {
  std::vector<eval::EvalReport> reports;
  for (const auto& f : result.folds) reports.push_back(f.report);
  result.aggregate = eval::merge_reports(reports);
  fs::create_directories(opts.out_dir);
  const fs::path csv = opts.out_dir / ("report_" + result.protocol + ".csv");
  eval::save_report_csv(result.aggregate, csv.string(), opts.tcfg.rng_seed);
  result.report_csv_path = csv.string();
  for (const auto& f : result.folds) {
    const fs::path fold_csv =
        opts.out_dir / ("report_" + result.protocol + "_" + f.fold_id + ".csv");
    eval::save_report_csv(f.report, fold_csv.string(), opts.tcfg.rng_seed);
  }
}

std::vector<std::string> users_with_session(const io::Manifest& manifest,
                                            const std::string& session) {
  std::set<std::string> users;
  for (const auto& r : manifest.records)
    if (r.session_id == session) users.insert(r.user_id);
  return {users.begin(), users.end()};
}

std::vector<size_t> records_where(const io::Manifest& manifest,
                                  const std::function<bool(const io::ManifestRecord&)>& pred) {
  std::vector<size_t> out;
  for (size_t i = 0; i < manifest.records.size(); ++i)
    if (pred(manifest.records[i])) out.push_back(i);
  return out;
}

}  // namespace

ProtocolResult run_user_independent(const io::Manifest& manifest,
                                    const ExperimentOptions& opts) {
  ProtocolResult result;
  result.protocol = "user_independent";
  DatasetCache cache;
  for (const std::string& user : users_with_session(manifest, "test")) {
    auto split = eval::split_user_independent(manifest, user);
    FoldResult fold;
    fold.fold_id = user;
    nn::Model model = obtain_model(manifest, split.train, "independent_" + user, opts, cache,
                                   &fold.history);
    fold.report = score_records(model, manifest, split.test, cache);
    result.folds.push_back(std::move(fold));
  }
  require(!result.folds.empty(), Errc::missing_session, "manifest has no test sessions");
  finalize(result, opts);
  return result;
}

ProtocolResult run_user_adaptive(const io::Manifest& manifest, const ExperimentOptions& opts) {
  ProtocolResult result;
  result.protocol = "user_adaptive";
  DatasetCache cache;
  for (const std::string& user : users_with_session(manifest, "test")) {
    auto split = eval::split_user_adaptive(manifest, user);
    FoldResult fold;
    fold.fold_id = user;
    // pretraining set == the independent fold's training set, so the
    // checkpoint is shared between the two protocols
    nn::Model model =
        obtain_model(manifest, split.pretrain, "independent_" + user, opts, cache, nullptr);
    auto calib = concat_records(manifest, split.calibration, cache);
    nn::TrainConfig tcfg = opts.tcfg;
    tcfg.rng_seed = fold_seed(opts.tcfg, "adaptive_" + user);
    fold.history = nn::fine_tune(model, *calib, tcfg);
    nn::save_model(model,
                   (opts.out_dir / ("ckpt_adaptive_" + user + "_seed" +
                                    std::to_string(opts.tcfg.rng_seed) + ".bwnn"))
                       .string(),
                   opts.tcfg.rng_seed, opts.config_hash);
    fold.report = score_records(model, manifest, split.test, cache);
    result.folds.push_back(std::move(fold));
  }
  require(!result.folds.empty(), Errc::missing_session, "manifest has no test sessions");
  finalize(result, opts);
  return result;
}

ProtocolResult run_user_dependent(const io::Manifest& manifest, const ExperimentOptions& opts) {
  ProtocolResult result;
  result.protocol = "user_dependent";
  DatasetCache cache;
  for (const std::string& user : users_with_session(manifest, "pretrain_2")) {
    auto train_records = records_where(manifest, [&](const io::ManifestRecord& r) {
      return r.user_id == user && r.session_id == "pretrain_1";
    });
    auto test_records = records_where(manifest, [&](const io::ManifestRecord& r) {
      return r.user_id == user && r.session_id == "pretrain_2";
    });
    if (train_records.empty() || test_records.empty()) continue;
    FoldResult fold;
    fold.fold_id = user;
    nn::Model model =
        obtain_model(manifest, train_records, "dependent_" + user, opts, cache, &fold.history);
    fold.report = score_records(model, manifest, test_records, cache);
    result.folds.push_back(std::move(fold));
  }
  require(!result.folds.empty(), Errc::missing_session,
          "manifest has no user with both pretraining sessions");
  finalize(result, opts);
  return result;
}

ProtocolResult run_pooled(const io::Manifest& manifest, const ExperimentOptions& opts) {
  ProtocolResult result;
  result.protocol = "pooled";
  DatasetCache cache;
  auto train_records = records_where(
      manifest, [](const io::ManifestRecord& r) { return r.session_id == "pretrain_1"; });
  auto test_records = records_where(
      manifest, [](const io::ManifestRecord& r) { return r.session_id == "pretrain_2"; });
  require(!train_records.empty() && !test_records.empty(), Errc::missing_session,
          "pooled protocol needs pretrain_1 and pretrain_2 sessions");
  FoldResult fold;
  fold.fold_id = "all";
  nn::Model model = obtain_model(manifest, train_records, "pooled", opts, cache, &fold.history);
  fold.report = score_records(model, manifest, test_records, cache);
  result.folds.push_back(std::move(fold));
  finalize(result, opts);
  return result;
}

LogoResult run_logo(const io::Manifest& manifest, const std::string& gesture,
                    const ExperimentOptions& opts) {
  DatasetCache cache;
  auto gsplit = eval::split_leave_one_gesture_out(manifest, gesture);

  std::vector<size_t> full_train, logo_train, test_records;
  for (size_t idx : gsplit.train)
    if (manifest.records[idx].session_id == "pretrain_1") logo_train.push_back(idx);
  full_train = records_where(
      manifest, [](const io::ManifestRecord& r) { return r.session_id == "pretrain_1"; });
  for (size_t idx : gsplit.test)
    if (manifest.records[idx].session_id == "pretrain_2") test_records.push_back(idx);
  require(!logo_train.empty() && !test_records.empty(), Errc::missing_session,
          "leave-one-gesture-out needs pretraining sessions covering the gesture");

  nn::Model logo_model =
      obtain_model(manifest, logo_train, "logo_" + gesture, opts, cache, nullptr);
  nn::Model full_model = obtain_model(manifest, full_train, "pooled", opts, cache, nullptr);

  LogoResult out;
  out.gesture = gesture;
  out.logo_mpjpe_m = score_records(logo_model, manifest, test_records, cache).overall_mpjpe_m;
  out.full_mpjpe_m = score_records(full_model, manifest, test_records, cache).overall_mpjpe_m;
  out.drop_m = out.logo_mpjpe_m - out.full_mpjpe_m;
  return out;
}

double mean_pose_baseline(const nn::WindowSource& train, const nn::WindowSource& test) {
  require(train.size() > 0 && test.size() > 0, Errc::empty_dataset,
          "baseline needs non-empty train and test sets");
  std::array<double, 39> mean{};
  for (size_t i = 0; i < train.size(); ++i) {
    const float* lab = train.label(i);
    for (int k = 0; k < 39; ++k) mean[k] += lab[k];
  }
  for (double& m : mean) m /= static_cast<double>(train.size());

  double total = 0.0;
  for (size_t i = 0; i < test.size(); ++i) {
    const float* lab = test.label(i);
    double w = 0.0;
    for (int j = 0; j < motion::kNumJoints; ++j) {
      const double dx = mean[3 * j] - lab[3 * j];
      const double dy = mean[3 * j + 1] - lab[3 * j + 1];
      const double dz = mean[3 * j + 2] - lab[3 * j + 2];
      w += std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    total += w / motion::kNumJoints;
  }
  return total / static_cast<double>(test.size());
}

}  // namespace bw::exp
