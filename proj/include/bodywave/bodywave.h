/*
 * bodywave: synthetic FMCW radar body-tracking toolkit.
 *
 * C API over the core library: radar configuration and derived physics,
 * synthetic motion and scatterer scenes, IF-signal simulation, the
 * range-profile pipeline, the latent-temporal regressor, and the
 * user-generalization evaluation protocols.
 *
 * Conventions:
 *   - every function returns bw_status; BW_OK (0) means success
 *   - on failure, bw_last_error() describes the problem (thread-local)
 *   - objects are opaque handles freed with their bw_*_free function
 *   - string outputs are written into caller buffers and NUL-terminated;
 *     BW_ERR_BUFFER_TOO_SMALL reports a short buffer
 */

#ifndef BODYWAVE_H
#define BODYWAVE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BW_API __declspec(dllexport)
#else
#define BW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bw_status {
  BW_OK = 0,
  BW_ERR_INVALID_ARGUMENT = 1,
  BW_ERR_RANGE_OUT_OF_BOUNDS = 2,
  BW_ERR_BIN_OUT_OF_BOUNDS = 3,
  BW_ERR_UNKNOWN_GESTURE = 4,
  BW_ERR_SHAPE_MISMATCH = 5,
  BW_ERR_TOO_FEW_COLUMNS = 6,
  BW_ERR_INSUFFICIENT_COLUMNS = 7,
  BW_ERR_EMPTY_DATASET = 8,
  BW_ERR_LENGTH_MISMATCH = 9,
  BW_ERR_UNKNOWN_USER = 10,
  BW_ERR_MISSING_SESSION = 11,
  BW_ERR_MISSING_PREDICTION = 12,
  BW_ERR_CORRUPT_FILE = 13,
  BW_ERR_IO = 14,
  BW_ERR_NON_FINITE = 15,
  BW_ERR_NON_POSITIVE_HEIGHT = 16,
  BW_ERR_NULL_POINTER = 17,
  BW_ERR_BUFFER_TOO_SMALL = 18,
  BW_ERR_INTERNAL = 19,
} bw_status;

/* Message for the most recent failure on this thread. */
BW_API const char* bw_last_error(void);
BW_API const char* bw_version(void);

/* Caps worker threads for simulation/processing/training; <= 0 restores the
 * hardware default. Results are identical for every setting. */
BW_API void bw_set_jobs(int jobs);

typedef struct bw_config bw_config;
typedef struct bw_poses bw_poses;
typedef struct bw_scene bw_scene;
typedef struct bw_raw bw_raw;
typedef struct bw_profile bw_profile;
typedef struct bw_windows bw_windows;
typedef struct bw_model bw_model;

/* --- radar configuration ------------------------------------------------- */

BW_API bw_status bw_config_create(bw_config** out);
BW_API bw_status bw_config_load(const char* path, bw_config** out);
BW_API bw_status bw_config_save(const bw_config* cfg, const char* path);
/* Keys are the config-file keys, values their textual form. */
BW_API bw_status bw_config_set(bw_config* cfg, const char* key, const char* value);
BW_API bw_status bw_config_get(const bw_config* cfg, const char* key, char* buf, size_t bufsize);
BW_API bw_status bw_config_hash(const bw_config* cfg, uint64_t* out);
BW_API void bw_config_free(bw_config* cfg);

/* --- derived physics ------------------------------------------------------ */

BW_API bw_status bw_range_resolution(const bw_config* cfg, double* out_m);
BW_API bw_status bw_max_range(const bw_config* cfg, double* out_m);
BW_API bw_status bw_beat_frequency(const bw_config* cfg, double range_m, double* out_hz);
BW_API bw_status bw_bin_to_range(const bw_config* cfg, uint32_t bin, double* out_m);
BW_API bw_status bw_min_detectable_range(const bw_config* cfg, double* out_m);

/* --- synthetic motion ------------------------------------------------------ */

/* Per-user variation applied to the skeleton before kinematics. */
typedef struct bw_user_profile {
  double limb_scale;
  double rcs_multiplier;
  double joint_offset[39]; /* xyz per joint, canonical joint order */
} bw_user_profile;

BW_API bw_status bw_user_profile_derive(uint64_t study_seed, uint32_t user_id,
                                        bw_user_profile* out);

/* Comma-separated registry; scripted gestures carry no marker, gestures that
 * need a keyframe file are suffixed with "*". */
BW_API bw_status bw_gesture_names(char* buf, size_t bufsize);
BW_API bw_status bw_gesture_scripted(const char* name, int* out_is_scripted);

/* side: "both"|"left"|"right"; speed: "slow"|"fast". NULL profile = neutral. */
BW_API bw_status bw_poses_render(const bw_config* cfg, const char* gesture,
                                 double duration_s, const char* side, const char* speed,
                                 uint64_t session_seed, const bw_user_profile* profile,
                                 bw_poses** out);
BW_API bw_status bw_poses_from_keyframes_csv(const bw_config* cfg, const char* gesture,
                                             const char* csv_path, double duration_s,
                                             const bw_user_profile* profile, bw_poses** out);
BW_API bw_status bw_poses_load_csv(const char* path, bw_poses** out);
BW_API bw_status bw_poses_save_csv(const bw_poses* poses, const char* path, uint64_t seed);
BW_API bw_status bw_poses_count(const bw_poses* poses, size_t* out);
BW_API bw_status bw_poses_frame(const bw_poses* poses, size_t index, double* timestamp_s,
                                double xyz[39]);
/* Mean per-joint position error between aligned sequences, meters. */
BW_API bw_status bw_poses_mpjpe(const bw_poses* pred, const bw_poses* truth, double* out_m);
/* Multiplies every coordinate by height_m (normalized units -> meters). */
BW_API bw_status bw_poses_rescale(bw_poses* poses, double height_m);
BW_API void bw_poses_free(bw_poses* poses);

/* --- scatterer scenes ------------------------------------------------------- */

BW_API bw_status bw_scene_from_poses(const bw_poses* poses, uint32_t scatterers_per_joint,
                                     uint64_t seed, double rcs_scale, bw_scene** out);
/* kind: "metal_plate" | "squat" | "arm_lift_left" | "arm_lift_right" */
BW_API bw_status bw_scene_controlled(const bw_config* cfg, const char* kind, bw_scene** out);
BW_API bw_status bw_scene_size(const bw_scene* scene, size_t* out);
BW_API void bw_scene_free(bw_scene* scene);

/* --- IF-signal simulation ("BWRF" files) ------------------------------------ */

BW_API bw_status bw_simulate(const bw_config* cfg, const bw_scene* scene, double duration_s,
                             uint64_t seed, bw_raw** out);
BW_API bw_status bw_raw_save(const bw_raw* raw, const char* path, uint64_t seed);
BW_API bw_status bw_raw_load(const char* path, bw_raw** out);
BW_API bw_status bw_raw_frames(const bw_raw* raw, size_t* out);
BW_API bw_status bw_raw_out_of_range_chirps(const bw_raw* raw, uint64_t* out);
BW_API void bw_raw_free(bw_raw* raw);

/* --- range-profile pipeline ("BWRP", "BWDS" files) --------------------------- */

/* per-chirp FFT -> band-pass mask -> successive subtraction */
BW_API bw_status bw_process(const bw_raw* raw, bw_profile** out);
BW_API bw_status bw_profile_save(const bw_profile* profile, const char* path, uint64_t seed);
BW_API bw_status bw_profile_load(const char* path, bw_profile** out);
BW_API bw_status bw_profile_dims(const bw_profile* profile, uint32_t* channels,
                                 uint64_t* columns, uint32_t* bins);
BW_API void bw_profile_free(bw_profile* profile);

/* 0.5 s sliding windows labeled with the window-end pose. */
BW_API bw_status bw_windows_make(const bw_profile* profile, const bw_poses* poses,
                                 const bw_config* cfg, bw_windows** out);
BW_API bw_status bw_windows_save(const bw_windows* windows, const char* path, uint64_t seed);
BW_API bw_status bw_windows_load(const char* path, bw_windows** out);
BW_API bw_status bw_windows_count(const bw_windows* windows, size_t* out);
BW_API void bw_windows_free(bw_windows* windows);

/* --- latent-temporal model ("BWNN" checkpoints) ------------------------------- */

BW_API bw_status bw_model_create(uint32_t channels, uint32_t cols, uint32_t bins,
                                 uint64_t seed, bw_model** out);
BW_API bw_status bw_model_save(bw_model* model, const char* path, uint64_t seed);
BW_API bw_status bw_model_load(const char* path, bw_model** out);

/* train_options: whitespace-separated key=value overrides of the training
 * defaults (batch_size=512 epochs=50 lr=0.01 momentum=0.9 plateau_factor=0.5
 * plateau_patience=5 min_lr=1e-5 finetune_epochs=10 finetune_lr_scale=0.1
 * rng_seed=0); NULL keeps the defaults. */
BW_API bw_status bw_model_train(bw_model* model, const char* const* windows_paths,
                                size_t n_paths, const char* train_options,
                                double val_fraction, const char* history_csv_path);
BW_API bw_status bw_model_finetune(bw_model* model, const char* const* windows_paths,
                                   size_t n_paths, const char* train_options);
/* MPJPE of the model against a window file's labels, meters. */
BW_API bw_status bw_model_eval(bw_model* model, const char* windows_path, double* out_m);
/* Prediction for one window of a loaded window set, 13x3 keypoints. */
BW_API bw_status bw_model_predict(bw_model* model, const bw_windows* windows, size_t index,
                                  double xyz[39]);
BW_API bw_status bw_model_footprint(const bw_model* model, char* buf, size_t bufsize);
BW_API void bw_model_free(bw_model* model);

/* --- evaluation protocols ------------------------------------------------------ */

/* protocol: "user_independent" | "user_adaptive" | "user_dependent" |
 * "pooled". Trains (or reuses cached fold checkpoints keyed by fold + seed),
 * evaluates, and writes report CSVs under out_dir. Returns the aggregate
 * MPJPE and the aggregate report path. */
BW_API bw_status bw_experiment_run(const char* manifest_csv, const char* protocol,
                                   const char* out_dir, const char* train_options,
                                   uint64_t seed, double* out_mpjpe_m, char* report_path_buf,
                                   size_t bufsize);

/* Leave-one-gesture-out in pretraining: MPJPE on the held-out gesture for a
 * model trained without it vs the all-gesture model. */
BW_API bw_status bw_experiment_logo(const char* manifest_csv, const char* gesture,
                                    const char* out_dir, const char* train_options,
                                    uint64_t seed, double* out_logo_mpjpe_m,
                                    double* out_full_mpjpe_m);

/* Appends one record to a manifest CSV (creates the file with a header). */
BW_API bw_status bw_manifest_append(const char* manifest_csv, const char* file_ref,
                                    const char* user_id, const char* session_id,
                                    const char* gesture_id, uint64_t seed);

/* --- plotting -------------------------------------------------------------------- */

/* Heatmap of a "BWRP" profile as a binary PGM (range bins on y, chirp time
 * on x, min-max normalized) plus the raw matrix as CSV. channel -1 averages
 * |value| across channels. Either output path may be NULL to skip it. */
BW_API bw_status bw_plot_profile(const char* profile_path, int channel, const char* out_pgm,
                                 const char* out_csv, uint64_t seed);

/* Bar-chart CSV (key,value rows) from a report CSV, one file per axis. */
BW_API bw_status bw_plot_report(const char* report_csv, const char* out_csv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BODYWAVE_H */
