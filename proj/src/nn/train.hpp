#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "nn/dataset.hpp"
#include "nn/model.hpp"

namespace bw::nn {

struct TrainConfig {
  uint32_t batch_size = 512;
  uint32_t epochs = 50;
  double lr = 0.01;
  double momentum = 0.9;
  double plateau_factor = 0.5;
  uint32_t plateau_patience = 5;
  double min_lr = 1e-5;
  double plateau_rel_threshold = 1e-4;
  uint32_t finetune_epochs = 10;
  double finetune_lr_scale = 0.1;
  uint64_t rng_seed = 0;

  void validate() const {
    require(batch_size >= 1, Errc::invalid_argument, "batch_size must be >= 1");
    require(lr > min_lr && min_lr > 0, Errc::invalid_argument, "need lr > min_lr > 0");
    require(plateau_factor > 0 && plateau_factor < 1, Errc::invalid_argument,
            "plateau factor must be in (0, 1)");
    require(momentum >= 0 && momentum < 1, Errc::invalid_argument, "momentum must be in [0, 1)");
  }

  // "key=value" pairs separated by whitespace, e.g. "epochs=10 lr=0.02".
  void apply_overrides(const std::string& kv_text);
};

// Reduce-on-plateau state machine: an epoch improves when its validation
// loss drops below best*(1 - rel_threshold); after `patience` consecutive
// non-improving epochs the rate is multiplied by `factor` (floored at
// min_lr) and the counter resets.
class PlateauScheduler {
 public:
  PlateauScheduler(double lr0, double factor, uint32_t patience, double min_lr,
                   double rel_threshold)
      : lr_(lr0), factor_(factor), min_lr_(min_lr), threshold_(rel_threshold),
        patience_(patience) {}

  double lr() const { return lr_; }

  void observe(double val_loss) {
    if (val_loss < best_ * (1.0 - threshold_)) {
      best_ = val_loss;
      bad_ = 0;
    } else if (++bad_ >= patience_) {
      lr_ = std::max(lr_ * factor_, min_lr_);
      bad_ = 0;
    }
  }

 private:
  double lr_, factor_, min_lr_, threshold_;
  uint32_t patience_;
  uint32_t bad_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
};

struct EpochStats {
  uint32_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;  // rate used during this epoch
};
using TrainHistory = std::vector<EpochStats>;

void save_history_csv(const TrainHistory& history, const std::string& path,
                      uint64_t seed, uint64_t config_hash);

using Model = LatentTemporalModel<float>;

// Deterministic SGD training with the plateau scheduler. The dataset is
// split train/validation by a seeded shuffle; batchnorm runs in batch-stats
// mode for training and running-stats mode for validation.
TrainHistory train(Model& model, const WindowSource& data, const TrainConfig& cfg,
                   double val_fraction);

// Updates every layer (nothing frozen) at lr = finetune_lr_scale * lr for
// finetune_epochs epochs. Zero epochs leaves the model bit-identical.
TrainHistory fine_tune(Model& model, const WindowSource& calib, const TrainConfig& cfg);

std::vector<std::array<float, 39>> predict(Model& model, const WindowSource& data,
                                           uint32_t batch_size = 512);

double eval_loss(Model& model, const WindowSource& data, uint32_t batch_size = 512);

// --- checkpoints, magic "BWNN" ------------------------------------------------
// magic, u32 version, u32 descriptor length, descriptor text (architecture
// line + provenance comments), then parameters and batchnorm running stats
// as float32 in declaration order.
void save_model(Model& model, const std::string& path, uint64_t seed, uint64_t config_hash);
Model load_model(const std::string& path);

}  // namespace bw::nn
