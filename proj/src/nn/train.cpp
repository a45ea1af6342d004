#include "nn/train.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "core/config.hpp"
#include "core/rng.hpp"

namespace bw::nn {

void TrainConfig::apply_overrides(const std::string& kv_text) {
  std::istringstream is(kv_text);
  std::string kv;
  while (is >> kv) {
    size_t eq = kv.find('=');
    require(eq != std::string::npos, Errc::invalid_argument, "bad train option: " + kv);
    std::string key = kv.substr(0, eq);
    std::string val = kv.substr(eq + 1);
    try {
      if (key == "batch_size") batch_size = static_cast<uint32_t>(std::stoul(val));
      else if (key == "epochs") epochs = static_cast<uint32_t>(std::stoul(val));
      else if (key == "lr") lr = std::stod(val);
      else if (key == "momentum") momentum = std::stod(val);
      else if (key == "plateau_factor") plateau_factor = std::stod(val);
      else if (key == "plateau_patience") plateau_patience = static_cast<uint32_t>(std::stoul(val));
      else if (key == "min_lr") min_lr = std::stod(val);
      else if (key == "plateau_rel_threshold") plateau_rel_threshold = std::stod(val);
      else if (key == "finetune_epochs") finetune_epochs = static_cast<uint32_t>(std::stoul(val));
      else if (key == "finetune_lr_scale") finetune_lr_scale = std::stod(val);
      else if (key == "rng_seed") rng_seed = std::stoull(val);
      else fail(Errc::invalid_argument, "unknown train option: " + key);
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail(Errc::invalid_argument, "bad value for train option " + key + ": " + val);
    }
  }
}

namespace {

// Copy one batch into the workspace: window tensors land segment-major
// ([b*segments + s][channel][seg_rows][bins]) so convolutions treat segments
// as extra batch items (shared weights).
void gather_batch(const WindowSource& data, const std::vector<size_t>& order, size_t begin,
                  size_t count, const ModelDims& d, Workspace<float>& ws) {
  const uint32_t segs = d.segments;
  const uint32_t seg_rows = d.seg_cols();
  const uint32_t bins = d.bins;
  const size_t chan_elems = static_cast<size_t>(d.window_cols) * bins;
  const size_t seg_item = static_cast<size_t>(d.in_channels) * seg_rows * bins;

#pragma omp parallel for schedule(static)
  for (long b = 0; b < static_cast<long>(count); ++b) {
    const size_t src_idx = order[begin + b];
    const float* src = data.tensor(src_idx);
    for (uint32_t s = 0; s < segs; ++s) {
      float* dst = ws.x.data() + (static_cast<size_t>(b) * segs + s) * seg_item;
      for (uint32_t c = 0; c < d.in_channels; ++c) {
        const float* rows = src + c * chan_elems + static_cast<size_t>(s) * seg_rows * bins;
        std::memcpy(dst + static_cast<size_t>(c) * seg_rows * bins, rows,
                    static_cast<size_t>(seg_rows) * bins * sizeof(float));
      }
    }
    const float* lab = data.label(src_idx);
    std::memcpy(ws.labels.data() + static_cast<size_t>(b) * d.outputs, lab,
                d.outputs * sizeof(float));
  }
}

void check_shape(const Model& model, const WindowSource& data) {
  const ModelDims& d = model.dims();
  require(data.channels() == d.in_channels && data.cols() == d.window_cols &&
              data.bins() == d.bins,
          Errc::shape_mismatch, "dataset window shape does not match the model");
}

double run_eval_epoch(Model& model, const WindowSource& data,
                      const std::vector<size_t>& order, size_t begin, size_t count,
                      uint32_t batch_size, Workspace<float>& ws) {
  double total = 0.0;
  size_t done = 0;
  while (done < count) {
    const size_t B = std::min<size_t>(batch_size, count - done);
    gather_batch(data, order, begin + done, B, model.dims(), ws);
    model.forward(ws, B, /*train_mode=*/false);
    total += model.loss_only(ws, B) * static_cast<double>(B);
    done += B;
  }
  return total / static_cast<double>(count);
}

}  // namespace

TrainHistory train(Model& model, const WindowSource& data, const TrainConfig& cfg,
                   double val_fraction) {
  cfg.validate();
  require(data.size() > 0, Errc::empty_dataset, "training dataset is empty");
  require(val_fraction > 0.0 && val_fraction < 1.0, Errc::invalid_argument,
          "val_fraction must be in (0, 1)");
  check_shape(model, data);

  const size_t n = data.size();
  size_t n_val = static_cast<size_t>(std::lround(val_fraction * static_cast<double>(n)));
  n_val = std::max<size_t>(1, n_val);
  require(n_val < n, Errc::empty_dataset, "dataset too small for the validation split");
  const size_t n_train = n - n_val;

  Rand rng(derive_seed(cfg.rng_seed, 0x545241494eULL));
  std::vector<size_t> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = i;
  rng.shuffle(perm);
  std::vector<size_t> train_idx(perm.begin(), perm.begin() + n_train);
  std::vector<size_t> val_idx(perm.begin() + n_train, perm.end());

  Workspace<float> ws;
  model.resize_workspace(ws, std::min<size_t>(cfg.batch_size, n));
  model.zero_momentum();

  PlateauScheduler sched(cfg.lr, cfg.plateau_factor, cfg.plateau_patience, cfg.min_lr,
                         cfg.plateau_rel_threshold);
  TrainHistory history;

  for (uint32_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double lr = sched.lr();
    rng.shuffle(train_idx);
    double train_loss = 0.0;
    size_t done = 0;
    while (done < n_train) {
      const size_t B = std::min<size_t>(cfg.batch_size, n_train - done);
      gather_batch(data, train_idx, done, B, model.dims(), ws);
      model.forward(ws, B, /*train_mode=*/true);
      const double loss = model.loss_and_grad(ws, B);
      model.zero_grads();
      model.backward(ws, B);
      model.check_finite_grads();
      model.sgd_step(lr, cfg.momentum);
      train_loss += loss * static_cast<double>(B);
      done += B;
    }
    train_loss /= static_cast<double>(n_train);

    const double val_loss =
        run_eval_epoch(model, data, val_idx, 0, n_val, cfg.batch_size, ws);
    history.push_back({epoch, train_loss, val_loss, lr});
    sched.observe(val_loss);
  }
  return history;
}

TrainHistory fine_tune(Model& model, const WindowSource& calib, const TrainConfig& cfg) {
  cfg.validate();
  require(calib.size() > 0, Errc::empty_dataset, "calibration dataset is empty");
  check_shape(model, calib);
  TrainHistory history;
  if (cfg.finetune_epochs == 0) return history;

  const double lr = cfg.lr * cfg.finetune_lr_scale;
  const size_t n = calib.size();
  Rand rng(derive_seed(cfg.rng_seed, 0x46494e45ULL));
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;

  Workspace<float> ws;
  model.resize_workspace(ws, std::min<size_t>(cfg.batch_size, n));
  model.zero_momentum();

  for (uint32_t epoch = 1; epoch <= cfg.finetune_epochs; ++epoch) {
    rng.shuffle(idx);
    double train_loss = 0.0;
    size_t done = 0;
    while (done < n) {
      const size_t B = std::min<size_t>(cfg.batch_size, n - done);
      gather_batch(calib, idx, done, B, model.dims(), ws);
      model.forward(ws, B, /*train_mode=*/true);
      const double loss = model.loss_and_grad(ws, B);
      model.zero_grads();
      model.backward(ws, B);
      model.check_finite_grads();
      model.sgd_step(lr, cfg.momentum);
      train_loss += loss * static_cast<double>(B);
      done += B;
    }
    history.push_back({epoch, train_loss / static_cast<double>(n), 0.0, lr});
  }
  return history;
}

std::vector<std::array<float, 39>> predict(Model& model, const WindowSource& data,
                                           uint32_t batch_size) {
  check_shape(model, data);
  const size_t n = data.size();
  std::vector<std::array<float, 39>> out(n);
  if (n == 0) return out;

  Workspace<float> ws;
  model.resize_workspace(ws, std::min<size_t>(batch_size, n));
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;

  size_t done = 0;
  while (done < n) {
    const size_t B = std::min<size_t>(batch_size, n - done);
    gather_batch(data, order, done, B, model.dims(), ws);
    model.forward(ws, B, /*train_mode=*/false);
    for (size_t b = 0; b < B; ++b)
      std::memcpy(out[done + b].data(), ws.out.data() + b * 39, 39 * sizeof(float));
    done += B;
  }
  return out;
}

double eval_loss(Model& model, const WindowSource& data, uint32_t batch_size) {
  check_shape(model, data);
  require(data.size() > 0, Errc::empty_dataset, "evaluation dataset is empty");
  Workspace<float> ws;
  model.resize_workspace(ws, std::min<size_t>(batch_size, data.size()));
  std::vector<size_t> order(data.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  return run_eval_epoch(model, data, order, 0, data.size(), batch_size, ws);
}

void save_history_csv(const TrainHistory& history, const std::string& path,
                      uint64_t seed, uint64_t config_hash) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(f), Errc::io_failure, "cannot write history: " + path);
  f << "# seed = " << seed << "\n# config_hash = " << config_hash
    << "\n# tool_version = " << kToolVersion << "\n";
  f << "# columns: epoch,train_loss,val_loss,lr\n";
  char buf[160];
  for (const auto& e : history) {
    std::snprintf(buf, sizeof(buf), "%u,%.9g,%.9g,%.9g\n", e.epoch, e.train_loss, e.val_loss,
                  e.lr);
    f << buf;
  }
  require(static_cast<bool>(f), Errc::io_failure, "write failed: " + path);
}

void save_model(Model& model, const std::string& path, uint64_t seed, uint64_t config_hash) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(f), Errc::io_failure, "cannot write checkpoint: " + path);
  std::ostringstream desc;
  desc << model.dims().descriptor() << "\n";
  desc << "# seed = " << seed << "\n# config_hash = " << config_hash
       << "\n# tool_version = " << kToolVersion << "\n";
  const std::string desc_s = desc.str();
  f.write("BWNN", 4);
  uint32_t version = 1;
  f.write(reinterpret_cast<const char*>(&version), 4);
  uint32_t len = static_cast<uint32_t>(desc_s.size());
  f.write(reinterpret_cast<const char*>(&len), 4);
  f.write(desc_s.data(), desc_s.size());
  for (auto& p : model.params())
    f.write(reinterpret_cast<const char*>(p.w->data()),
            static_cast<std::streamsize>(p.w->size() * sizeof(float)));
  for (auto& s : model.states())
    f.write(reinterpret_cast<const char*>(s.s->data()),
            static_cast<std::streamsize>(s.s->size() * sizeof(float)));
  f.flush();
  require(static_cast<bool>(f), Errc::io_failure, "write failed: " + path);
}

Model load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(static_cast<bool>(f), Errc::io_failure, "cannot open checkpoint: " + path);
  char magic[4];
  f.read(magic, 4);
  require(f.gcount() == 4 && std::memcmp(magic, "BWNN", 4) == 0, Errc::corrupt_file,
          path + ": bad checkpoint magic");
  uint32_t version = 0, len = 0;
  f.read(reinterpret_cast<char*>(&version), 4);
  f.read(reinterpret_cast<char*>(&len), 4);
  require(static_cast<bool>(f) && version == 1, Errc::corrupt_file,
          path + ": unsupported checkpoint version");
  std::string desc(len, '\0');
  f.read(desc.data(), len);
  require(static_cast<bool>(f), Errc::corrupt_file, path + ": truncated descriptor");
  std::string arch_line = desc.substr(0, desc.find('\n'));

  Model model(ModelDims::from_descriptor(arch_line), 0);
  for (auto& p : model.params()) {
    f.read(reinterpret_cast<char*>(p.w->data()),
           static_cast<std::streamsize>(p.w->size() * sizeof(float)));
    require(static_cast<bool>(f), Errc::corrupt_file, path + ": truncated parameters");
  }
  for (auto& s : model.states()) {
    f.read(reinterpret_cast<char*>(s.s->data()),
           static_cast<std::streamsize>(s.s->size() * sizeof(float)));
    require(static_cast<bool>(f), Errc::corrupt_file, path + ": truncated state");
  }
  model.zero_momentum();
  return model;
}

}  // namespace bw::nn
