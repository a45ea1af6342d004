#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "nn/layers.hpp"

namespace bw { struct RadarConfig; }

namespace bw::nn {

struct ModelDims {
  uint32_t in_channels = 8;  // V
  uint32_t window_cols = 60;
  uint32_t bins = 65;
  uint32_t segments = 6;
  uint32_t conv_channels = 8;
  uint32_t lstm_hidden = 64;
  uint32_t head_hidden = 64;
  uint32_t outputs = 39;

  uint32_t seg_cols() const { return window_cols / segments; }
  uint32_t h1() const { return seg_cols() / 2; }
  uint32_t w1() const { return bins / 2; }
  uint32_t h2() const { return h1() / 2; }
  uint32_t w2() const { return w1() / 2; }
  uint32_t lstm_input() const { return conv_channels * h2() * w2(); }
  size_t window_elems() const {
    return static_cast<size_t>(in_channels) * window_cols * bins;
  }

  void validate() const {
    require(segments >= 1 && window_cols % segments == 0, Errc::invalid_argument,
            "window columns must divide evenly into segments");
    require(seg_cols() >= 4 && bins >= 4, Errc::invalid_argument,
            "segment must survive two 2x2 poolings");
    require(in_channels >= 1 && conv_channels >= 1 && lstm_hidden >= 1 &&
                head_hidden >= 1 && outputs >= 1,
            Errc::invalid_argument, "model dimensions must be positive");
  }

  std::string descriptor() const;
  static ModelDims from_descriptor(const std::string& text);
};

ModelDims default_dims(const RadarConfig& cfg);

// Scratch buffers for one batch. Allocated once and reused.
template <class T>
struct Workspace {
  size_t batch = 0;
  std::vector<T> x;             // [M][V][segH][bins]
  std::vector<T> xhat1;         // conv1 out, normalized in place by bn1
  std::vector<T> p1;            // pooled [M][conv][h1][w1]
  std::vector<int32_t> idx1;
  std::vector<T> xhat2;
  std::vector<T> p2;  // pooled [M][conv][h2][w2] == LSTM inputs
  std::vector<int32_t> idx2;
  std::vector<T> gates;  // [B][T][4H] (i,f,g,o after activation)
  std::vector<T> cs;     // [B][T+1][H]
  std::vector<T> hs;     // [B][T+1][H]
  std::vector<T> tanhc;  // [B][T][H]
  std::vector<T> hT;     // [B][H]
  std::vector<T> z1, a1, out, labels;
  // backward
  std::vector<T> dout, da1, dz1, dhT, dgates, dp2, d2, dp1, d1;
  std::vector<T> dh, dc;  // per-step chains [B][H]
};

// Fig-style latent-temporal regressor: the window is cut into `segments`
// temporal slices, every slice runs through the same two conv+BN+ReLU+pool
// blocks (one shared parameter set), the slice features feed an LSTM and a
// two-layer head maps the final hidden state to 13x3 keypoints.
template <class T>
class LatentTemporalModel {
 public:
  LatentTemporalModel() = default;
  explicit LatentTemporalModel(const ModelDims& dims, uint64_t seed) { reset(dims, seed); }

  void reset(const ModelDims& dims, uint64_t seed) {
    dims.validate();
    dims_ = dims;
    conv1.configure(dims.in_channels, dims.conv_channels);
    bn1.configure(dims.conv_channels);
    conv2.configure(dims.conv_channels, dims.conv_channels);
    bn2.configure(dims.conv_channels);
    lstm.configure(dims.lstm_input(), dims.lstm_hidden);
    fc1.configure(dims.lstm_hidden, dims.head_hidden);
    fc2.configure(dims.head_hidden, dims.outputs);
    Rand rng(derive_seed(seed, 0x494e4954ULL));
    conv1.init(rng);
    bn_defaults(bn1);
    conv2.init(rng);
    bn_defaults(bn2);
    lstm.init(rng);
    fc1.init(rng);
    fc2.init(rng);
  }

  const ModelDims& dims() const { return dims_; }

  std::vector<ParamRef<T>> params() {
    std::vector<ParamRef<T>> refs;
    conv1.params(refs, "conv1");
    bn1.params(refs, "bn1");
    conv2.params(refs, "conv2");
    bn2.params(refs, "bn2");
    lstm.params(refs, "lstm");
    fc1.params(refs, "fc1");
    fc2.params(refs, "fc2");
    return refs;
  }

  std::vector<StateRef<T>> states() {
    std::vector<StateRef<T>> refs;
    bn1.states(refs, "bn1");
    bn2.states(refs, "bn2");
    return refs;
  }

  size_t param_count() {
    size_t n = 0;
    for (auto& p : params()) n += p.w->size();
    return n;
  }

  void resize_workspace(Workspace<T>& ws, size_t B) const;

  // ws.x and ws.labels must be filled; produces ws.out.
  void forward(Workspace<T>& ws, size_t B, bool train_mode);

  // Mean squared error over B x outputs; fills ws.dout with its gradient.
  double loss_and_grad(Workspace<T>& ws, size_t B) const;
  double loss_only(const Workspace<T>& ws, size_t B) const;

  // Accumulates parameter gradients from ws.dout (call zero_grads first).
  void backward(Workspace<T>& ws, size_t B);

  void zero_grads() {
    for (auto& p : params()) std::fill(p.g->begin(), p.g->end(), T{});
  }

  void sgd_step(double lr, double momentum) {
    for (auto& p : params()) {
      T* w = p.w->data();
      T* g = p.g->data();
      T* m = p.m->data();
      const size_t n = p.w->size();
      for (size_t i = 0; i < n; ++i) {
        m[i] = static_cast<T>(momentum * m[i] + g[i]);
        w[i] -= static_cast<T>(lr * m[i]);
      }
    }
  }

  void zero_momentum() {
    for (auto& p : params()) std::fill(p.m->begin(), p.m->end(), T{});
  }

  void check_finite_grads() {
    for (auto& p : params())
      for (T g : *p.g)
        require(std::isfinite(static_cast<double>(g)), Errc::non_finite,
                "non-finite gradient in " + p.name);
  }

  Conv3x3<T> conv1, conv2;
  BatchNorm<T> bn1, bn2;
  Lstm<T> lstm;
  Linear<T> fc1, fc2;

 private:
  static void bn_defaults(BatchNorm<T>&) {}
  ModelDims dims_;
};

// Exact per-inference accounting from the layer dimensions (batch 1).
struct Footprint {
  size_t param_count = 0;       // trainable values
  size_t state_count = 0;       // batchnorm running statistics
  size_t param_bytes = 0;       // (param_count + state_count) * 4
  size_t input_elems = 0;
  size_t input_bytes = 0;
  size_t activation_elems = 0;
  size_t activation_bytes = 0;
  size_t flops = 0;  // multiply-add = 2, activation evaluation = 1
  double arithmetic_intensity = 0.0;  // flops / (param+activation+input bytes)
};

Footprint footprint(const ModelDims& dims);
std::string footprint_report(const ModelDims& dims);

extern template class LatentTemporalModel<float>;
extern template class LatentTemporalModel<double>;

}  // namespace bw::nn
