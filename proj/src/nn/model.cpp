#include "nn/model.hpp"

#include <cmath>
#include <sstream>

#include "core/config.hpp"
#include "dsp/pipeline.hpp"

namespace bw::nn {

std::string ModelDims::descriptor() const {
  std::ostringstream os;
  os << "latent_temporal in=" << in_channels << " cols=" << window_cols << " bins=" << bins
     << " seg=" << segments << " conv=" << conv_channels << " hidden=" << lstm_hidden
     << " head=" << head_hidden << " out=" << outputs;
  return os.str();
}

ModelDims ModelDims::from_descriptor(const std::string& text) {
  std::istringstream is(text);
  std::string arch;
  is >> arch;
  require(arch == "latent_temporal", Errc::corrupt_file,
          "unknown architecture descriptor: " + arch);
  ModelDims d;
  std::string kv;
  while (is >> kv) {
    size_t eq = kv.find('=');
    require(eq != std::string::npos, Errc::corrupt_file, "bad descriptor field: " + kv);
    std::string key = kv.substr(0, eq);
    uint32_t val = static_cast<uint32_t>(std::stoul(kv.substr(eq + 1)));
    if (key == "in") d.in_channels = val;
    else if (key == "cols") d.window_cols = val;
    else if (key == "bins") d.bins = val;
    else if (key == "seg") d.segments = val;
    else if (key == "conv") d.conv_channels = val;
    else if (key == "hidden") d.lstm_hidden = val;
    else if (key == "head") d.head_hidden = val;
    else if (key == "out") d.outputs = val;
    else fail(Errc::corrupt_file, "unknown descriptor field: " + key);
  }
  d.validate();
  return d;
}

ModelDims default_dims(const RadarConfig& cfg) {
  ModelDims d;
  d.in_channels = cfg.num_virtual_channels;
  d.window_cols = dsp::window_columns(cfg);
  d.bins = cfg.range_bins();
  d.validate();
  return d;
}

template <class T>
void LatentTemporalModel<T>::resize_workspace(Workspace<T>& ws, size_t B) const {
  const ModelDims& d = dims_;
  const size_t M = B * d.segments;
  const size_t seg_in = static_cast<size_t>(d.in_channels) * d.seg_cols() * d.bins;
  const size_t c1 = static_cast<size_t>(d.conv_channels) * d.seg_cols() * d.bins;
  const size_t pool1 = static_cast<size_t>(d.conv_channels) * d.h1() * d.w1();
  const size_t c2 = pool1;
  const size_t pool2 = static_cast<size_t>(d.conv_channels) * d.h2() * d.w2();
  const uint32_t H = d.lstm_hidden, S = d.segments;

  ws.batch = B;
  ws.x.assign(M * seg_in, T{});
  ws.xhat1.assign(M * c1, T{});
  ws.p1.assign(M * pool1, T{});
  ws.idx1.assign(M * pool1, 0);
  ws.xhat2.assign(M * c2, T{});
  ws.p2.assign(M * pool2, T{});
  ws.idx2.assign(M * pool2, 0);
  ws.gates.assign(B * S * 4 * H, T{});
  ws.cs.assign(B * (S + 1) * H, T{});
  ws.hs.assign(B * (S + 1) * H, T{});
  ws.tanhc.assign(B * S * H, T{});
  ws.hT.assign(B * H, T{});
  ws.z1.assign(B * d.head_hidden, T{});
  ws.a1.assign(B * d.head_hidden, T{});
  ws.out.assign(B * d.outputs, T{});
  ws.labels.assign(B * d.outputs, T{});
  ws.dout.assign(B * d.outputs, T{});
  ws.da1.assign(B * d.head_hidden, T{});
  ws.dz1.assign(B * d.head_hidden, T{});
  ws.dhT.assign(B * H, T{});
  ws.dgates.assign(B * S * 4 * H, T{});
  ws.dp2.assign(M * pool2, T{});
  ws.d2.assign(M * c2, T{});
  ws.dp1.assign(M * pool1, T{});
  ws.d1.assign(M * c1, T{});
  ws.dh.assign(B * H, T{});
  ws.dc.assign(B * H, T{});
}

template <class T>
void LatentTemporalModel<T>::forward(Workspace<T>& ws, size_t B, bool train_mode) {
  const ModelDims& d = dims_;
  const size_t M = B * d.segments;
  const uint32_t segH = d.seg_cols(), W0 = d.bins;
  const uint32_t H = d.lstm_hidden, S = d.segments, G = 4 * H;
  const uint32_t I = d.lstm_input();

  // conv block 1 (xhat1 doubles as the conv output, normalized in place)
  conv1.forward(ws.x.data(), ws.xhat1.data(), M, segH, W0);
  if (train_mode) {
    bn1.forward_train(ws.xhat1.data(), ws.xhat1.data(), M, static_cast<size_t>(segH) * W0);
    affine_relu_pool(ws.xhat1.data(), bn1.gamma.data(), bn1.beta.data(), d.conv_channels,
                     ws.p1.data(), ws.idx1.data(), M, segH, W0);
  } else {
    bn1.forward_eval(ws.xhat1.data(), ws.xhat1.data(), M, static_cast<size_t>(segH) * W0);
    unit_affine_relu_pool(ws.xhat1.data(), d.conv_channels, ws.p1.data(), ws.idx1.data(), M,
                          segH, W0);
  }

  // conv block 2
  conv2.forward(ws.p1.data(), ws.xhat2.data(), M, d.h1(), d.w1());
  if (train_mode) {
    bn2.forward_train(ws.xhat2.data(), ws.xhat2.data(), M,
                      static_cast<size_t>(d.h1()) * d.w1());
    affine_relu_pool(ws.xhat2.data(), bn2.gamma.data(), bn2.beta.data(), d.conv_channels,
                     ws.p2.data(), ws.idx2.data(), M, d.h1(), d.w1());
  } else {
    bn2.forward_eval(ws.xhat2.data(), ws.xhat2.data(), M,
                     static_cast<size_t>(d.h1()) * d.w1());
    unit_affine_relu_pool(ws.xhat2.data(), d.conv_channels, ws.p2.data(), ws.idx2.data(), M,
                          d.h1(), d.w1());
  }

  // LSTM over the segment sequence
  std::fill(ws.cs.begin(), ws.cs.end(), T{});
  std::fill(ws.hs.begin(), ws.hs.end(), T{});
  for (uint32_t t = 0; t < S; ++t) {
#pragma omp parallel for schedule(static)
    for (long b = 0; b < static_cast<long>(B); ++b) {
      const T* xt = ws.p2.data() + (static_cast<size_t>(b) * S + t) * I;
      const T* hprev = ws.hs.data() + (static_cast<size_t>(b) * (S + 1) + t) * H;
      const T* cprev = ws.cs.data() + (static_cast<size_t>(b) * (S + 1) + t) * H;
      T* gate = ws.gates.data() + (static_cast<size_t>(b) * S + t) * G;
      for (uint32_t k = 0; k < G; ++k) gate[k] = lstm.b_ih[k] + lstm.b_hh[k];
      for (uint32_t j = 0; j < I; ++j)
        axpy(gate, xt[j], lstm.wih.data() + static_cast<size_t>(j) * G, G);
      for (uint32_t j = 0; j < H; ++j)
        axpy(gate, hprev[j], lstm.whh.data() + static_cast<size_t>(j) * G, G);
      T* cnew = ws.cs.data() + (static_cast<size_t>(b) * (S + 1) + t + 1) * H;
      T* hnew = ws.hs.data() + (static_cast<size_t>(b) * (S + 1) + t + 1) * H;
      T* tc = ws.tanhc.data() + (static_cast<size_t>(b) * S + t) * H;
      for (uint32_t k = 0; k < H; ++k) {
        const T i_g = sigmoid(gate[k]);
        const T f_g = sigmoid(gate[H + k]);
        const T g_g = static_cast<T>(std::tanh(static_cast<double>(gate[2 * H + k])));
        const T o_g = sigmoid(gate[3 * H + k]);
        gate[k] = i_g;
        gate[H + k] = f_g;
        gate[2 * H + k] = g_g;
        gate[3 * H + k] = o_g;
        const T c_new = f_g * cprev[k] + i_g * g_g;
        cnew[k] = c_new;
        const T th = static_cast<T>(std::tanh(static_cast<double>(c_new)));
        tc[k] = th;
        hnew[k] = o_g * th;
      }
    }
  }

  // head
#pragma omp parallel for schedule(static)
  for (long b = 0; b < static_cast<long>(B); ++b) {
    const T* hlast = ws.hs.data() + (static_cast<size_t>(b) * (S + 1) + S) * H;
    T* dst = ws.hT.data() + static_cast<size_t>(b) * H;
    for (uint32_t k = 0; k < H; ++k) dst[k] = hlast[k];
  }
  fc1.forward(ws.hT.data(), ws.z1.data(), B);
  for (size_t i = 0; i < B * d.head_hidden; ++i)
    ws.a1[i] = ws.z1[i] > T{} ? ws.z1[i] : T{};
  fc2.forward(ws.a1.data(), ws.out.data(), B);
}

template <class T>
double LatentTemporalModel<T>::loss_and_grad(Workspace<T>& ws, size_t B) const {
  const size_t n = B * dims_.outputs;
  double acc = 0.0;
  const double scale = 2.0 / static_cast<double>(n);
  for (size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(ws.out[i]) - static_cast<double>(ws.labels[i]);
    acc += d * d;
    ws.dout[i] = static_cast<T>(scale * d);
  }
  return acc / static_cast<double>(n);
}

template <class T>
double LatentTemporalModel<T>::loss_only(const Workspace<T>& ws, size_t B) const {
  const size_t n = B * dims_.outputs;
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(ws.out[i]) - static_cast<double>(ws.labels[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(n);
}

template <class T>
void LatentTemporalModel<T>::backward(Workspace<T>& ws, size_t B) {
  const ModelDims& d = dims_;
  const size_t M = B * d.segments;
  const uint32_t H = d.lstm_hidden, S = d.segments, G = 4 * H;
  const uint32_t I = d.lstm_input();

  // head
  fc2.backward(ws.a1.data(), ws.dout.data(), ws.da1.data(), B);
  for (size_t i = 0; i < B * d.head_hidden; ++i)
    ws.dz1[i] = ws.z1[i] > T{} ? ws.da1[i] : T{};
  fc1.backward(ws.hT.data(), ws.dz1.data(), ws.dhT.data(), B);

  // LSTM backward through time
  std::copy(ws.dhT.begin(), ws.dhT.end(), ws.dh.begin());
  std::fill(ws.dc.begin(), ws.dc.end(), T{});
  for (long t = static_cast<long>(S) - 1; t >= 0; --t) {
#pragma omp parallel for schedule(static)
    for (long b = 0; b < static_cast<long>(B); ++b) {
      const T* gate = ws.gates.data() + (static_cast<size_t>(b) * S + t) * G;
      const T* tc = ws.tanhc.data() + (static_cast<size_t>(b) * S + t) * H;
      const T* cprev = ws.cs.data() + (static_cast<size_t>(b) * (S + 1) + t) * H;
      T* dh = ws.dh.data() + static_cast<size_t>(b) * H;
      T* dc = ws.dc.data() + static_cast<size_t>(b) * H;
      T* dpre = ws.dgates.data() + (static_cast<size_t>(b) * S + t) * G;
      for (uint32_t k = 0; k < H; ++k) {
        const T i_g = gate[k], f_g = gate[H + k], g_g = gate[2 * H + k], o_g = gate[3 * H + k];
        const T do_g = dh[k] * tc[k];
        const T dct = dc[k] + dh[k] * o_g * (T{1} - tc[k] * tc[k]);
        const T di = dct * g_g;
        const T df = dct * cprev[k];
        const T dg = dct * i_g;
        dpre[k] = di * i_g * (T{1} - i_g);
        dpre[H + k] = df * f_g * (T{1} - f_g);
        dpre[2 * H + k] = dg * (T{1} - g_g * g_g);
        dpre[3 * H + k] = do_g * o_g * (T{1} - o_g);
        dc[k] = dct * f_g;  // becomes dc_{t-1}
      }
      // dx_t and dh_{t-1}
      T* dx = ws.dp2.data() + (static_cast<size_t>(b) * S + t) * I;
      for (uint32_t j = 0; j < I; ++j)
        dx[j] = dot8(lstm.wih.data() + static_cast<size_t>(j) * G, dpre, G);
      for (uint32_t j = 0; j < H; ++j)
        dh[j] = dot8(lstm.whh.data() + static_cast<size_t>(j) * G, dpre, G);
    }
  }
  // LSTM weight gradients, fixed (t, b) order within each row task
#pragma omp parallel for schedule(static)
  for (long j = 0; j < static_cast<long>(I); ++j) {
    T* row = lstm.g_wih.data() + static_cast<size_t>(j) * G;
    for (uint32_t t = 0; t < S; ++t)
      for (size_t b = 0; b < B; ++b)
        axpy(row, ws.p2[(b * S + t) * I + static_cast<size_t>(j)],
             ws.dgates.data() + (b * S + t) * G, G);
  }
#pragma omp parallel for schedule(static)
  for (long j = 0; j < static_cast<long>(H); ++j) {
    T* row = lstm.g_whh.data() + static_cast<size_t>(j) * G;
    for (uint32_t t = 0; t < S; ++t)
      for (size_t b = 0; b < B; ++b)
        axpy(row, ws.hs[(b * (S + 1) + t) * H + static_cast<size_t>(j)],
             ws.dgates.data() + (b * S + t) * G, G);
  }
  for (uint32_t t = 0; t < S; ++t)
    for (size_t b = 0; b < B; ++b) {
      axpy(lstm.g_bih.data(), T{1}, ws.dgates.data() + (b * S + t) * G, G);
      axpy(lstm.g_bhh.data(), T{1}, ws.dgates.data() + (b * S + t) * G, G);
    }

  // conv block 2 backward (ws.d2 in-place: BN consumes the relu/pool grad)
  affine_relu_pool_backward(ws.p2.data(), ws.idx2.data(), ws.dp2.data(), d.conv_channels,
                            ws.d2.data(), M, d.h1(), d.w1());
  bn2.backward(ws.xhat2.data(), ws.d2.data(), ws.d2.data(), M,
               static_cast<size_t>(d.h1()) * d.w1());
  conv2.backward(ws.p1.data(), ws.d2.data(), ws.dp1.data(), M, d.h1(), d.w1());

  // conv block 1 backward
  affine_relu_pool_backward(ws.p1.data(), ws.idx1.data(), ws.dp1.data(), d.conv_channels,
                            ws.d1.data(), M, d.seg_cols(), d.bins);
  bn1.backward(ws.xhat1.data(), ws.d1.data(), ws.d1.data(), M,
               static_cast<size_t>(d.seg_cols()) * d.bins);
  conv1.backward(ws.x.data(), ws.d1.data(), nullptr, M, d.seg_cols(), d.bins);
}

// --- footprint ----------------------------------------------------------------

Footprint footprint(const ModelDims& d) {
  Footprint f;
  const size_t conv1_p = static_cast<size_t>(d.conv_channels) * d.in_channels * 9 + d.conv_channels;
  const size_t conv2_p = static_cast<size_t>(d.conv_channels) * d.conv_channels * 9 + d.conv_channels;
  const size_t bn_p = 2ull * d.conv_channels;      // per layer
  const size_t bn_s = 2ull * d.conv_channels;      // running stats per layer
  const size_t lstm_p = 4ull * d.lstm_hidden * (d.lstm_input() + d.lstm_hidden) + 8ull * d.lstm_hidden;
  const size_t fc1_p = static_cast<size_t>(d.head_hidden) * d.lstm_hidden + d.head_hidden;
  const size_t fc2_p = static_cast<size_t>(d.outputs) * d.head_hidden + d.outputs;
  f.param_count = conv1_p + conv2_p + 2 * bn_p + lstm_p + fc1_p + fc2_p;
  f.state_count = 2 * bn_s;
  f.param_bytes = (f.param_count + f.state_count) * 4;

  f.input_elems = d.window_elems();
  f.input_bytes = f.input_elems * 4;

  const size_t seg1 = static_cast<size_t>(d.conv_channels) * d.seg_cols() * d.bins;
  const size_t pool1 = static_cast<size_t>(d.conv_channels) * d.h1() * d.w1();
  const size_t pool2 = static_cast<size_t>(d.conv_channels) * d.h2() * d.w2();
  // outputs of conv, bn, relu, pool per segment; LSTM gates/cell/hidden per
  // step; head activations
  size_t act = d.segments * (3 * seg1 + pool1 + 3 * pool1 + pool2);
  act += d.segments * (4ull * d.lstm_hidden + 3ull * d.lstm_hidden);
  act += 2ull * d.head_hidden + d.outputs;
  f.activation_elems = act;
  f.activation_bytes = act * 4;

  // multiply-add = 2 flops, activation evaluation = 1 flop
  size_t flops = 0;
  flops += d.segments * (2ull * seg1 * d.in_channels * 9 + seg1);        // conv1
  flops += d.segments * (2ull * seg1 + seg1 + 3 * pool1);                // bn1+relu+pool
  flops += d.segments * (2ull * pool1 * d.conv_channels * 9 + pool1);    // conv2
  flops += d.segments * (2ull * pool1 + pool1 + 3 * pool2);              // bn2+relu+pool
  flops += d.segments * (2ull * 4 * d.lstm_hidden * (d.lstm_input() + d.lstm_hidden) +
                         4ull * d.lstm_hidden /* bias adds */ +
                         13ull * d.lstm_hidden /* gate activations + cell update */);
  flops += 2ull * d.head_hidden * d.lstm_hidden + d.head_hidden * 2;     // fc1 + relu
  flops += 2ull * d.outputs * d.head_hidden + d.outputs;                 // fc2
  f.flops = flops;

  f.arithmetic_intensity = static_cast<double>(f.flops) /
                           static_cast<double>(f.param_bytes + f.activation_bytes + f.input_bytes);
  return f;
}

std::string footprint_report(const ModelDims& d) {
  Footprint f = footprint(d);
  std::ostringstream os;
  char buf[128];
  os << "model footprint (" << d.descriptor() << ")\n";
  os << "  input:        " << d.in_channels << " x " << d.window_cols << " x " << d.bins
     << " = " << f.input_elems << " elements, " << f.input_bytes << " bytes float32\n";
  std::snprintf(buf, sizeof(buf), "  parameters:   %zu trainable + %zu running stats = %zu bytes (%.1f KB) float32\n",
                f.param_count, f.state_count, f.param_bytes, f.param_bytes / 1024.0);
  os << buf;
  std::snprintf(buf, sizeof(buf), "  activations:  %zu elements, %zu bytes (batch 1)\n",
                f.activation_elems, f.activation_bytes);
  os << buf;
  std::snprintf(buf, sizeof(buf), "  flops:        %zu per inference\n", f.flops);
  os << buf;
  std::snprintf(buf, sizeof(buf), "  arithmetic intensity: %.4f flop/byte\n", f.arithmetic_intensity);
  os << buf;
  std::snprintf(buf, sizeof(buf),
                "  note: published reference figures for this design report 209.5 KB of model\n"
                "  parameters and a 1.21 MB input; this build measures %.1f KB of parameters\n"
                "  and a %.2f MB input. The reference input figure is inconsistent with a\n",
                f.param_bytes / 1024.0, f.input_bytes / (1024.0 * 1024.0));
  os << buf;
  os << "  " << d.in_channels << "x" << d.window_cols << "x" << d.bins
     << " float32 window (= " << f.input_bytes << " bytes), so both are printed.\n";
  return os.str();
}

template class LatentTemporalModel<float>;
template class LatentTemporalModel<double>;

}  // namespace bw::nn
