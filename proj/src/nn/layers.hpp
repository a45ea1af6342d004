#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "nn/tensor.hpp"

namespace bw::nn {

// One trainable buffer: weights, gradient, momentum. Initialization, the
// optimizer step and serialization all walk these in declaration order.
template <class T>
struct ParamRef {
  std::string name;
  std::vector<T>* w;
  std::vector<T>* g;
  std::vector<T>* m;
};

template <class T>
struct StateRef {  // non-trained state (batchnorm running statistics)
  std::string name;
  std::vector<T>* s;
};

namespace detail {
template <class T>
void init_uniform(std::vector<T>& w, Rand& rng, double bound) {
  for (auto& x : w) x = static_cast<T>(rng.uniform(-bound, bound));
}
}  // namespace detail

// --- 3x3 convolution, padding 1, stride 1 ------------------------------------

template <class T>
struct Conv3x3 {
  uint32_t in_ch = 0, out_ch = 0;
  std::vector<T> w, b;    // w: [oc][ic][3][3]
  std::vector<T> gw, gb;  // gradients
  std::vector<T> mw, mb;  // momentum

  void configure(uint32_t ic, uint32_t oc) {
    in_ch = ic;
    out_ch = oc;
    w.assign(static_cast<size_t>(oc) * ic * 9, T{});
    b.assign(oc, T{});
    gw.assign(w.size(), T{});
    gb.assign(b.size(), T{});
    mw.assign(w.size(), T{});
    mb.assign(b.size(), T{});
  }

  void init(Rand& rng) {
    double bound = 1.0 / std::sqrt(static_cast<double>(in_ch) * 9.0);
    detail::init_uniform(w, rng, bound);
    detail::init_uniform(b, rng, bound);
  }

  // in: [M][in_ch][H][W] -> out: [M][out_ch][H][W]
  void forward(const T* in, T* out, size_t M, uint32_t H, uint32_t W) const {
    const size_t in_item = static_cast<size_t>(in_ch) * H * W;
    const size_t out_item = static_cast<size_t>(out_ch) * H * W;
#pragma omp parallel for schedule(static)
    for (long m = 0; m < static_cast<long>(M); ++m) {
      const T* src = in + m * in_item;
      T* dst = out + m * out_item;
      for (uint32_t oc = 0; oc < out_ch; ++oc) {
        T* plane = dst + static_cast<size_t>(oc) * H * W;
        for (size_t i = 0; i < static_cast<size_t>(H) * W; ++i) plane[i] = b[oc];
        for (uint32_t ic = 0; ic < in_ch; ++ic) {
          const T* splane = src + static_cast<size_t>(ic) * H * W;
          const T* wk = w.data() + (static_cast<size_t>(oc) * in_ch + ic) * 9;
          for (uint32_t y = 0; y < H; ++y) {
            for (int ky = 0; ky < 3; ++ky) {
              const int yy = static_cast<int>(y) + ky - 1;
              if (yy < 0 || yy >= static_cast<int>(H)) continue;
              const T* srow = splane + static_cast<size_t>(yy) * W;
              T* drow = plane + static_cast<size_t>(y) * W;
              for (int kx = 0; kx < 3; ++kx) {
                const T wv = wk[ky * 3 + kx];
                const int off = kx - 1;
                const uint32_t x0 = off < 0 ? 1 : 0;
                const uint32_t x1 = off > 0 ? W - 1 : W;
                for (uint32_t x = x0; x < x1; ++x) drow[x] += wv * srow[x + off];
              }
            }
          }
        }
      }
    }
  }

  // Accumulates gw/gb; writes din (may be null for the first layer).
  void backward(const T* in, const T* dout, T* din, size_t M, uint32_t H, uint32_t W) {
    const size_t in_item = static_cast<size_t>(in_ch) * H * W;
    const size_t out_item = static_cast<size_t>(out_ch) * H * W;
    // weight gradients: one task per tap, fixed-order sums inside
    const long taps = static_cast<long>(out_ch) * in_ch * 9;
#pragma omp parallel for schedule(static)
    for (long t = 0; t < taps; ++t) {
      const uint32_t oc = static_cast<uint32_t>(t / (in_ch * 9));
      const uint32_t ic = static_cast<uint32_t>((t / 9) % in_ch);
      const int ky = static_cast<int>((t % 9) / 3), kx = static_cast<int>(t % 3);
      const int offy = ky - 1, offx = kx - 1;
      const uint32_t x0 = offx < 0 ? 1 : 0;
      const uint32_t x1 = offx > 0 ? W - 1 : W;
      T acc{};
      for (size_t m = 0; m < M; ++m) {
        const T* splane = in + m * in_item + static_cast<size_t>(ic) * H * W;
        const T* dplane = dout + m * out_item + static_cast<size_t>(oc) * H * W;
        for (uint32_t y = 0; y < H; ++y) {
          const int yy = static_cast<int>(y) + offy;
          if (yy < 0 || yy >= static_cast<int>(H)) continue;
          acc += dot8(dplane + static_cast<size_t>(y) * W + x0,
                      splane + static_cast<size_t>(yy) * W + x0 + offx, x1 - x0);
        }
      }
      gw[static_cast<size_t>(t)] += acc;
    }
#pragma omp parallel for schedule(static)
    for (long oc = 0; oc < static_cast<long>(out_ch); ++oc) {
      T acc{};
      for (size_t m = 0; m < M; ++m)
        acc += sum8(dout + m * out_item + static_cast<size_t>(oc) * H * W,
                    static_cast<size_t>(H) * W);
      gb[static_cast<size_t>(oc)] += acc;
    }
    if (din == nullptr) return;
// input gradient: full correlation with the flipped kernel
#pragma omp parallel for schedule(static)
    for (long m = 0; m < static_cast<long>(M); ++m) {
      T* dst = din + m * in_item;
      const T* dsrc = dout + m * out_item;
      for (size_t i = 0; i < in_item; ++i) dst[i] = T{};
      for (uint32_t oc = 0; oc < out_ch; ++oc) {
        const T* dplane = dsrc + static_cast<size_t>(oc) * H * W;
        for (uint32_t ic = 0; ic < in_ch; ++ic) {
          T* plane = dst + static_cast<size_t>(ic) * H * W;
          const T* wk = w.data() + (static_cast<size_t>(oc) * in_ch + ic) * 9;
          for (uint32_t y = 0; y < H; ++y) {
            for (int ky = 0; ky < 3; ++ky) {
              const int yy = static_cast<int>(y) + ky - 1;  // dout row feeding input row y
              if (yy < 0 || yy >= static_cast<int>(H)) continue;
              // input (y, x) receives dout(yy, xx) * w[ky', kx'] with
              // yy = y + ky - 1 meaning ky' = 2 - ky after the flip
              const T* drow = dplane + static_cast<size_t>(yy) * W;
              T* row = plane + static_cast<size_t>(y) * W;
              for (int kx = 0; kx < 3; ++kx) {
                const T wv = wk[(2 - ky) * 3 + (2 - kx)];
                const int off = kx - 1;
                const uint32_t x0 = off < 0 ? 1 : 0;
                const uint32_t x1 = off > 0 ? W - 1 : W;
                for (uint32_t x = x0; x < x1; ++x) row[x] += wv * drow[x + off];
              }
            }
          }
        }
      }
    }
  }

  void params(std::vector<ParamRef<T>>& out, const std::string& prefix) {
    out.push_back({prefix + ".w", &w, &gw, &mw});
    out.push_back({prefix + ".b", &b, &gb, &mb});
  }
};

// --- batch normalization ------------------------------------------------------

template <class T>
struct BatchNorm {
  uint32_t ch = 0;
  std::vector<T> gamma, beta, g_gamma, g_beta, m_gamma, m_beta;
  std::vector<T> run_mean, run_var;
  std::vector<T> mean, var;  // batch statistics cached by forward_train
  double momentum = 0.1;
  double eps = 1e-5;

  void configure(uint32_t c) {
    ch = c;
    gamma.assign(c, T{1});
    beta.assign(c, T{});
    g_gamma.assign(c, T{});
    g_beta.assign(c, T{});
    m_gamma.assign(c, T{});
    m_beta.assign(c, T{});
    run_mean.assign(c, T{});
    run_var.assign(c, T{1});
    mean.assign(c, T{});
    var.assign(c, T{});
  }

  // in: [M][ch][S] -> xhat (normalized, cached for backward). Returns via
  // `out` the affine result gamma*xhat+beta. `out` may alias xhat storage
  // only if callers no longer need xhat (they do; keep separate).
  void forward_train(const T* in, T* xhat, size_t M, size_t S) {
    const size_t item = static_cast<size_t>(ch) * S;
    const size_t n = M * S;
#pragma omp parallel for schedule(static)
    for (long c = 0; c < static_cast<long>(ch); ++c) {
      T total{};
      for (size_t m = 0; m < M; ++m) total += sum8(in + m * item + c * S, S);
      const T mu = total / static_cast<T>(n);
      T sq{};
      for (size_t m = 0; m < M; ++m) {
        const T* p = in + m * item + c * S;
        T acc0{}, acc1{};
        size_t i = 0;
        for (; i + 2 <= S; i += 2) {
          const T d0 = p[i] - mu, d1 = p[i + 1] - mu;
          acc0 += d0 * d0;
          acc1 += d1 * d1;
        }
        for (; i < S; ++i) {
          const T d = p[i] - mu;
          acc0 += d * d;
        }
        sq += acc0 + acc1;
      }
      const T v = sq / static_cast<T>(n);
      mean[c] = mu;
      var[c] = v;
      run_mean[c] = static_cast<T>((1.0 - momentum) * run_mean[c] + momentum * mu);
      run_var[c] = static_cast<T>((1.0 - momentum) * run_var[c] + momentum * v);
      const T inv = static_cast<T>(1.0 / std::sqrt(static_cast<double>(v) + eps));
      for (size_t m = 0; m < M; ++m) {
        const T* p = in + m * item + c * S;
        T* q = xhat + m * item + c * S;
        for (size_t i = 0; i < S; ++i) q[i] = (p[i] - mu) * inv;
      }
    }
  }

  void forward_eval(const T* in, T* out_affine, size_t M, size_t S) const {
    const size_t item = static_cast<size_t>(ch) * S;
#pragma omp parallel for schedule(static)
    for (long m = 0; m < static_cast<long>(M); ++m) {
      for (uint32_t c = 0; c < ch; ++c) {
        const T inv = static_cast<T>(1.0 / std::sqrt(static_cast<double>(run_var[c]) + eps));
        const T a = gamma[c] * inv;
        const T b2 = beta[c] - a * run_mean[c];
        const T* p = in + m * item + static_cast<size_t>(c) * S;
        T* q = out_affine + m * item + static_cast<size_t>(c) * S;
        for (size_t i = 0; i < S; ++i) q[i] = a * p[i] + b2;
      }
    }
  }

  // dy is the gradient at the affine output; din receives the gradient at
  // the layer input. xhat is the cache from forward_train.
  void backward(const T* xhat, const T* dy, T* din, size_t M, size_t S) {
    const size_t item = static_cast<size_t>(ch) * S;
    const T n = static_cast<T>(M * S);
#pragma omp parallel for schedule(static)
    for (long c = 0; c < static_cast<long>(ch); ++c) {
      T sum_dy{}, sum_dy_xhat{};
      for (size_t m = 0; m < M; ++m) {
        const T* dyp = dy + m * item + c * S;
        const T* xp = xhat + m * item + c * S;
        sum_dy += sum8(dyp, S);
        sum_dy_xhat += dot8(dyp, xp, S);
      }
      g_gamma[c] += sum_dy_xhat;
      g_beta[c] += sum_dy;
      const T inv = static_cast<T>(1.0 / std::sqrt(static_cast<double>(var[c]) + eps));
      const T k = gamma[c] * inv;
      const T mean_dy = sum_dy / n;
      const T mean_dy_xhat = sum_dy_xhat / n;
      for (size_t m = 0; m < M; ++m) {
        const T* dyp = dy + m * item + c * S;
        const T* xp = xhat + m * item + c * S;
        T* dp = din + m * item + c * S;
        for (size_t i = 0; i < S; ++i)
          dp[i] = k * (dyp[i] - mean_dy - xp[i] * mean_dy_xhat);
      }
    }
  }

  void params(std::vector<ParamRef<T>>& out, const std::string& prefix) {
    out.push_back({prefix + ".gamma", &gamma, &g_gamma, &m_gamma});
    out.push_back({prefix + ".beta", &beta, &g_beta, &m_beta});
  }
  void states(std::vector<StateRef<T>>& out, const std::string& prefix) {
    out.push_back({prefix + ".run_mean", &run_mean});
    out.push_back({prefix + ".run_var", &run_var});
  }
};

// --- relu + 2x2 max pooling (fused helpers) ------------------------------------

// y = relu(gamma*xhat+beta) followed by 2x2/2 max pool; emits pooled values
// and flat argmax indices into the (H x W) plane. Ties take the first
// position in scan order.
template <class T>
void affine_relu_pool(const T* xhat, const T* gamma, const T* beta, uint32_t ch,
                      T* pooled, int32_t* idx, size_t M, uint32_t H, uint32_t W) {
  const uint32_t Ho = H / 2, Wo = W / 2;
  const size_t item = static_cast<size_t>(ch) * H * W;
  const size_t out_item = static_cast<size_t>(ch) * Ho * Wo;
#pragma omp parallel for schedule(static)
  for (long m = 0; m < static_cast<long>(M); ++m) {
    for (uint32_t c = 0; c < ch; ++c) {
      const T* plane = xhat + m * item + static_cast<size_t>(c) * H * W;
      T* pout = pooled + m * out_item + static_cast<size_t>(c) * Ho * Wo;
      int32_t* iout = idx + m * out_item + static_cast<size_t>(c) * Ho * Wo;
      const T g = gamma[c], b = beta[c];
      for (uint32_t y = 0; y < Ho; ++y) {
        for (uint32_t x = 0; x < Wo; ++x) {
          T best{};
          int32_t best_i = -1;
          for (uint32_t dy = 0; dy < 2; ++dy) {
            for (uint32_t dx = 0; dx < 2; ++dx) {
              const uint32_t yy = 2 * y + dy, xx = 2 * x + dx;
              const T v = g * plane[static_cast<size_t>(yy) * W + xx] + b;
              const T r = v > T{} ? v : T{};
              if (best_i < 0 || r > best) {
                best = r;
                best_i = static_cast<int32_t>(yy * W + xx);
              }
            }
          }
          pout[static_cast<size_t>(y) * Wo + x] = best;
          iout[static_cast<size_t>(y) * Wo + x] = best_i;
        }
      }
    }
  }
}

// Eval-path variant: input already carries the affine result.
template <class T>
void unit_affine_relu_pool(const T* y, uint32_t ch, T* pooled, int32_t* idx, size_t M,
                           uint32_t H, uint32_t W) {
  const uint32_t Ho = H / 2, Wo = W / 2;
  const size_t item = static_cast<size_t>(ch) * H * W;
  const size_t out_item = static_cast<size_t>(ch) * Ho * Wo;
#pragma omp parallel for schedule(static)
  for (long m = 0; m < static_cast<long>(M); ++m) {
    for (uint32_t c = 0; c < ch; ++c) {
      const T* plane = y + m * item + static_cast<size_t>(c) * H * W;
      T* pout = pooled + m * out_item + static_cast<size_t>(c) * Ho * Wo;
      int32_t* iout = idx + m * out_item + static_cast<size_t>(c) * Ho * Wo;
      for (uint32_t yy = 0; yy < Ho; ++yy) {
        for (uint32_t x = 0; x < Wo; ++x) {
          T best{};
          int32_t best_i = -1;
          for (uint32_t dy = 0; dy < 2; ++dy) {
            for (uint32_t dx = 0; dx < 2; ++dx) {
              const uint32_t py = 2 * yy + dy, px = 2 * x + dx;
              const T v = plane[static_cast<size_t>(py) * W + px];
              const T r = v > T{} ? v : T{};
              if (best_i < 0 || r > best) {
                best = r;
                best_i = static_cast<int32_t>(py * W + px);
              }
            }
          }
          pout[static_cast<size_t>(yy) * Wo + x] = best;
          iout[static_cast<size_t>(yy) * Wo + x] = best_i;
        }
      }
    }
  }
}

// Backward of the affine+relu+pool block: scatter pooled gradients to the
// argmax positions, masked by relu (pooled value > 0 iff the relu passed).
template <class T>
void affine_relu_pool_backward(const T* pooled, const int32_t* idx, const T* dpooled,
                               uint32_t ch, T* dy_affine, size_t M, uint32_t H,
                               uint32_t W) {
  const uint32_t Ho = H / 2, Wo = W / 2;
  const size_t item = static_cast<size_t>(ch) * H * W;
  const size_t out_item = static_cast<size_t>(ch) * Ho * Wo;
#pragma omp parallel for schedule(static)
  for (long m = 0; m < static_cast<long>(M); ++m) {
    T* dplane_base = dy_affine + m * item;
    for (size_t i = 0; i < item; ++i) dplane_base[i] = T{};
    for (uint32_t c = 0; c < ch; ++c) {
      const T* pv = pooled + m * out_item + static_cast<size_t>(c) * Ho * Wo;
      const int32_t* pi = idx + m * out_item + static_cast<size_t>(c) * Ho * Wo;
      const T* pd = dpooled + m * out_item + static_cast<size_t>(c) * Ho * Wo;
      T* dplane = dplane_base + static_cast<size_t>(c) * H * W;
      for (size_t i = 0; i < static_cast<size_t>(Ho) * Wo; ++i) {
        if (pv[i] > T{}) dplane[pi[i]] += pd[i];
      }
    }
  }
}

// --- LSTM ----------------------------------------------------------------------

// Single layer. Weights are stored transposed (input-major) so the forward
// pass is a run of contiguous axpys. Gate order: i, f, g, o.
template <class T>
struct Lstm {
  uint32_t input = 0, hidden = 0;
  std::vector<T> wih, whh;    // [input][4H], [hidden][4H]
  std::vector<T> b_ih, b_hh;  // [4H]
  std::vector<T> g_wih, g_whh, g_bih, g_bhh;
  std::vector<T> m_wih, m_whh, m_bih, m_bhh;

  void configure(uint32_t in, uint32_t h) {
    input = in;
    hidden = h;
    wih.assign(static_cast<size_t>(in) * 4 * h, T{});
    whh.assign(static_cast<size_t>(h) * 4 * h, T{});
    b_ih.assign(4 * h, T{});
    b_hh.assign(4 * h, T{});
    g_wih.assign(wih.size(), T{});
    g_whh.assign(whh.size(), T{});
    g_bih.assign(b_ih.size(), T{});
    g_bhh.assign(b_hh.size(), T{});
    m_wih.assign(wih.size(), T{});
    m_whh.assign(whh.size(), T{});
    m_bih.assign(b_ih.size(), T{});
    m_bhh.assign(b_hh.size(), T{});
  }

  void init(Rand& rng) {
    detail::init_uniform(wih, rng, 1.0 / std::sqrt(static_cast<double>(input)));
    detail::init_uniform(whh, rng, 1.0 / std::sqrt(static_cast<double>(hidden)));
    // biases zero, except the forget gate opens at 1.0
    for (uint32_t k = 0; k < hidden; ++k) b_ih[hidden + k] = T{1};
  }

  void params(std::vector<ParamRef<T>>& out, const std::string& prefix) {
    out.push_back({prefix + ".w_ih", &wih, &g_wih, &m_wih});
    out.push_back({prefix + ".w_hh", &whh, &g_whh, &m_whh});
    out.push_back({prefix + ".b_ih", &b_ih, &g_bih, &m_bih});
    out.push_back({prefix + ".b_hh", &b_hh, &g_bhh, &m_bhh});
  }
};

// --- linear ----------------------------------------------------------------------

template <class T>
struct Linear {
  uint32_t in = 0, out = 0;
  std::vector<T> w, b;  // w stored transposed: [in][out]
  std::vector<T> gw, gb, mw, mb;

  void configure(uint32_t i, uint32_t o) {
    in = i;
    out = o;
    w.assign(static_cast<size_t>(i) * o, T{});
    b.assign(o, T{});
    gw.assign(w.size(), T{});
    gb.assign(b.size(), T{});
    mw.assign(w.size(), T{});
    mb.assign(b.size(), T{});
  }

  void init(Rand& rng) {
    double bound = 1.0 / std::sqrt(static_cast<double>(in));
    detail::init_uniform(w, rng, bound);
    detail::init_uniform(b, rng, bound);
  }

  // x: [B][in] -> y: [B][out]
  void forward(const T* x, T* y, size_t B) const {
#pragma omp parallel for schedule(static)
    for (long m = 0; m < static_cast<long>(B); ++m) {
      T* yr = y + m * out;
      for (uint32_t o = 0; o < out; ++o) yr[o] = b[o];
      const T* xr = x + m * in;
      for (uint32_t j = 0; j < in; ++j) axpy(yr, xr[j], w.data() + static_cast<size_t>(j) * out, out);
    }
  }

  void backward(const T* x, const T* dy, T* dx, size_t B) {
#pragma omp parallel for schedule(static)
    for (long j = 0; j < static_cast<long>(in); ++j) {
      T* gr = g_w_row(static_cast<uint32_t>(j));
      for (size_t m = 0; m < B; ++m) axpy(gr, x[m * in + j], dy + m * out, out);
    }
    for (size_t m = 0; m < B; ++m) axpy(gb.data(), T{1}, dy + m * out, out);
    if (dx == nullptr) return;
#pragma omp parallel for schedule(static)
    for (long m = 0; m < static_cast<long>(B); ++m) {
      const T* dyr = dy + m * out;
      T* dxr = dx + m * in;
      for (uint32_t j = 0; j < in; ++j)
        dxr[j] = dot8(w.data() + static_cast<size_t>(j) * out, dyr, out);
    }
  }

  T* g_w_row(uint32_t j) { return gw.data() + static_cast<size_t>(j) * out; }

  void params(std::vector<ParamRef<T>>& out_refs, const std::string& prefix) {
    out_refs.push_back({prefix + ".w", &w, &gw, &mw});
    out_refs.push_back({prefix + ".b", &b, &gb, &mb});
  }
};

template <class T>
inline T sigmoid(T x) {
  return static_cast<T>(1.0 / (1.0 + std::exp(-static_cast<double>(x))));
}

}  // namespace bw::nn
