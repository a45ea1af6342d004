#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "core/error.hpp"

namespace bw::nn {

// Minimal dense tensor, 64-bit values, row-major. Datasets keep float32
// storage; gradient checks and test oracles run through this type.
struct Tensor {
  std::vector<size_t> shape;
  std::vector<double> v;

  Tensor() = default;
  explicit Tensor(std::vector<size_t> s) : shape(std::move(s)) {
    v.assign(element_count(shape), 0.0);
  }

  static size_t element_count(const std::vector<size_t>& s) {
    size_t n = 1;
    for (size_t d : s) n *= d;
    return n;
  }

  size_t size() const { return v.size(); }

  void check_finite(const char* what) const {
    for (double x : v)
      require(std::isfinite(x), Errc::non_finite, std::string(what) + ": non-finite value");
  }
};

// --- fixed-order vector kernels ---------------------------------------------
// Eight independent accumulator lanes with a fixed combine order: the result
// does not depend on the worker count, only on n and the data.

template <class T>
inline T dot8(const T* x, const T* y, size_t n) {
  T acc0{}, acc1{}, acc2{}, acc3{}, acc4{}, acc5{}, acc6{}, acc7{};
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 += x[i + 0] * y[i + 0];
    acc1 += x[i + 1] * y[i + 1];
    acc2 += x[i + 2] * y[i + 2];
    acc3 += x[i + 3] * y[i + 3];
    acc4 += x[i + 4] * y[i + 4];
    acc5 += x[i + 5] * y[i + 5];
    acc6 += x[i + 6] * y[i + 6];
    acc7 += x[i + 7] * y[i + 7];
  }
  T tail{};
  for (; i < n; ++i) tail += x[i] * y[i];
  return (((acc0 + acc1) + (acc2 + acc3)) + ((acc4 + acc5) + (acc6 + acc7))) + tail;
}

template <class T>
inline T sum8(const T* x, size_t n) {
  T acc0{}, acc1{}, acc2{}, acc3{}, acc4{}, acc5{}, acc6{}, acc7{};
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 += x[i + 0];
    acc1 += x[i + 1];
    acc2 += x[i + 2];
    acc3 += x[i + 3];
    acc4 += x[i + 4];
    acc5 += x[i + 5];
    acc6 += x[i + 6];
    acc7 += x[i + 7];
  }
  T tail{};
  for (; i < n; ++i) tail += x[i];
  return (((acc0 + acc1) + (acc2 + acc3)) + ((acc4 + acc5) + (acc6 + acc7))) + tail;
}

// y += a * x
template <class T>
inline void axpy(T* y, T a, const T* x, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace bw::nn
