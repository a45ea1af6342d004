#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "core/error.hpp"
#include "dsp/pipeline.hpp"

namespace bw::nn {

// Random-access view over model-input windows (float32 tensor + 39 label).
class WindowSource {
 public:
  virtual ~WindowSource() = default;
  virtual size_t size() const = 0;
  virtual uint32_t channels() const = 0;
  virtual uint32_t cols() const = 0;
  virtual uint32_t bins() const = 0;
  virtual const float* tensor(size_t i) const = 0;
  virtual const float* label(size_t i) const = 0;

  size_t tensor_elems() const { return static_cast<size_t>(channels()) * cols() * bins(); }
};

class DatasetSource final : public WindowSource {
 public:
  explicit DatasetSource(dsp::WindowDataset ds) : ds_(std::move(ds)) {}
  size_t size() const override { return ds_.size(); }
  uint32_t channels() const override { return ds_.channels; }
  uint32_t cols() const override { return ds_.cols; }
  uint32_t bins() const override { return ds_.bins; }
  const float* tensor(size_t i) const override { return ds_.tensor(i); }
  const float* label(size_t i) const override { return ds_.label(i); }
  const dsp::WindowDataset& dataset() const { return ds_; }

 private:
  dsp::WindowDataset ds_;
};

class ConcatSource final : public WindowSource {
 public:
  void add(std::shared_ptr<const WindowSource> src) {
    require(src != nullptr && src->size() > 0, Errc::empty_dataset, "empty dataset part");
    if (!parts_.empty()) {
      require(src->channels() == channels() && src->cols() == cols() && src->bins() == bins(),
              Errc::shape_mismatch, "dataset parts have mismatched window shapes");
    }
    offsets_.push_back(total_);
    total_ += src->size();
    parts_.push_back(std::move(src));
  }
  size_t size() const override { return total_; }
  uint32_t channels() const override { return parts_.front()->channels(); }
  uint32_t cols() const override { return parts_.front()->cols(); }
  uint32_t bins() const override { return parts_.front()->bins(); }
  const float* tensor(size_t i) const override {
    size_t p = locate(i);
    return parts_[p]->tensor(i - offsets_[p]);
  }
  const float* label(size_t i) const override {
    size_t p = locate(i);
    return parts_[p]->label(i - offsets_[p]);
  }
  bool empty() const { return parts_.empty(); }

 private:
  size_t locate(size_t i) const {
    size_t lo = 0, hi = parts_.size();
    while (lo + 1 < hi) {
      size_t mid = (lo + hi) / 2;
      if (offsets_[mid] <= i) lo = mid;
      else hi = mid;
    }
    return lo;
  }
  std::vector<std::shared_ptr<const WindowSource>> parts_;
  std::vector<size_t> offsets_;
  size_t total_ = 0;
};

class SubsetSource final : public WindowSource {
 public:
  SubsetSource(std::shared_ptr<const WindowSource> base, std::vector<size_t> indices)
      : base_(std::move(base)), idx_(std::move(indices)) {}
  size_t size() const override { return idx_.size(); }
  uint32_t channels() const override { return base_->channels(); }
  uint32_t cols() const override { return base_->cols(); }
  uint32_t bins() const override { return base_->bins(); }
  const float* tensor(size_t i) const override { return base_->tensor(idx_[i]); }
  const float* label(size_t i) const override { return base_->label(idx_[i]); }

 private:
  std::shared_ptr<const WindowSource> base_;
  std::vector<size_t> idx_;
};

}  // namespace bw::nn
