#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fampe/error.hpp"

namespace fampe {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

inline std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

/// Dense n-dimensional array of doubles in row-major order.
class Tensor {
public:
  Tensor() = default;

  explicit Tensor(Shape shape, double fill = 0.0)
      : shape_(std::move(shape)), data_(shape_size(shape_), fill) {
    validate_extents();
  }

  Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
    validate_extents();
    if (data_.size() != shape_size(shape_)) {
      throw Error(errc::shape_mismatch, "tensor data length " + std::to_string(data_.size()) +
                                            " does not match shape " + shape_string(shape_));
    }
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  std::vector<double>& storage() noexcept { return data_; }
  const std::vector<double>& storage() const noexcept { return data_; }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  // C x H x W accessors; only meaningful for rank-3 tensors.
  double& at(std::size_t c, std::size_t y, std::size_t x) {
    return data_[(c * shape_[1] + y) * shape_[2] + x];
  }
  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return data_[(c * shape_[1] + y) * shape_[2] + x];
  }

  Tensor reshaped(Shape shape) const {
    if (shape_size(shape) != data_.size()) {
      throw Error(errc::shape_mismatch,
                  "cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
    }
    return Tensor(std::move(shape), data_);
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

private:
  void validate_extents() const {
    for (auto extent : shape_) {
      if (extent == 0) throw Error(errc::invalid_argument, "tensor extents must be positive, got " + shape_string(shape_));
    }
  }

  Shape shape_;
  std::vector<double> data_;
};

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw Error(errc::shape_mismatch,
                std::string(what) + ": shapes " + shape_string(a.shape()) + " and " + shape_string(b.shape()) + " differ");
  }
}

inline void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(errc::non_finite, std::string(what) + ": non-finite value at flat index " + std::to_string(i));
    }
  }
}

inline bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

/// Real 2-D grid; one image channel or one frequency mask.
struct Grid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Grid() = default;
  Grid(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  Grid(std::size_t r, std::size_t c, std::vector<double> d) : rows(r), cols(c), data(std::move(d)) {
    if (data.size() != rows * cols) {
      throw Error(errc::shape_mismatch, "grid data length does not match " + std::to_string(rows) + "x" + std::to_string(cols));
    }
  }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data[r * cols + c]; }
  std::size_t size() const noexcept { return data.size(); }
  bool empty() const noexcept { return data.empty(); }

  friend bool operator==(const Grid&, const Grid&) = default;
};

inline Grid channel_of(const Tensor& image, std::size_t c) {
  const std::size_t h = image.dim(1), w = image.dim(2);
  const double* p = image.data() + c * h * w;
  return Grid(h, w, std::vector<double>(p, p + h * w));
}

inline void set_channel(Tensor& image, std::size_t c, const Grid& g) {
  const std::size_t h = image.dim(1), w = image.dim(2);
  if (g.rows != h || g.cols != w) throw Error(errc::shape_mismatch, "channel grid does not match image plane");
  std::copy(g.data.begin(), g.data.end(), image.data() + c * h * w);
}

inline void require_chw(const Tensor& image, const char* what) {
  if (image.rank() != 3) {
    throw Error(errc::shape_mismatch, std::string(what) + ": expected a CxHxW image, got " + shape_string(image.shape()));
  }
}

} // namespace fampe
