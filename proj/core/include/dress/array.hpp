#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dress::nd {

// Dense row-major array of 64-bit floats. Extents are strictly positive;
// a default-constructed Array is the empty placeholder (size 0).
class Array {
 public:
  Array() = default;

  explicit Array(std::vector<int> shape) : shape_(std::move(shape)) {
    std::size_t n = 1;
    for (int d : shape_) {
      if (d <= 0) throw std::invalid_argument("Array: extent must be positive");
      n *= static_cast<std::size_t>(d);
    }
    data_.assign(n, 0.0);
  }

  static Array zeros(std::vector<int> shape) { return Array(std::move(shape)); }

  static Array vec(int n) { return Array({n}); }

  static Array mat(int rows, int cols) { return Array({rows, cols}); }

  static Array scalar(double v) {
    Array a({1});
    a.data_[0] = v;
    return a;
  }

  static Array from(std::vector<int> shape, std::vector<double> values) {
    Array a(std::move(shape));
    if (values.size() != a.size()) throw std::invalid_argument("Array: data/shape mismatch");
    a.data_ = std::move(values);
    return a;
  }

  int ndim() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  int dim(int i) const { return shape_.at(static_cast<std::size_t>(i)); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // 2-d access; no bounds check in release builds beyond the row math.
  double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * shape_[1] + c]; }
  double at(int r, int c) const { return data_[static_cast<std::size_t>(r) * shape_[1] + c]; }

  void fill(double v) { data_.assign(data_.size(), v); }
  void zero() { fill(0.0); }

  bool same_shape(const Array& o) const { return shape_ == o.shape_; }

  const std::vector<double>& values() const { return data_; }

 private:
  std::vector<int> shape_;
  std::vector<double> data_;
};

}  // namespace dress::nd
