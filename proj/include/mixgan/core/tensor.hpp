#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mixgan/core/error.hpp"

namespace mixgan {

using Shape = std::vector<std::size_t>;

inline std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ')';
  return os.str();
}

// Dense row-major tensor. Rank 1, 2 and 4 are what the pipeline uses.
// float carries all training state; double instantiations exist for the
// finite-difference gradient suite.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape) : shape_(std::move(shape)) {
    data_.assign(numel(shape_), T(0));
  }
  Tensor(Shape shape, T fill) : shape_(std::move(shape)) {
    data_.assign(numel(shape_), fill);
  }
  Tensor(Shape shape, std::initializer_list<T> vals) : shape_(std::move(shape)) {
    if (vals.size() != numel(shape_))
      throw ShapeError("tensor literal size does not match shape " +
                       shape_str(shape_));
    data_.assign(vals);
  }

  static std::size_t numel(const Shape& s) {
    std::size_t n = 1;
    for (auto d : s) n *= d;
    return s.empty() ? 0 : n;
  }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_[i]; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& at2(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  const T& at2(std::size_t i, std::size_t j) const {
    return data_[i * shape_[1] + j];
  }
  T& at4(std::size_t n, std::size_t c, std::size_t h, std::size_t w) {
    return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
  }
  const T& at4(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }
  void zero() { fill(T(0)); }

  // Reinterprets the buffer under a new shape with the same element count.
  void reshape(Shape s) {
    if (numel(s) != data_.size())
      throw ShapeError("reshape " + shape_str(shape_) + " -> " + shape_str(s) +
                       " changes element count");
    shape_ = std::move(s);
  }
  Tensor reshaped(Shape s) const {
    Tensor t = *this;
    t.reshape(std::move(s));
    return t;
  }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  bool all_finite() const {
    for (const T& v : data_)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(shape_);
    for (std::size_t i = 0; i < data_.size(); ++i)
      out[i] = static_cast<U>(data_[i]);
    return out;
  }

 private:
  Shape shape_;
  std::vector<T> data_;
};

template <typename T>
void require_shape(const Tensor<T>& t, const Shape& want, const char* what) {
  if (t.shape() != want)
    throw ShapeError(std::string(what) + ": expected " + shape_str(want) +
                     ", got " + shape_str(t.shape()));
}

template <typename T>
void require_rank(const Tensor<T>& t, std::size_t rank, const char* what) {
  if (t.rank() != rank)
    throw ShapeError(std::string(what) + ": expected rank " +
                     std::to_string(rank) + ", got " + shape_str(t.shape()));
}

}  // namespace mixgan
