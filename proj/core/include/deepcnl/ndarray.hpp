#ifndef DEEPCNL_NDARRAY_HPP
#define DEEPCNL_NDARRAY_HPP

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace deepcnl {

/// Dense row-major array of doubles. The numeric substrate for every
/// tensor in the pipeline (observation matrices, kernels, LSTM weights).
class NdArray {
 public:
  NdArray() = default;
  explicit NdArray(std::vector<std::size_t> shape);
  NdArray(std::vector<std::size_t> shape, std::vector<double> data);

  static NdArray scalar(double v);
  static NdArray zeros_like(const NdArray& other);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  std::size_t ndim() const { return shape_.size(); }

  // 2-d accessors; valid only when ndim() == 2
  std::size_t rows() const { return shape_[0]; }
  std::size_t cols() const { return shape_[1]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& vec() const { return data_; }

  void fill(double v);
  bool all_finite() const;
  bool same_shape(const NdArray& other) const { return shape_ == other.shape_; }

  double sum_of_squares() const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

}  // namespace deepcnl

#endif  // DEEPCNL_NDARRAY_HPP
