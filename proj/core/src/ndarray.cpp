#include "deepcnl/ndarray.hpp"

#include <cmath>
#include <stdexcept>

namespace deepcnl {

namespace {
std::size_t product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}
}  // namespace

NdArray::NdArray(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(product(shape_), 0.0) {}

NdArray::NdArray(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (product(shape_) != data_.size())
    throw std::invalid_argument("NdArray: shape does not match data size");
}

NdArray NdArray::scalar(double v) { return NdArray({1}, {v}); }

NdArray NdArray::zeros_like(const NdArray& other) { return NdArray(other.shape_); }

void NdArray::fill(double v) {
  for (double& x : data_) x = v;
}

bool NdArray::all_finite() const {
  for (double x : data_)
    if (!std::isfinite(x)) return false;
  return true;
}

double NdArray::sum_of_squares() const {
  double s = 0.0;
  for (double x : data_) s += x * x;
  return s;
}

}  // namespace deepcnl
