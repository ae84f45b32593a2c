#include "partgan/tensor.hpp"

#include <sstream>
#include <stdexcept>

namespace partgan {

std::string shape_to_string(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << "x";
    os << s[i];
  }
  os << "]";
  return os.str();
}

Eigen::Index shape_size(const Shape& s) {
  Eigen::Index n = 1;
  for (Eigen::Index d : s) n *= d;
  return n;
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  for (Eigen::Index d : shape_) {
    if (d <= 0) throw std::invalid_argument("tensor extents must be positive, got " + shape_to_string(shape_));
  }
  data_ = Eigen::ArrayXd::Zero(shape_size(shape_));
}

Tensor::Tensor(Shape shape, Eigen::ArrayXd data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_size(shape_) != data_.size())
    throw std::invalid_argument("tensor shape " + shape_to_string(shape_) + " does not match data length " +
                                std::to_string(data_.size()));
}

Tensor Tensor::constant(Shape shape, double value) {
  Tensor t(std::move(shape));
  t.data_.setConstant(value);
  return t;
}

Eigen::Map<MatrixRM> Tensor::rows() {
  Eigen::Index n = shape_.empty() ? 1 : shape_[0];
  return {data_.data(), n, data_.size() / n};
}

Eigen::Map<const MatrixRM> Tensor::rows() const {
  Eigen::Index n = shape_.empty() ? 1 : shape_[0];
  return {data_.data(), n, data_.size() / n};
}

Tensor Tensor::reshaped(Shape target) const {
  if (shape_size(target) != data_.size())
    throw std::invalid_argument("cannot reshape " + shape_to_string(shape_) + " to " + shape_to_string(target));
  return Tensor(std::move(target), data_);
}

}  // namespace partgan
