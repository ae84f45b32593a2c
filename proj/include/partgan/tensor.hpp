#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace partgan {

using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Shape = std::vector<Eigen::Index>;

std::string shape_to_string(const Shape& s);
Eigen::Index shape_size(const Shape& s);

// Dense row-major numeric array (last index fastest); the universal value type.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, Eigen::ArrayXd data);

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor constant(Shape shape, double value);

  const Shape& shape() const { return shape_; }
  Eigen::Index dim(std::size_t i) const { return shape_.at(i); }
  std::size_t rank() const { return shape_.size(); }
  Eigen::Index size() const { return data_.size(); }

  Eigen::ArrayXd& data() { return data_; }
  const Eigen::ArrayXd& data() const { return data_; }
  double operator[](Eigen::Index i) const { return data_[i]; }
  double& operator[](Eigen::Index i) { return data_[i]; }

  // Matrix view [dim(0) x size/dim(0)]: batch rows, flattened per-sample columns.
  Eigen::Map<MatrixRM> rows();
  Eigen::Map<const MatrixRM> rows() const;

  // Same data, new shape (sizes must agree).
  Tensor reshaped(Shape target) const;

  bool all_finite() const { return data_.isFinite().all(); }

 private:
  Shape shape_;
  Eigen::ArrayXd data_;
};

}  // namespace partgan
