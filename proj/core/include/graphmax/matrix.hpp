#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace graphmax {

// Dense row-major matrix of doubles. The only shape this library works with;
// vectors are 1xC or Rx1 matrices, scalars are 1x1.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols);  // zero-filled
  Matrix(int rows, int cols, std::vector<double> data);

  static Matrix constant(int rows, int cols, double value);
  static Matrix identity(int n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double operator()(int r, int c) const { return data_[idx(r, c)]; }
  double& operator()(int r, int c) { return data_[idx(r, c)]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& values() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const;
  std::string shape_str() const;

 private:
  std::size_t idx(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Eager helpers used by the optimizer, evaluation code and the tape backend.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transposed(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scaled(const Matrix& a, double c);
double sum_all(const Matrix& a);
double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

void require_same_shape(const Matrix& a, const Matrix& b, const char* op);
void require_finite(const Matrix& a, const char* op);

}  // namespace graphmax
