#pragma once

#include <atomic>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "noisypower/errors.hpp"

namespace noisypower {

// Byte counters for matrix storage. The streaming algorithm carries a space
// contract (working set O(p*d), never d*d); tests enforce it by watching the
// peak of these counters across a run.
namespace memstat {
std::int64_t live_bytes();
std::int64_t peak_bytes();
void reset_peak();  // peak := live
namespace detail {
void add(std::size_t bytes);
void sub(std::size_t bytes);
}  // namespace detail
}  // namespace memstat

template <typename T>
struct CountingAllocator {
  using value_type = T;
  CountingAllocator() = default;
  template <typename U>
  CountingAllocator(const CountingAllocator<U>&) {}
  T* allocate(std::size_t n) {
    memstat::detail::add(n * sizeof(T));
    return static_cast<T*>(::operator new(n * sizeof(T)));
  }
  void deallocate(T* ptr, std::size_t n) {
    memstat::detail::sub(n * sizeof(T));
    ::operator delete(ptr);
  }
  bool operator==(const CountingAllocator&) const { return true; }
  bool operator!=(const CountingAllocator&) const { return false; }
};

// Dense real matrix, row-major storage.
class DenseMatrix {
 public:
  DenseMatrix() : rows_(0), cols_(0) {}
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);
  // Row-major construction from nested braces, e.g. {{3,1},{4,1}}.
  static DenseMatrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  const double* data() const { return data_.data(); }
  double* data() { return data_.data(); }

  void fill(double value);

  DenseMatrix transposed() const;
  DenseMatrix operator+(const DenseMatrix& rhs) const;
  DenseMatrix operator-(const DenseMatrix& rhs) const;
  DenseMatrix operator*(const DenseMatrix& rhs) const;
  DenseMatrix scaled(double factor) const;
  DenseMatrix& operator+=(const DenseMatrix& rhs);

  double frobenius_norm() const;
  double max_abs() const;  // 0 for an empty matrix

  bool same_shape(const DenseMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double, CountingAllocator<double>> data_;
};

// Symmetric matrix stored as one (lower) triangle, so a(i,j) == a(j,i) holds
// exactly by construction.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(std::size_t dim)
      : dim_(dim), tri_(dim * (dim + 1) / 2, 0.0) {}

  // Requires square input whose asymmetry is within `tol` per entry
  // (default: exact). The lower triangle is kept.
  static SymmetricMatrix from_dense(const DenseMatrix& m, double tol = 0.0);
  static SymmetricMatrix diagonal(const std::vector<double>& values);

  std::size_t dim() const { return dim_; }

  double operator()(std::size_t i, std::size_t j) const {
    return i >= j ? tri_[i * (i + 1) / 2 + j] : tri_[j * (j + 1) / 2 + i];
  }
  void set(std::size_t i, std::size_t j, double value) {
    (i >= j ? tri_[i * (i + 1) / 2 + j] : tri_[j * (j + 1) / 2 + i]) = value;
  }

  DenseMatrix to_dense() const;
  // A * X without materializing A as a DenseMatrix.
  DenseMatrix multiply(const DenseMatrix& x) const;
  double frobenius_norm() const;
  double max_abs() const;

 private:
  std::size_t dim_;
  std::vector<double, CountingAllocator<double>> tri_;
};

// d x p matrix with orthonormal columns; validated at construction
// (||Q^T Q - I||_max <= tol, 1 <= p <= d).
class OrthonormalBasis {
 public:
  explicit OrthonormalBasis(DenseMatrix q, double tol = 1e-10);

  std::size_t dim() const { return q_.rows(); }
  std::size_t width() const { return q_.cols(); }
  const DenseMatrix& matrix() const { return q_; }
  double operator()(std::size_t i, std::size_t j) const { return q_(i, j); }
  double max_abs() const { return q_.max_abs(); }

  // Identity columns e_1..e_p of R^d.
  static OrthonormalBasis standard(std::size_t d, std::size_t p);

 private:
  DenseMatrix q_;
};

}  // namespace noisypower
