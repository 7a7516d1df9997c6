#include "noisypower/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace noisypower {

namespace memstat {
namespace {
std::atomic<std::int64_t> g_live{0};
std::atomic<std::int64_t> g_peak{0};
}  // namespace

std::int64_t live_bytes() { return g_live.load(); }
std::int64_t peak_bytes() { return g_peak.load(); }
void reset_peak() { g_peak.store(g_live.load()); }

namespace detail {
void add(std::size_t bytes) {
  const std::int64_t now = g_live.fetch_add(static_cast<std::int64_t>(bytes)) +
                           static_cast<std::int64_t>(bytes);
  std::int64_t peak = g_peak.load();
  while (now > peak && !g_peak.compare_exchange_weak(peak, now)) {
  }
}
void sub(std::size_t bytes) { g_live.fetch_sub(static_cast<std::int64_t>(bytes)); }
}  // namespace detail
}  // namespace memstat

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  DenseMatrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionMismatch("ragged row list");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

void DenseMatrix::fill(double value) {
  std::fill(data_.begin(), data_.end(), value);
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix DenseMatrix::operator+(const DenseMatrix& rhs) const {
  if (!same_shape(rhs)) throw DimensionMismatch("matrix add: shape mismatch");
  DenseMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i)
    out.data_[i] = data_[i] + rhs.data_[i];
  return out;
}

DenseMatrix DenseMatrix::operator-(const DenseMatrix& rhs) const {
  if (!same_shape(rhs)) throw DimensionMismatch("matrix sub: shape mismatch");
  DenseMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i)
    out.data_[i] = data_[i] - rhs.data_[i];
  return out;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& rhs) {
  if (!same_shape(rhs)) throw DimensionMismatch("matrix add: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& rhs) const {
  if (cols_ != rhs.rows_)
    throw DimensionMismatch("matrix multiply: inner dimensions differ");
  DenseMatrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  }
  return out;
}

DenseMatrix DenseMatrix::scaled(double factor) const {
  DenseMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i)
    out.data_[i] = data_[i] * factor;
  return out;
}

double DenseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

SymmetricMatrix SymmetricMatrix::from_dense(const DenseMatrix& m, double tol) {
  if (m.rows() != m.cols())
    throw DimensionMismatch("symmetric matrix must be square");
  SymmetricMatrix a(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol)
        throw InvalidArgument("matrix is not symmetric");
      a.set(i, j, m(i, j));
    }
  }
  return a;
}

SymmetricMatrix SymmetricMatrix::diagonal(const std::vector<double>& values) {
  SymmetricMatrix a(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) a.set(i, i, values[i]);
  return a;
}

DenseMatrix SymmetricMatrix::to_dense() const {
  DenseMatrix m(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

DenseMatrix SymmetricMatrix::multiply(const DenseMatrix& x) const {
  if (x.rows() != dim_)
    throw DimensionMismatch("symmetric multiply: row count != dim");
  DenseMatrix out(dim_, x.cols());
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t k = 0; k < dim_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) += a * x(k, j);
    }
  }
  return out;
}

double SymmetricMatrix::frobenius_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double v = (*this)(i, j);
      s += 2.0 * v * v;
    }
    s += (*this)(i, i) * (*this)(i, i);
  }
  return std::sqrt(s);
}

double SymmetricMatrix::max_abs() const {
  double m = 0.0;
  for (double v : tri_) m = std::max(m, std::abs(v));
  return m;
}

OrthonormalBasis::OrthonormalBasis(DenseMatrix q, double tol) : q_(std::move(q)) {
  const std::size_t d = q_.rows(), p = q_.cols();
  if (p < 1 || p > d)
    throw InvalidBasis("basis width must satisfy 1 <= p <= d");
  double worst = 0.0;
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a; b < p; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += q_(i, a) * q_(i, b);
      worst = std::max(worst, std::abs(dot - (a == b ? 1.0 : 0.0)));
    }
  }
  if (worst > tol)
    throw InvalidBasis("columns are not orthonormal within tolerance");
}

OrthonormalBasis OrthonormalBasis::standard(std::size_t d, std::size_t p) {
  DenseMatrix q(d, p);
  for (std::size_t j = 0; j < p && j < d; ++j) q(j, j) = 1.0;
  return OrthonormalBasis(std::move(q));
}

}  // namespace noisypower
