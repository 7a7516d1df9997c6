#include "noisypower/angles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "noisypower/errors.hpp"

namespace noisypower {

namespace {

constexpr double kCosFloor = 1e-14;

void check_shapes(const OrthonormalBasis& u, const OrthonormalBasis& x) {
  if (u.dim() != x.dim())
    throw DimensionMismatch("subspaces live in different ambient dimensions");
  if (u.width() > x.width())
    throw DimensionMismatch("target width k must not exceed iterate width p");
}

// Singular values of U^T X (descending) via the k x k Gram matrix.
std::vector<double> overlap_singulars(const OrthonormalBasis& u,
                                      const OrthonormalBasis& x) {
  const DenseMatrix m = u.matrix().transposed() * x.matrix();
  const std::size_t k = m.rows();
  SymmetricMatrix gram(k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      double dot = 0.0;
      for (std::size_t j = 0; j < m.cols(); ++j) dot += m(a, j) * m(b, j);
      gram.set(a, b, dot);
    }
  }
  const SpectrumSummary s = symmetric_eig(gram);
  std::vector<double> sv(k);
  for (std::size_t i = 0; i < k; ++i)
    sv[i] = std::sqrt(std::max(0.0, s.eigenvalues[i]));
  return sv;
}

DenseMatrix projection_residual(const OrthonormalBasis& u,
                                const OrthonormalBasis& x) {
  const DenseMatrix xtu = x.matrix().transposed() * u.matrix();
  return u.matrix() - x.matrix() * xtu;
}

}  // namespace

double cos_theta_k(const OrthonormalBasis& u, const OrthonormalBasis& x) {
  check_shapes(u, x);
  return overlap_singulars(u, x).back();
}

double residual_norm(const OrthonormalBasis& u, const OrthonormalBasis& x) {
  check_shapes(u, x);
  return spectral_norm(projection_residual(u, x));
}

double tan_theta_k(const OrthonormalBasis& u, const OrthonormalBasis& x) {
  check_shapes(u, x);
  const double c = overlap_singulars(u, x).back();
  if (c <= kCosFloor) return std::numeric_limits<double>::infinity();
  return spectral_norm(projection_residual(u, x)) / c;
}

AngleReport angle_report(const OrthonormalBasis& u, const OrthonormalBasis& x) {
  check_shapes(u, x);
  const double c = overlap_singulars(u, x).back();
  const double sin = spectral_norm(projection_residual(u, x));
  const double tan =
      c <= kCosFloor ? std::numeric_limits<double>::infinity() : sin / c;
  return AngleReport{u.width(), c, tan, sin};
}

namespace {

// Orthonormal basis of span(m) with near-dependent columns dropped; used by
// the oracle to form the constrained subspaces at each recursion level.
DenseMatrix orthonormal_span(const DenseMatrix& m, double tol = 1e-9) {
  const std::size_t d = m.rows(), p = m.cols();
  DenseMatrix out(d, p);
  std::size_t kept = 0;
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = m(i, j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t c = 0; c < kept; ++c) {
        double dot = 0.0;
        for (std::size_t i = 0; i < d; ++i) dot += out(i, c) * v[i];
        for (std::size_t i = 0; i < d; ++i) v[i] -= dot * out(i, c);
      }
    }
    double norm = 0.0;
    for (double t : v) norm += t * t;
    norm = std::sqrt(norm);
    if (norm <= tol) continue;
    for (std::size_t i = 0; i < d; ++i) out(i, kept) = v[i] / norm;
    ++kept;
  }
  DenseMatrix trimmed(d, kept);
  for (std::size_t j = 0; j < kept; ++j)
    for (std::size_t i = 0; i < d; ++i) trimmed(i, j) = out(i, j);
  return trimmed;
}

double objective(const DenseMatrix& m, const std::vector<double>& a) {
  // ||M a|| for unit a: the best achievable cosine in the direction S1 a.
  double s = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) row += m(r, c) * a[c];
    s += row * row;
  }
  return std::sqrt(s);
}

void normalize(std::vector<double>& a) {
  double n = 0.0;
  for (double t : a) n += t * t;
  n = std::sqrt(n);
  for (double& t : a) t /= n;
}

// Compass search on the unit sphere, shrinking steps until the iterate is
// stationary to ~1e-9 in the objective (angle accuracy well below 1e-6).
void refine(const DenseMatrix& m, std::vector<double>& a, double& best) {
  const std::size_t n = a.size();
  double step = 0.5;
  while (step > 1e-9) {
    bool improved = false;
    for (std::size_t c = 0; c < n; ++c) {
      for (double dir : {step, -step}) {
        std::vector<double> cand = a;
        cand[c] += dir;
        normalize(cand);
        const double val = objective(m, cand);
        if (val > best + 1e-15) {
          best = val;
          a = std::move(cand);
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
}

}  // namespace

std::vector<double> angle_oracle(const OrthonormalBasis& u,
                                 const OrthonormalBasis& x) {
  check_shapes(u, x);
  const std::size_t d = u.dim(), k = u.width(), p = x.width();
  if (d > 12 || k > 3 || p > 6)
    throw BudgetExceeded("angle oracle limited to d <= 12, k <= 3, p <= 6");

  DenseMatrix xs = x.matrix();  // remaining X-side subspace basis
  DenseMatrix us = u.matrix();  // remaining U-side subspace basis
  std::vector<double> angles;
  RngEngine grid_rng = make_rng(0xA11CE5EEDULL);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (std::size_t level = 0; level < k; ++level) {
    const std::size_t m1 = xs.cols();
    // Inner maximization over the U side has the closed form "project and
    // normalize": for a candidate x the best cosine is ||S2^T x||. The outer
    // maximization over the X side is the numerical sphere search.
    const DenseMatrix m = us.transposed() * xs;  // m2 x m1

    std::vector<double> best_a(m1, 0.0);
    double best = -1.0;
    std::vector<std::pair<double, std::vector<double>>> starts;
    const std::size_t grid = 600 * m1;
    for (std::size_t g = 0; g < grid + 2 * m1; ++g) {
      std::vector<double> a(m1, 0.0);
      if (g < 2 * m1) {
        a[g / 2] = (g % 2 == 0) ? 1.0 : -1.0;  // coordinate starts
      } else {
        for (double& t : a) t = gauss(grid_rng);
        normalize(a);
      }
      starts.emplace_back(objective(m, a), std::move(a));
    }
    std::partial_sort(starts.begin(),
                      starts.begin() + std::min<std::size_t>(6, starts.size()),
                      starts.end(),
                      [](const auto& l, const auto& r) { return l.first > r.first; });
    for (std::size_t s = 0; s < std::min<std::size_t>(6, starts.size()); ++s) {
      double val = starts[s].first;
      std::vector<double> a = starts[s].second;
      refine(m, a, val);
      if (val > best) {
        best = val;
        best_a = std::move(a);
      }
    }

    const double cosine = std::min(1.0, std::max(0.0, best));
    angles.push_back(std::acos(cosine));
    if (level + 1 == k) break;

    // Chosen pair: x_i = S1 a*, y_i = projection of x_i onto the U side
    // (or an arbitrary remaining direction at a right angle).
    std::vector<double> xi(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t c = 0; c < m1; ++c) xi[i] += xs(i, c) * best_a[c];
    std::vector<double> yb(us.cols(), 0.0);
    for (std::size_t r = 0; r < us.cols(); ++r)
      for (std::size_t c = 0; c < m1; ++c) yb[r] += m(r, c) * best_a[c];
    double ynorm = 0.0;
    for (double t : yb) ynorm += t * t;
    ynorm = std::sqrt(ynorm);
    std::vector<double> yi(d, 0.0);
    if (ynorm > 1e-12) {
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t r = 0; r < us.cols(); ++r)
          yi[i] += us(i, r) * (yb[r] / ynorm);
    } else {
      for (std::size_t i = 0; i < d; ++i) yi[i] = us(i, 0);
    }

    // Deflate both sides and continue one level down.
    auto deflate = [&](const DenseMatrix& basis, const std::vector<double>& dir) {
      DenseMatrix rem = basis;
      for (std::size_t j = 0; j < rem.cols(); ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < d; ++i) dot += dir[i] * rem(i, j);
        for (std::size_t i = 0; i < d; ++i) rem(i, j) -= dot * dir[i];
      }
      return orthonormal_span(rem);
    };
    xs = deflate(xs, xi);
    us = deflate(us, yi);
    if (xs.cols() == 0 || us.cols() == 0) break;
  }
  return angles;
}

}  // namespace noisypower
