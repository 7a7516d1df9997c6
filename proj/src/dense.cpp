#include "noisypower/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "noisypower/errors.hpp"

namespace noisypower {

namespace {

// One classical Gram-Schmidt sweep, mutating `w` into Q and filling R.
// Thresholds are relative to the input column norms captured up front.
DenseMatrix gs_sweep(DenseMatrix& w) {
  const std::size_t d = w.rows(), p = w.cols();
  DenseMatrix r(p, p);
  std::vector<double> input_norm(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += w(i, j) * w(i, j);
    input_norm[j] = std::sqrt(s);
  }
  for (std::size_t i = 0; i < p; ++i) {
    double s = 0.0;
    for (std::size_t t = 0; t < d; ++t) s += w(t, i) * w(t, i);
    const double rii = std::sqrt(s);
    if (rii <= 1e-12 * input_norm[i] || rii == 0.0)
      throw RankDeficient("column became linearly dependent", i);
    r(i, i) = rii;
    const double inv = 1.0 / rii;
    for (std::size_t t = 0; t < d; ++t) w(t, i) *= inv;
    for (std::size_t j = i + 1; j < p; ++j) {
      double rij = 0.0;
      for (std::size_t t = 0; t < d; ++t) rij += w(t, i) * w(t, j);
      r(i, j) = rij;
      for (std::size_t t = 0; t < d; ++t) w(t, j) -= rij * w(t, i);
    }
  }
  return r;
}

double orthonormality_defect(const DenseMatrix& q) {
  const std::size_t d = q.rows(), p = q.cols();
  double worst = 0.0;
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a; b < p; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += q(i, a) * q(i, b);
      worst = std::max(worst, std::abs(dot - (a == b ? 1.0 : 0.0)));
    }
  }
  return worst;
}

}  // namespace

QrResult gram_schmidt_qr(const DenseMatrix& v) {
  const std::size_t d = v.rows(), p = v.cols();
  if (p < 1 || p > d)
    throw DimensionMismatch("QR input must satisfy 1 <= cols <= rows");
  DenseMatrix w = v;
  DenseMatrix r = gs_sweep(w);
  if (orthonormality_defect(w) > 1e-10) {
    // Drift pass: Gram-Schmidt again so the commutation property survives.
    DenseMatrix r2 = gs_sweep(w);
    r = r2 * r;
  }
  return QrResult{OrthonormalBasis(std::move(w)), std::move(r)};
}

SpectrumSummary symmetric_eig(const SymmetricMatrix& a) {
  const std::size_t d = a.dim();
  if (d < 1) throw InvalidArgument("eigendecomposition needs dim >= 1");
  DenseMatrix w = a.to_dense();
  DenseMatrix v = DenseMatrix::identity(d);
  const double stop = 1e-12 * a.frobenius_norm();

  auto off_mass = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) s += 2.0 * w(i, j) * w(i, j);
    return std::sqrt(s);
  };

  const std::size_t max_sweeps = 100 * d * d;
  std::size_t sweeps = 0;
  // Pivots below this contribute less than the stopping mass even if every
  // off-diagonal entry sat at the bound, so they can be skipped safely.
  const double skip = d > 1 ? stop / (2.0 * static_cast<double>(d)) : 0.0;
  while (off_mass() > stop) {
    if (sweeps++ >= max_sweeps)
      throw NoConvergence("Jacobi sweep budget exhausted");
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = w(p, q);
        if (std::abs(apq) <= skip) continue;
        const double theta = (w(q, q) - w(p, p)) / (2.0 * apq);
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) /
            (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double wpp = w(p, p), wqq = w(q, q);
        w(p, p) = wpp - t * apq;
        w(q, q) = wqq + t * apq;
        w(p, q) = w(q, p) = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          if (i == p || i == q) continue;
          const double wip = w(i, p), wiq = w(i, q);
          w(i, p) = w(p, i) = c * wip - s * wiq;
          w(i, q) = w(q, i) = s * wip + c * wiq;
        }
        for (std::size_t i = 0; i < d; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return w(i, i) > w(j, j);
  });

  std::vector<double> eigenvalues(d);
  DenseMatrix sorted(d, d);
  for (std::size_t col = 0; col < d; ++col) {
    eigenvalues[col] = w(order[col], order[col]);
    for (std::size_t i = 0; i < d; ++i) sorted(i, col) = v(i, order[col]);
  }
  std::vector<std::size_t> magnitude_order(d);
  std::iota(magnitude_order.begin(), magnitude_order.end(), 0);
  std::stable_sort(magnitude_order.begin(), magnitude_order.end(),
                   [&](std::size_t i, std::size_t j) {
                     return std::abs(eigenvalues[i]) > std::abs(eigenvalues[j]);
                   });
  return SpectrumSummary{std::move(eigenvalues),
                         OrthonormalBasis(std::move(sorted)),
                         std::move(magnitude_order)};
}

OrthonormalBasis top_eigenvectors(const SpectrumSummary& summary,
                                  std::size_t k, bool by_magnitude) {
  const std::size_t d = summary.eigenvectors.dim();
  if (k < 1 || k > d) throw InvalidArgument("top_eigenvectors: bad k");
  DenseMatrix u(d, k);
  for (std::size_t col = 0; col < k; ++col) {
    const std::size_t src = by_magnitude ? summary.magnitude_order[col] : col;
    for (std::size_t i = 0; i < d; ++i)
      u(i, col) = summary.eigenvectors(i, src);
  }
  return OrthonormalBasis(std::move(u));
}

double spectral_norm(const DenseMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  const std::size_t n = m.cols();
  // Gram matrix assembled one triangle at a time: exactly symmetric.
  SymmetricMatrix gram(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < m.rows(); ++i) dot += m(i, a) * m(i, b);
      gram.set(a, b, dot);
    }
  }
  const SpectrumSummary s = symmetric_eig(gram);
  return std::sqrt(std::max(0.0, s.eigenvalues.front()));
}

OrthonormalBasis random_orthonormal_basis(std::size_t d, std::size_t p,
                                          RngEngine& rng) {
  if (p < 1 || p > d)
    throw InvalidArgument("random basis needs 1 <= p <= d");
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < 2; ++attempt) {
    DenseMatrix g(d, p);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < p; ++j) g(i, j) = gauss(rng);
    try {
      return gram_schmidt_qr(g).q;
    } catch (const RankDeficient&) {
      if (attempt == 1) throw;
    }
  }
  throw RankDeficient("gaussian draw rank deficient twice", 0);
}

double coherence(const SymmetricMatrix& a, std::optional<std::size_t> rank) {
  const SpectrumSummary s = symmetric_eig(a);
  const std::size_t d = a.dim();
  std::size_t r;
  if (rank.has_value()) {
    r = *rank;
    if (r < 1 || r > d) throw InvalidArgument("coherence: rank out of range");
  } else {
    const double top = s.singular_value(0);
    r = 0;
    while (r < d && s.singular_value(r) > 1e-10 * top) ++r;
    if (r == 0) throw InvalidArgument("coherence undefined for zero matrix");
  }
  double max_sq = 0.0;
  for (std::size_t col = 0; col < r; ++col) {
    const std::size_t src = s.magnitude_order[col];
    for (std::size_t i = 0; i < d; ++i) {
      const double u = s.eigenvectors(i, src);
      max_sq = std::max(max_sq, u * u);
    }
  }
  return static_cast<double>(d) * max_sq;
}

SymmetricMatrix symmetrize(const DenseMatrix& b) {
  const std::size_t m = b.rows(), n = b.cols();
  SymmetricMatrix out(m + n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out.set(i, m + j, b(i, j));
  return out;
}

double max_abs_entry(const DenseMatrix& m) { return m.max_abs(); }

}  // namespace noisypower
