#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "noisypower/matrix.hpp"
#include "noisypower/rng.hpp"

namespace noisypower {

struct QrResult {
  OrthonormalBasis q;
  DenseMatrix r;  // upper triangular, strictly positive diagonal
};

// Classical Gram-Schmidt with in-place deflation of the later columns:
//   for i: r_ii = ||v_i||, q_i = v_i / r_ii,
//          for j > i: r_ij = <q_i, v_j>, v_j -= r_ij q_i.
// This exact loop commutes with left-multiplication by any orthonormal O,
// a property the algorithm checkers rely on, so no pivoting or Householder
// substitute is permitted here. One additional pass of the same loop runs
// when the result drifts beyond 1e-10 orthonormality.
// Throws RankDeficient when a deflated column norm drops below 1e-12
// relative to the column's input norm.
QrResult gram_schmidt_qr(const DenseMatrix& v);

struct SpectrumSummary {
  std::vector<double> eigenvalues;     // descending (signed)
  OrthonormalBasis eigenvectors;       // column i pairs with eigenvalues[i]
  std::vector<std::size_t> magnitude_order;  // indices by descending |lambda|

  // i-th largest |eigenvalue| (singular value of the symmetric input),
  // zero-based. Out-of-range reads return 0, matching the convention
  // sigma_{d+1} = 0.
  double singular_value(std::size_t i) const {
    return i < magnitude_order.size()
               ? std::abs(eigenvalues[magnitude_order[i]])
               : 0.0;
  }
};

// Cyclic Jacobi eigensolver; deterministic for fixed input. Stops when the
// off-diagonal Frobenius mass is <= 1e-12 * ||A||_F; throws NoConvergence
// after 100*d^2 sweeps.
SpectrumSummary symmetric_eig(const SymmetricMatrix& a);

// Eigenvectors of the k dominant eigenvalues, by magnitude (the subspace
// power iteration converges to) or by signed order.
OrthonormalBasis top_eigenvectors(const SpectrumSummary& summary,
                                  std::size_t k, bool by_magnitude = true);

// Largest singular value via symmetric_eig on M^T M.
double spectral_norm(const DenseMatrix& m);

// QR of a d x p standard Gaussian draw: Haar-random p-frame. Retries once on
// the probability-zero rank-deficient draw.
OrthonormalBasis random_orthonormal_basis(std::size_t d, std::size_t p,
                                          RngEngine& rng);

// mu = d * max_ij U_ij^2 over the eigenvectors of the `rank` largest-magnitude
// eigenvalues; default rank counts eigenvalues with |lambda| > 1e-10 * ||A||.
double coherence(const SymmetricMatrix& a,
                 std::optional<std::size_t> rank = std::nullopt);

// [[0, B], [B^T, 0]]: symmetric embedding of a rectangular matrix, with
// spectrum {+-sigma_i(B)} padded by zeros.
SymmetricMatrix symmetrize(const DenseMatrix& b);

// max_ij |M_ij|.
double max_abs_entry(const DenseMatrix& m);

}  // namespace noisypower
