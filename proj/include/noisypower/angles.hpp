#pragma once

#include <vector>

#include "noisypower/dense.hpp"
#include "noisypower/matrix.hpp"

namespace noisypower {

// Angle quantities between a k-dimensional target U and a p-dimensional
// iterate X (k <= p). residual = ||(I - XX^T)U|| = sin theta_k; the tangent
// is the convergence potential and the residual the output metric.
struct AngleReport {
  std::size_t k;
  double cos_theta_k;  // in [0, 1]
  double tan_theta_k;  // [0, +inf]; +inf sentinel when cos <= 1e-14
  double residual;     // sin theta_k
};

// k-th largest singular value of U^T X.
double cos_theta_k(const OrthonormalBasis& u, const OrthonormalBasis& x);

// sin theta_k / cos theta_k. Mathematically sqrt(1 - cos^2)/cos; evaluated
// through the projection residual so that angles near zero keep full
// relative accuracy (1 - cos^2 cancels catastrophically once cos rounds
// to 1). +inf once cos <= 1e-14.
double tan_theta_k(const OrthonormalBasis& u, const OrthonormalBasis& x);

// ||(I - XX^T)U||, computed as ||U - X(X^T U)||.
double residual_norm(const OrthonormalBasis& u, const OrthonormalBasis& x);

// All three quantities from one pass (cos and residual each computed once,
// tan = residual / cos).
AngleReport angle_report(const OrthonormalBasis& u, const OrthonormalBasis& x);

// Principal angles by the recursive definition: theta_i maximizes the cosine
// over unit vectors of the two subspaces orthogonal to all previously chosen
// pairs. Test oracle only; nested sphere search (multistart grid plus compass
// refinement to 1e-6), independent of the eigensolver route above.
// Budget guard: d <= 12, k <= 3, p <= 6, else BudgetExceeded.
std::vector<double> angle_oracle(const OrthonormalBasis& u,
                                 const OrthonormalBasis& x);

}  // namespace noisypower
