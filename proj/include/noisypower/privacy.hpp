#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "noisypower/matrix.hpp"
#include "noisypower/power.hpp"

namespace noisypower {

enum class Mechanism {
  gaussian_entry_scaled,  // Gaussian, entries scaled by ||X||_inf per step
  gaussian_spectral,      // plain Gaussian entries
  laplacian_spectral,     // plain Laplacian entries
};

enum class Neighborhood {
  single_entry,   // inputs differing in one entry by at most 1
  unit_spectral,  // inputs differing by a unit-spectral-norm perturbation
};

// Validated (epsilon, delta) budget plus the mechanism/neighborhood pairing.
// The entry-scaled mechanism protects single-entry neighborhoods; the
// spectral mechanisms protect unit-spectral ones; delta = 0 is legal only
// for the Laplacian mechanism. Violations throw InvalidBudget.
class PrivacyParams {
 public:
  PrivacyParams(double epsilon, double delta, Mechanism mechanism,
                Neighborhood neighborhood);

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }
  Mechanism mechanism() const { return mechanism_; }
  Neighborhood neighborhood() const { return neighborhood_; }

 private:
  double epsilon_;
  double delta_;
  Mechanism mechanism_;
  Neighborhood neighborhood_;
};

enum class ScaleFormula { gaussian_sigma, laplacian_lambda };

struct NoiseScale {
  double value = 0.0;
  ScaleFormula formula = ScaleFormula::gaussian_sigma;
};

// sigma = (1/epsilon) sqrt(4 p L ln(1/delta)), evaluated exactly in this
// form so the documented golden values reproduce bit-for-bit.
NoiseScale gaussian_sigma(double epsilon, double delta, std::size_t p,
                          std::size_t L);

// lambda = 10 p L sqrt(d) / epsilon.
NoiseScale laplacian_lambda(double epsilon, std::size_t p, std::size_t L,
                            std::size_t d);

struct PpmResult {
  OrthonormalBasis basis;
  ConvergenceTrace trace;
  DenseMatrix final_product;  // Y_{L+1} = A X_L + G_{L+1}
  NoiseScale noise_scale;
  std::size_t noisy_products = 0;  // L + 1, counting the final product
};

// Power method under the entry-scaled Gaussian mechanism: per step
// G_l ~ N(0, ||X_{l-1}||_inf^2 sigma^2) entrywise. Performs L iterations
// plus one extra noisy product, so sigma is calibrated for L+1 products.
// target_rank 0 means "measure angles against the top-p subspace".
PpmResult ppm_run(const SymmetricMatrix& a, std::size_t p, std::size_t L,
                  const PrivacyParams& priv, std::uint64_t seed,
                  std::size_t target_rank = 0);

struct SpectralPpmResult {
  OrthonormalBasis basis;
  ConvergenceTrace trace;
  NoiseScale noise_scale;
  std::size_t noisy_products = 0;  // L
};

// Unit-spectral-neighborhood variants: G_l drawn i.i.d. per entry from
// N(0, sigma^2) or Lap(0, lambda), with no iterate-dependent scaling.
SpectralPpmResult spectral_ppm_run(const SymmetricMatrix& a, std::size_t p,
                                   std::size_t L, const PrivacyParams& priv,
                                   std::uint64_t seed,
                                   std::size_t target_rank = 0);

struct LowRankResult {
  DenseMatrix approx;             // B = X_L Y_{L+1}^T, rank <= 2k
  double error_norm = 0.0;        // ||A - B||
  double residual_norm = 0.0;     // ||(I - X_L X_L^T) A||
  double final_noise_norm = 0.0;  // ||G_{L+1}||
  std::size_t iterations = 0;
  NoiseScale noise_scale;
};

// Rank-2k private approximation B = X_L Y_{L+1}^T from a width-2k run.
// L comes from required_iterations at the given tau and target accuracy;
// gap-free spectra fall back to ceil(2 ln d) iterations.
LowRankResult private_low_rank(const SymmetricMatrix& a, std::size_t k,
                               const PrivacyParams& priv, std::uint64_t seed,
                               double tau = 1.0, double target_eps = 0.01);

struct SignProfile {
  std::size_t runs = 0;
  std::vector<double> plus_frequency;  // per eigenvector of A
};

// Runs Gaussian-noise NPM `runs` times with independent sub-seeds and fixed
// per-step scales sigma_schedule (length L); records how often column 0 of
// X_L has positive inner product with each eigenvector of A.
SignProfile sign_profile(const SymmetricMatrix& a, std::size_t p,
                         std::size_t L,
                         const std::vector<double>& sigma_schedule,
                         std::size_t runs, std::uint64_t seed);

struct IncoherenceReport {
  double mu = 0.0;         // coherence of A
  double threshold = 0.0;  // 4 sqrt(mu ln d / d)
  std::vector<double> per_run_max;  // max over steps of ||X_l||_inf
  double overall_max = 0.0;
  std::size_t runs_over_threshold = 0;
};

// Entry-scaled Gaussian runs tracking only max ||X_l||_inf (steps 0..L);
// no per-step eigensolves, so large run counts stay cheap.
IncoherenceReport incoherence_trace(const SymmetricMatrix& a, std::size_t p,
                                    std::size_t L, const PrivacyParams& priv,
                                    std::size_t runs, std::uint64_t seed);

const char* mechanism_name(Mechanism m);
const char* neighborhood_name(Neighborhood n);

}  // namespace noisypower
