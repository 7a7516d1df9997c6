#include "noisypower/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "noisypower/dense.hpp"
#include "noisypower/errors.hpp"
#include "noisypower/noise.hpp"
#include "noisypower/rng.hpp"

namespace noisypower {

PrivacyParams::PrivacyParams(double epsilon, double delta, Mechanism mechanism,
                             Neighborhood neighborhood)
    : epsilon_(epsilon),
      delta_(delta),
      mechanism_(mechanism),
      neighborhood_(neighborhood) {
  if (!(epsilon > 0.0)) throw InvalidBudget("epsilon must be positive");
  if (mechanism == Mechanism::laplacian_spectral) {
    if (!(delta >= 0.0 && delta < 1.0))
      throw InvalidBudget("delta must lie in [0, 1)");
  } else {
    if (!(delta > 0.0 && delta < 1.0))
      throw InvalidBudget("gaussian mechanisms need delta in (0, 1)");
  }
  const bool entry = mechanism == Mechanism::gaussian_entry_scaled;
  if (entry != (neighborhood == Neighborhood::single_entry))
    throw InvalidBudget(
        "entry-scaled noise protects single-entry neighborhoods; spectral "
        "noise protects unit-spectral ones");
}

NoiseScale gaussian_sigma(double epsilon, double delta, std::size_t p,
                          std::size_t L) {
  if (!(epsilon > 0.0)) throw InvalidBudget("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0))
    throw InvalidBudget("delta must lie in (0, 1)");
  if (p < 1 || L < 1) throw InvalidBudget("p and L must be positive");
  const double value =
      (1.0 / epsilon) * std::sqrt(4.0 * static_cast<double>(p) *
                                  static_cast<double>(L) * std::log(1.0 / delta));
  return NoiseScale{value, ScaleFormula::gaussian_sigma};
}

NoiseScale laplacian_lambda(double epsilon, std::size_t p, std::size_t L,
                            std::size_t d) {
  if (!(epsilon > 0.0)) throw InvalidBudget("epsilon must be positive");
  if (p < 1 || L < 1 || d < 1)
    throw InvalidBudget("p, L and d must be positive");
  const double value = 10.0 * static_cast<double>(p) *
                       static_cast<double>(L) *
                       std::sqrt(static_cast<double>(d)) / epsilon;
  return NoiseScale{value, ScaleFormula::laplacian_lambda};
}

PpmResult ppm_run(const SymmetricMatrix& a, std::size_t p, std::size_t L,
                  const PrivacyParams& priv, std::uint64_t seed,
                  std::size_t target_rank) {
  if (priv.mechanism() != Mechanism::gaussian_entry_scaled)
    throw InvalidBudget("ppm_run requires the entry-scaled gaussian mechanism");
  const NoiseScale sigma = gaussian_sigma(priv.epsilon(), priv.delta(), p, L + 1);
  EntrywiseScaledGaussianNoise noise(sigma.value);

  NpmConfig cfg;
  cfg.iterations = L;
  cfg.width = p;
  cfg.target_rank = target_rank == 0 ? p : target_rank;
  cfg.seed = seed;

  RngEngine noise_rng = make_rng(seed, kStreamNoise);
  NpmResult run = npm_run(a, cfg, noise, nullptr, noise_rng);
  const DenseMatrix g_final =
      noise.generate(L + 1, run.basis.matrix(), noise_rng);
  DenseMatrix y_final = a.multiply(run.basis.matrix()) + g_final;

  return PpmResult{std::move(run.basis), std::move(run.trace),
                   std::move(y_final), sigma, L + 1};
}

SpectralPpmResult spectral_ppm_run(const SymmetricMatrix& a, std::size_t p,
                                   std::size_t L, const PrivacyParams& priv,
                                   std::uint64_t seed,
                                   std::size_t target_rank) {
  NoiseScale scale;
  std::unique_ptr<NoiseSource> noise;
  switch (priv.mechanism()) {
    case Mechanism::gaussian_spectral:
      scale = gaussian_sigma(priv.epsilon(), priv.delta(), p, L);
      noise = std::make_unique<GaussianNoise>(scale.value);
      break;
    case Mechanism::laplacian_spectral:
      scale = laplacian_lambda(priv.epsilon(), p, L, a.dim());
      noise = std::make_unique<LaplacianNoise>(scale.value);
      break;
    default:
      throw InvalidBudget("spectral_ppm_run requires a spectral mechanism");
  }

  NpmConfig cfg;
  cfg.iterations = L;
  cfg.width = p;
  cfg.target_rank = target_rank == 0 ? p : target_rank;
  cfg.seed = seed;
  NpmResult run = npm_run(a, cfg, *noise);
  return SpectralPpmResult{std::move(run.basis), std::move(run.trace), scale,
                           L};
}

LowRankResult private_low_rank(const SymmetricMatrix& a, std::size_t k,
                               const PrivacyParams& priv, std::uint64_t seed,
                               double tau, double target_eps) {
  if (k < 1 || 2 * k > a.dim())
    throw InvalidArgument("private_low_rank requires 1 <= k and 2k <= d");
  const std::size_t p = 2 * k;
  const std::size_t d = a.dim();

  const SpectrumSummary spectrum = symmetric_eig(a);
  std::size_t iterations;
  try {
    iterations = required_iterations(spectrum.singular_value(k - 1),
                                     spectrum.singular_value(k), d, tau,
                                     target_eps);
  } catch (const GapNonpositive&) {
    iterations = static_cast<std::size_t>(
        std::ceil(2.0 * std::log(static_cast<double>(std::max<std::size_t>(d, 2)))));
    iterations = std::max<std::size_t>(iterations, 1);
  }

  PpmResult run = ppm_run(a, p, iterations, priv, seed, k);
  const DenseMatrix& x = run.basis.matrix();
  const DenseMatrix approx = x * run.final_product.transposed();

  const DenseMatrix a_dense = a.to_dense();
  const double error_norm = spectral_norm(a_dense - approx);
  const double residual_norm =
      spectral_norm(a_dense - x * (x.transposed() * a_dense));
  const double final_noise_norm =
      spectral_norm(run.final_product - a.multiply(x));

  return LowRankResult{std::move(approx), error_norm,   residual_norm,
                       final_noise_norm,  iterations,   run.noise_scale};
}

SignProfile sign_profile(const SymmetricMatrix& a, std::size_t p,
                         std::size_t L,
                         const std::vector<double>& sigma_schedule,
                         std::size_t runs, std::uint64_t seed) {
  const std::size_t d = a.dim();
  if (p < 1 || p > d) throw InvalidArgument("sign profile requires 1 <= p <= d");
  if (sigma_schedule.size() != L)
    throw InvalidArgument("sigma schedule must list one scale per iteration");
  if (runs < 1) throw InvalidArgument("runs must be positive");

  const OrthonormalBasis v = symmetric_eig(a).eigenvectors;
  std::vector<std::size_t> plus(d, 0);

  for (std::size_t r = 0; r < runs; ++r) {
    RngEngine rng = make_rng(seed, kStreamTrialBase + r);
    OrthonormalBasis x = random_orthonormal_basis(d, p, rng);
    for (std::size_t ell = 0; ell < L; ++ell) {
      const DenseMatrix g = gaussian_matrix(d, p, sigma_schedule[ell], rng);
      x = gram_schmidt_qr(a.multiply(x.matrix()) + g).q;
    }
    for (std::size_t i = 0; i < d; ++i) {
      double dot = 0.0;
      for (std::size_t row = 0; row < d; ++row) dot += v(row, i) * x(row, 0);
      if (dot > 0.0) ++plus[i];
    }
  }

  SignProfile profile;
  profile.runs = runs;
  profile.plus_frequency.resize(d);
  for (std::size_t i = 0; i < d; ++i)
    profile.plus_frequency[i] =
        static_cast<double>(plus[i]) / static_cast<double>(runs);
  return profile;
}

IncoherenceReport incoherence_trace(const SymmetricMatrix& a, std::size_t p,
                                    std::size_t L, const PrivacyParams& priv,
                                    std::size_t runs, std::uint64_t seed) {
  if (priv.mechanism() != Mechanism::gaussian_entry_scaled)
    throw InvalidBudget("incoherence runs use the entry-scaled mechanism");
  const std::size_t d = a.dim();
  if (p < 1 || p > d)
    throw InvalidArgument("incoherence runs require 1 <= p <= d");
  if (runs < 1) throw InvalidArgument("runs must be positive");

  const double sigma = gaussian_sigma(priv.epsilon(), priv.delta(), p, L).value;

  IncoherenceReport report;
  report.mu = coherence(a);
  report.threshold =
      4.0 * std::sqrt(report.mu * std::log(static_cast<double>(d)) /
                      static_cast<double>(d));
  report.per_run_max.resize(runs);

  for (std::size_t r = 0; r < runs; ++r) {
    RngEngine rng = make_rng(seed, kStreamTrialBase + r);
    OrthonormalBasis x = random_orthonormal_basis(d, p, rng);
    double run_max = x.max_abs();
    for (std::size_t ell = 0; ell < L; ++ell) {
      const DenseMatrix g =
          gaussian_matrix(d, p, x.max_abs() * sigma, rng);
      x = gram_schmidt_qr(a.multiply(x.matrix()) + g).q;
      run_max = std::max(run_max, x.max_abs());
    }
    report.per_run_max[r] = run_max;
    report.overall_max = std::max(report.overall_max, run_max);
    if (run_max > report.threshold) ++report.runs_over_threshold;
  }
  return report;
}

const char* mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::gaussian_entry_scaled:
      return "gaussian-entry-scaled";
    case Mechanism::gaussian_spectral:
      return "gaussian-spectral";
    case Mechanism::laplacian_spectral:
      return "laplacian-spectral";
  }
  return "unknown";
}

const char* neighborhood_name(Neighborhood n) {
  switch (n) {
    case Neighborhood::single_entry:
      return "single-entry";
    case Neighborhood::unit_spectral:
      return "unit-spectral";
  }
  return "unknown";
}

}  // namespace noisypower
