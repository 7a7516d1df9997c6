#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include <doctest.h>

#include "noisypower/dense.hpp"
#include "noisypower/errors.hpp"
#include "noisypower/noise.hpp"
#include "noisypower/privacy.hpp"
#include "noisypower/rng.hpp"
#include "test_util.hpp"

using namespace noisypower;

namespace {

PrivacyParams entry_params(double eps, double delta) {
  return PrivacyParams(eps, delta, Mechanism::gaussian_entry_scaled,
                       Neighborhood::single_entry);
}

}  // namespace

TEST_SUITE("privacy") {

TEST_CASE("noise scale goldens reproduce bit for bit") {
  CHECK(gaussian_sigma(1.0, std::exp(-1.0), 1, 1).value == 2.0);
  CHECK(gaussian_sigma(2.0, std::exp(-1.0), 1, 1).value == 1.0);
  CHECK(gaussian_sigma(1.0, std::exp(-4.0), 2, 8).value == 16.0);
  CHECK(gaussian_sigma(1.0, std::exp(-1.0), 1, 1).formula ==
        ScaleFormula::gaussian_sigma);

  CHECK(laplacian_lambda(1.0, 1, 1, 4).value == 20.0);
  CHECK(laplacian_lambda(10.0, 1, 1, 4).value == 2.0);
  CHECK(laplacian_lambda(1.0, 2, 3, 9).value == 180.0);
  CHECK(laplacian_lambda(1.0, 1, 1, 4).formula ==
        ScaleFormula::laplacian_lambda);

  CHECK_THROWS_AS(gaussian_sigma(0.0, 0.1, 1, 1), InvalidBudget);
  CHECK_THROWS_AS(gaussian_sigma(1.0, 0.0, 1, 1), InvalidBudget);
  CHECK_THROWS_AS(gaussian_sigma(1.0, 1.0, 1, 1), InvalidBudget);
  CHECK_THROWS_AS(gaussian_sigma(1.0, 0.1, 0, 1), InvalidBudget);
  CHECK_THROWS_AS(gaussian_sigma(1.0, 0.1, 1, 0), InvalidBudget);
  CHECK_THROWS_AS(laplacian_lambda(-1.0, 1, 1, 4), InvalidBudget);
  CHECK_THROWS_AS(laplacian_lambda(1.0, 1, 1, 0), InvalidBudget);
}

TEST_CASE("privacy params pair mechanisms with their neighborhoods") {
  CHECK_NOTHROW(entry_params(1.0, 1e-6));
  CHECK_NOTHROW(PrivacyParams(1.0, 1e-6, Mechanism::gaussian_spectral,
                              Neighborhood::unit_spectral));
  CHECK_NOTHROW(PrivacyParams(1.0, 0.0, Mechanism::laplacian_spectral,
                              Neighborhood::unit_spectral));

  CHECK_THROWS_AS(PrivacyParams(1.0, 1e-6, Mechanism::gaussian_entry_scaled,
                                Neighborhood::unit_spectral),
                  InvalidBudget);
  CHECK_THROWS_AS(PrivacyParams(1.0, 1e-6, Mechanism::gaussian_spectral,
                                Neighborhood::single_entry),
                  InvalidBudget);
  CHECK_THROWS_AS(PrivacyParams(1.0, 0.0, Mechanism::gaussian_spectral,
                                Neighborhood::unit_spectral),
                  InvalidBudget);
  CHECK_THROWS_AS(PrivacyParams(0.0, 1e-6, Mechanism::gaussian_spectral,
                                Neighborhood::unit_spectral),
                  InvalidBudget);
  CHECK_THROWS_AS(PrivacyParams(1.0, 1.0, Mechanism::gaussian_spectral,
                                Neighborhood::unit_spectral),
                  InvalidBudget);

  CHECK(std::strcmp(mechanism_name(Mechanism::gaussian_entry_scaled),
                    "gaussian-entry-scaled") == 0);
  CHECK(std::strcmp(mechanism_name(Mechanism::gaussian_spectral),
                    "gaussian-spectral") == 0);
  CHECK(std::strcmp(mechanism_name(Mechanism::laplacian_spectral),
                    "laplacian-spectral") == 0);
  CHECK(std::strcmp(neighborhood_name(Neighborhood::single_entry),
                    "single-entry") == 0);
  CHECK(std::strcmp(neighborhood_name(Neighborhood::unit_spectral),
                    "unit-spectral") == 0);
}

TEST_CASE("gaussian draws match the declared variance within 2 percent") {
  RngEngine rng = make_rng(701);
  const double sigma = 1.7;
  const DenseMatrix g = gaussian_matrix(1000, 1000, sigma, rng);
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < 1000; ++i)
    for (std::size_t j = 0; j < 1000; ++j) {
      sum += g(i, j);
      sq += g(i, j) * g(i, j);
    }
  const double n = 1e6;
  CHECK(std::abs(sum / n) <= 0.01);
  CHECK(sq / n == doctest::Approx(sigma * sigma).epsilon(0.02));
}

TEST_CASE("laplacian draws match the declared variance within 2 percent") {
  RngEngine rng = make_rng(702);
  const double lambda = 0.9;
  const DenseMatrix g = laplace_matrix(1000, 1000, lambda, rng);
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < 1000; ++i)
    for (std::size_t j = 0; j < 1000; ++j) {
      sum += g(i, j);
      sq += g(i, j) * g(i, j);
    }
  const double n = 1e6;
  CHECK(std::abs(sum / n) <= 0.01);
  CHECK(sq / n == doctest::Approx(2.0 * lambda * lambda).epsilon(0.02));
}

TEST_CASE("entry-scaled noise keys off the iterate's largest entry") {
  DenseMatrix current(3, 2, 0.0);
  current(1, 0) = -0.25;
  EntrywiseScaledGaussianNoise noise(2.0);
  RngEngine r1 = make_rng(703);
  const DenseMatrix g = noise.generate(1, current, r1);
  RngEngine r2 = make_rng(703);
  const DenseMatrix expected = gaussian_matrix(3, 2, 0.5, r2);
  CHECK(testutil::max_abs_diff(g, expected) == 0.0);
  CHECK(noise.kind() == NoiseKind::gaussian_entrywise_scaled);
}

TEST_CASE("private power run calibrates for one extra product") {
  const SymmetricMatrix a = SymmetricMatrix::diagonal({1.5, 1.0, 0.5});
  const PrivacyParams priv = entry_params(1.0, 1e-6);
  const PpmResult run = ppm_run(a, 2, 20, priv, 31);

  CHECK(run.noise_scale.value == gaussian_sigma(1.0, 1e-6, 2, 21).value);
  CHECK(run.noisy_products == 21);
  CHECK(run.trace.rows.size() == 20);
  CHECK(run.final_product.rows() == 3);
  CHECK(run.final_product.cols() == 2);

  // The final product continues the same noise stream the iterations used.
  EntrywiseScaledGaussianNoise noise(run.noise_scale.value);
  NpmConfig cfg;
  cfg.iterations = 20;
  cfg.width = 2;
  cfg.target_rank = 2;
  cfg.seed = 31;
  RngEngine noise_rng = make_rng(31, kStreamNoise);
  const NpmResult replay = npm_run(a, cfg, noise, nullptr, noise_rng);
  const DenseMatrix g_final =
      noise.generate(21, replay.basis.matrix(), noise_rng);
  const DenseMatrix y_final = a.multiply(replay.basis.matrix()) + g_final;
  CHECK(testutil::max_abs_diff(run.basis.matrix(), replay.basis.matrix()) ==
        0.0);
  CHECK(testutil::max_abs_diff(run.final_product, y_final) == 0.0);
}

TEST_CASE("mechanism gates on the run entry points") {
  const SymmetricMatrix a = SymmetricMatrix::diagonal({1.0, 0.5});
  const PrivacyParams spectral(1.0, 1e-6, Mechanism::gaussian_spectral,
                               Neighborhood::unit_spectral);
  CHECK_THROWS_AS(ppm_run(a, 1, 2, spectral, 1), InvalidBudget);
  CHECK_THROWS_AS(spectral_ppm_run(a, 1, 2, entry_params(1.0, 1e-6), 1),
                  InvalidBudget);
  CHECK_THROWS_AS(incoherence_trace(a, 1, 2, spectral, 1, 1), InvalidBudget);
}

TEST_CASE("spectral variants run under their declared scales") {
  const SymmetricMatrix a = SymmetricMatrix::diagonal({2.0, 1.0, 0.5, 0.25});

  const PrivacyParams gp(1.0, 1e-4, Mechanism::gaussian_spectral,
                         Neighborhood::unit_spectral);
  const SpectralPpmResult g1 = spectral_ppm_run(a, 2, 3, gp, 21);
  CHECK(g1.noise_scale.value == gaussian_sigma(1.0, 1e-4, 2, 3).value);
  CHECK(g1.noise_scale.formula == ScaleFormula::gaussian_sigma);
  CHECK(g1.noisy_products == 3);
  CHECK(g1.trace.rows.size() == 3);
  const SpectralPpmResult g2 = spectral_ppm_run(a, 2, 3, gp, 21);
  CHECK(testutil::max_abs_diff(g1.basis.matrix(), g2.basis.matrix()) == 0.0);

  const PrivacyParams lp(1.0, 0.0, Mechanism::laplacian_spectral,
                         Neighborhood::unit_spectral);
  const SpectralPpmResult l1 = spectral_ppm_run(a, 2, 3, lp, 22);
  CHECK(l1.noise_scale.value == laplacian_lambda(1.0, 2, 3, 4).value);
  CHECK(l1.noise_scale.formula == ScaleFormula::laplacian_lambda);
  CHECK(l1.basis.dim() == 4);
  CHECK(l1.basis.width() == 2);
}

TEST_CASE("near-noiseless low-rank approximation reaches the oracle error") {
  const SymmetricMatrix a = SymmetricMatrix::diagonal({3.0, 2.0, 1.0});
  const PrivacyParams priv = entry_params(1e6, 1e-6);
  const LowRankResult run = private_low_rank(a, 1, priv, 41);

  CHECK(run.iterations == required_iterations(3.0, 2.0, 3, 1.0, 0.01));
  CHECK(run.error_norm <= 1.01);
  CHECK(run.residual_norm <= 1.01);
  CHECK(run.residual_norm >= 1.0 - 1e-9);
  CHECK(run.final_noise_norm <= 1e-3);
  CHECK(run.approx.rows() == 3);
  CHECK(run.approx.cols() == 3);

  // Rank certificate: B = X Y^T factors through 2k columns.
  const SymmetricMatrix btb = symmetrize(run.approx.transposed() * run.approx);
  const SpectrumSummary s = symmetric_eig(btb);
  std::size_t numerical_rank = 0;
  for (double ev : s.eigenvalues)
    if (ev > 1e-12 * std::max(1.0, s.eigenvalues.front())) ++numerical_rank;
  CHECK(numerical_rank <= 2);

  CHECK_THROWS_AS(private_low_rank(a, 2, priv, 41), InvalidArgument);
  CHECK_THROWS_AS(private_low_rank(a, 0, priv, 41), InvalidArgument);
}

TEST_CASE("gap-free spectra fall back to the logarithmic iteration budget") {
  const SymmetricMatrix zero(4);
  const PrivacyParams priv = entry_params(1.0, 0.01);
  const LowRankResult run = private_low_rank(zero, 1, priv, 42);
  CHECK(run.iterations == 3);  // ceil(2 ln 4)
  CHECK(run.residual_norm == 0.0);
  // A = 0, so B is pure noise: ||B|| = ||X G^T|| = ||G||.
  CHECK(run.error_norm ==
        doctest::Approx(run.final_noise_norm).epsilon(1e-9));
  CHECK(run.error_norm <=
        4.0 * run.noise_scale.value * std::sqrt(4.0 * 2.0));
}

TEST_CASE("sign profile is balanced under symmetric noise") {
  SUBCASE("single dimension") {
    SymmetricMatrix a(1);
    a.set(0, 0, 2.0);
    const SignProfile profile =
        sign_profile(a, 1, 3, {0.5, 0.5, 0.5}, 400, 51);
    CHECK(profile.runs == 400);
    REQUIRE(profile.plus_frequency.size() == 1);
    CHECK(profile.plus_frequency[0] >= 0.37);
    CHECK(profile.plus_frequency[0] <= 0.63);
  }
  SUBCASE("small matrix, every eigenvector") {
    RngEngine rng = make_rng(705);
    const SymmetricMatrix a =
        testutil::rotated_diagonal({1.5, 1.0, 0.7, 0.4}, rng);
    const SignProfile profile = sign_profile(a, 2, 2, {0.6, 0.6}, 200, 52);
    REQUIRE(profile.plus_frequency.size() == 4);
    for (double f : profile.plus_frequency) {
      CHECK(f >= 0.35);
      CHECK(f <= 0.65);
    }
  }
  SUBCASE("validation") {
    SymmetricMatrix a(2);
    a.set(0, 0, 1.0);
    CHECK_THROWS_AS(sign_profile(a, 3, 1, {0.5}, 10, 1), InvalidArgument);
    CHECK_THROWS_AS(sign_profile(a, 1, 2, {0.5}, 10, 1), InvalidArgument);
    CHECK_THROWS_AS(sign_profile(a, 1, 1, {0.5}, 0, 1), InvalidArgument);
  }
}

TEST_CASE("incoherence trace on a maximally coherent diagonal instance") {
  std::vector<double> spec(16);
  for (std::size_t i = 0; i < 16; ++i)
    spec[i] = 2.0 - 0.1 * static_cast<double>(i);
  const SymmetricMatrix a = SymmetricMatrix::diagonal(spec);
  const PrivacyParams priv = entry_params(1.0, 1e-6);

  const IncoherenceReport report = incoherence_trace(a, 2, 4, priv, 5, 61);
  CHECK(report.mu == doctest::Approx(16.0).epsilon(1e-12));
  CHECK(report.threshold ==
        doctest::Approx(4.0 * std::sqrt(16.0 * std::log(16.0) / 16.0))
            .epsilon(1e-12));
  REQUIRE(report.per_run_max.size() == 5);
  for (double m : report.per_run_max) {
    CHECK(m > 0.0);
    CHECK(m <= 1.0 + 1e-12);
  }
  CHECK(report.overall_max ==
        *std::max_element(report.per_run_max.begin(),
                          report.per_run_max.end()));
  CHECK(report.runs_over_threshold == 0);

  CHECK_THROWS_AS(incoherence_trace(a, 20, 4, priv, 5, 61), InvalidArgument);
  CHECK_THROWS_AS(incoherence_trace(a, 2, 4, priv, 0, 61), InvalidArgument);
}

TEST_CASE("per-run seeding makes run prefixes agree across run counts") {
  RngEngine rng = make_rng(706);
  const SymmetricMatrix a =
      testutil::rotated_diagonal({1.2, 0.8, 0.5, 0.3, 0.2}, rng);
  const PrivacyParams priv = entry_params(2.0, 1e-4);

  const IncoherenceReport two = incoherence_trace(a, 2, 3, priv, 2, 71);
  const IncoherenceReport three = incoherence_trace(a, 2, 3, priv, 3, 71);
  REQUIRE(two.per_run_max.size() == 2);
  REQUIRE(three.per_run_max.size() == 3);
  CHECK(two.per_run_max[0] == three.per_run_max[0]);
  CHECK(two.per_run_max[1] == three.per_run_max[1]);
}

}  // TEST_SUITE
