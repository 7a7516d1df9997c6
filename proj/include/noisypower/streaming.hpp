#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "noisypower/matrix.hpp"
#include "noisypower/noise.hpp"
#include "noisypower/power.hpp"
#include "noisypower/rng.hpp"

namespace noisypower {

// Samples z = (U Lambda g + g') / sqrt(D) with g ~ N(0, I_k) and
// g' ~ N(0, sigma^2 I_d). The normalizer D = tr(Lambda^2) + d sigma^2 makes
// E||z||^2 = 1; the covariance is (U Lambda^2 U^T + sigma^2 I) / D.
class SpikedCovarianceModel {
 public:
  static SpikedCovarianceModel create(OrthonormalBasis u,
                                      std::vector<double> lambdas,
                                      double noise_sigma);

  const OrthonormalBasis& u() const { return u_; }
  const std::vector<double>& lambdas() const { return lambdas_; }
  double noise_sigma() const { return sigma_; }
  double normalizer() const { return d_norm_; }
  std::size_t dim() const { return u_.dim(); }
  std::size_t rank() const { return lambdas_.size(); }

  SymmetricMatrix covariance() const;
  void sample(RngEngine& rng, std::vector<double>& out) const;

 private:
  SpikedCovarianceModel(OrthonormalBasis u, std::vector<double> lambdas,
                        double sigma, double d_norm)
      : u_(std::move(u)),
        lambdas_(std::move(lambdas)),
        sigma_(sigma),
        d_norm_(d_norm) {}

  OrthonormalBasis u_;
  std::vector<double> lambdas_;
  double sigma_;
  double d_norm_;
};

// Projection-concentration factor: any p-dimensional projection captures at
// most B p / d of the distribution's energy in expectation.
struct RoundnessParams {
  double b = 1.0;
  std::size_t p = 1;
};

// B = (lambda_1^2 + sigma^2) / (tr(Lambda^2)/d + sigma^2), paired with p = k.
RoundnessParams spiked_roundness(const SpikedCovarianceModel& model);

class SampleStream {
 public:
  virtual ~SampleStream() = default;
  virtual std::size_t dim() const = 0;
  // Fills out (resized to dim()) with the next sample; false once exhausted.
  virtual bool next(std::vector<double>& out) = 0;
};

// Infinite stream of spiked-model draws; RNG state is owned so consumption
// order fully determines the sequence.
class SpikedStream final : public SampleStream {
 public:
  SpikedStream(SpikedCovarianceModel model, std::uint64_t seed)
      : model_(std::move(model)), rng_(make_rng(seed, kStreamSamples)) {}

  std::size_t dim() const override { return model_.dim(); }
  bool next(std::vector<double>& out) override {
    model_.sample(rng_, out);
    return true;
  }

 private:
  SpikedCovarianceModel model_;
  RngEngine rng_;
};

// Fixed in-memory sample list, replayable from the start.
class ReplayStream final : public SampleStream {
 public:
  explicit ReplayStream(std::vector<std::vector<double>> samples);

  std::size_t dim() const override { return dim_; }
  bool next(std::vector<double>& out) override;
  void reset() { pos_ = 0; }
  std::size_t size() const { return samples_.size(); }

 private:
  std::vector<std::vector<double>> samples_;
  std::size_t dim_;
  std::size_t pos_ = 0;
};

// Multiplies every sample of an inner stream by a fixed scale factor
// (typically one produced by calibrate_scale).
class ScaledStream final : public SampleStream {
 public:
  ScaledStream(SampleStream& inner, double scale)
      : inner_(&inner), scale_(scale) {}

  std::size_t dim() const override { return inner_->dim(); }
  bool next(std::vector<double>& out) override;

 private:
  SampleStream* inner_;
  double scale_;
};

struct SpmConfig {
  std::size_t samples = 0;      // n; block size is floor(n / L)
  std::size_t iterations = 1;   // L
  std::size_t width = 1;        // p
  std::size_t target_rank = 1;  // k
  std::uint64_t seed = 0;
};

// Optional tracing inputs. spm_run itself never allocates d x d storage, so
// the true covariance and its top-k directions are precomputed by the caller
// and must outlive the run. Without a context the trace stays empty.
struct SpmTraceContext {
  const SymmetricMatrix* covariance;
  OrthonormalBasis u;

  SpmTraceContext(const SymmetricMatrix& a, OrthonormalBasis top)
      : covariance(&a), u(std::move(top)) {}

  static SpmTraceContext make(const SymmetricMatrix& a, std::size_t k);
};

struct SpmResult {
  OrthonormalBasis basis;
  ConvergenceTrace trace;
  std::size_t block_size = 0;  // T
};

// Streaming power method: per block accumulates Y = sum_i z_i (z_i^T X) one
// sample at a time in O(pd) working memory, then QR-factorizes. Consumes
// exactly L * floor(n/L) samples; throws StreamExhausted if the stream ends
// early and RankDeficientRun if a block loses column rank.
SpmResult spm_run(SampleStream& stream, const SpmConfig& cfg,
                  const SpmTraceContext* ctx = nullptr);

// One SPM block expressed as power-method noise G = (1/T) sum z (z^T X) - AX,
// accumulated in the same sample order as spm_run so that a replayed run of
// the plain power method reproduces SPM exactly.
class SamplingBlockNoise final : public NoiseSource {
 public:
  SamplingBlockNoise(SampleStream& stream, std::size_t block_size,
                     const SymmetricMatrix& covariance)
      : stream_(&stream), block_(block_size), cov_(&covariance) {}

  DenseMatrix generate(std::size_t iteration, const DenseMatrix& current,
                       RngEngine& rng) override;
  NoiseKind kind() const override { return NoiseKind::sampling; }

 private:
  SampleStream* stream_;
  std::size_t block_;
  const SymmetricMatrix* cov_;
};

// Sampling-noise magnitudes for a fixed sample set: with Ahat the empirical
// covariance, returns (||(A - Ahat) X||, ||U^T (A - Ahat) X||). Ahat is never
// materialized.
struct ErrorTerms {
  double g_norm = 0.0;
  double g_proj_norm = 0.0;
};

ErrorTerms measure_error_terms(const SymmetricMatrix& a,
                               const OrthonormalBasis& u,
                               const OrthonormalBasis& x,
                               const std::vector<std::vector<double>>& samples);

// Zeroes z (returning true) when ||z|| > C log n, ||U^T z|| or ||X^T z||
// exceeds C log n sqrt(B p / d); otherwise leaves z untouched.
bool truncate_sample(std::vector<double>& z, const OrthonormalBasis& x,
                     const OrthonormalBasis& u, double b, std::size_t p,
                     std::size_t n, double c_trunc = 8.0);

// Scale s making the pilot draws satisfy the tail bound
// fraction{||s z|| > t} <= exp(-t) at t in {1, 2, 4}. Throws
// CalibrationFailed when no s in [1e-6, 1e6] works.
double calibrate_scale(SampleStream& stream, std::size_t pilot_draws = 10000);

}  // namespace noisypower
