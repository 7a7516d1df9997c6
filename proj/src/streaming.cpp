#include "noisypower/streaming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "noisypower/angles.hpp"
#include "noisypower/dense.hpp"
#include "noisypower/errors.hpp"

namespace noisypower {

namespace {

double vec_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double t : v) s += t * t;
  return std::sqrt(s);
}

// Accumulates one block of T samples into Y += z (z^T X); O(pd) per sample.
void accumulate_block(SampleStream& stream, std::size_t block,
                      const DenseMatrix& x, DenseMatrix& y,
                      std::vector<double>& z, std::vector<double>& proj) {
  const std::size_t d = x.rows(), p = x.cols();
  for (std::size_t i = 0; i < block; ++i) {
    if (!stream.next(z))
      throw StreamExhausted("stream ended before supplying L*T samples");
    if (z.size() != d)
      throw DimensionMismatch("stream emitted a wrong-dimension sample");
    for (std::size_t c = 0; c < p; ++c) {
      double dot = 0.0;
      for (std::size_t r = 0; r < d; ++r) dot += z[r] * x(r, c);
      proj[c] = dot;
    }
    for (std::size_t r = 0; r < d; ++r) {
      const double zr = z[r];
      if (zr == 0.0) continue;
      for (std::size_t c = 0; c < p; ++c) y(r, c) += zr * proj[c];
    }
  }
}

}  // namespace

SpikedCovarianceModel SpikedCovarianceModel::create(OrthonormalBasis u,
                                                    std::vector<double> lambdas,
                                                    double noise_sigma) {
  if (lambdas.empty() || lambdas.size() != u.width())
    throw InvalidArgument("one signal strength per planted direction");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0))
      throw InvalidArgument("signal strengths must be positive");
    if (i > 0 && lambdas[i] > lambdas[i - 1])
      throw InvalidArgument("signal strengths must be non-increasing");
  }
  if (noise_sigma < 0.0)
    throw InvalidArgument("noise level must be nonnegative");
  double trace = 0.0;
  for (double l : lambdas) trace += l * l;
  const double d_norm =
      trace + static_cast<double>(u.dim()) * noise_sigma * noise_sigma;
  if (!(d_norm > 0.0)) throw InvalidArgument("normalizer must be positive");
  return SpikedCovarianceModel(std::move(u), std::move(lambdas), noise_sigma,
                               d_norm);
}

SymmetricMatrix SpikedCovarianceModel::covariance() const {
  const std::size_t d = dim(), k = rank();
  SymmetricMatrix cov(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double v = 0.0;
      for (std::size_t m = 0; m < k; ++m)
        v += u_(i, m) * lambdas_[m] * lambdas_[m] * u_(j, m);
      if (i == j) v += sigma_ * sigma_;
      cov.set(i, j, v / d_norm_);
    }
  }
  return cov;
}

void SpikedCovarianceModel::sample(RngEngine& rng,
                                   std::vector<double>& out) const {
  const std::size_t d = dim(), k = rank();
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> g(k);
  for (std::size_t m = 0; m < k; ++m) g[m] = lambdas_[m] * gauss(rng);
  out.assign(d, 0.0);
  const double root = std::sqrt(d_norm_);
  for (std::size_t i = 0; i < d; ++i) {
    double v = 0.0;
    for (std::size_t m = 0; m < k; ++m) v += u_(i, m) * g[m];
    v += sigma_ * gauss(rng);
    out[i] = v / root;
  }
}

RoundnessParams spiked_roundness(const SpikedCovarianceModel& model) {
  double trace = 0.0;
  for (double l : model.lambdas()) trace += l * l;
  const double s2 = model.noise_sigma() * model.noise_sigma();
  const double top = model.lambdas().front() * model.lambdas().front() + s2;
  const double bottom = trace / static_cast<double>(model.dim()) + s2;
  return RoundnessParams{top / bottom, model.rank()};
}

ReplayStream::ReplayStream(std::vector<std::vector<double>> samples)
    : samples_(std::move(samples)) {
  if (samples_.empty())
    throw InvalidArgument("replay stream needs at least one sample");
  dim_ = samples_.front().size();
  for (const auto& s : samples_)
    if (s.size() != dim_)
      throw DimensionMismatch("replay samples have mixed dimensions");
}

bool ReplayStream::next(std::vector<double>& out) {
  if (pos_ >= samples_.size()) return false;
  out = samples_[pos_++];
  return true;
}

bool ScaledStream::next(std::vector<double>& out) {
  if (!inner_->next(out)) return false;
  for (double& t : out) t *= scale_;
  return true;
}

SpmTraceContext SpmTraceContext::make(const SymmetricMatrix& a,
                                      std::size_t k) {
  return SpmTraceContext(a, top_eigenvectors(symmetric_eig(a), k));
}

SpmResult spm_run(SampleStream& stream, const SpmConfig& cfg,
                  const SpmTraceContext* ctx) {
  const std::size_t d = stream.dim();
  if (cfg.target_rank < 1 || cfg.target_rank > cfg.width || cfg.width > d)
    throw InvalidArgument("spm config requires 1 <= k <= p <= d");
  if (cfg.iterations < 1) throw InvalidArgument("spm config requires L >= 1");
  const std::size_t block = cfg.samples / cfg.iterations;
  if (block < 1)
    throw InvalidArgument("spm config requires floor(n/L) >= 1");

  RngEngine init_rng = make_rng(cfg.seed, kStreamInit);
  OrthonormalBasis x = random_orthonormal_basis(d, cfg.width, init_rng);

  ConvergenceTrace trace;
  if (ctx != nullptr) trace.rows.reserve(cfg.iterations);
  std::vector<double> z(d), proj(cfg.width);

  for (std::size_t ell = 1; ell <= cfg.iterations; ++ell) {
    DenseMatrix y(d, cfg.width);
    accumulate_block(stream, block, x.matrix(), y, z, proj);

    double noise_norm = 0.0, noise_proj_norm = 0.0;
    if (ctx != nullptr) {
      const DenseMatrix g = y.scaled(1.0 / static_cast<double>(block)) -
                            ctx->covariance->multiply(x.matrix());
      noise_norm = spectral_norm(g);
      noise_proj_norm = spectral_norm(ctx->u.matrix().transposed() * g);
    }

    try {
      x = gram_schmidt_qr(y).q;
    } catch (const RankDeficient& err) {
      throw RankDeficientRun(err, ell, std::move(trace));
    }

    if (ctx != nullptr) {
      const AngleReport report = angle_report(ctx->u, x);
      TraceRow row;
      row.iter = ell;
      row.tan_theta = report.tan_theta_k;
      row.cos_theta = report.cos_theta_k;
      row.residual = report.residual;
      row.noise_norm = noise_norm;
      row.noise_proj_norm = noise_proj_norm;
      row.x_inf_norm = x.max_abs();
      trace.rows.push_back(row);
    }
  }

  return SpmResult{std::move(x), std::move(trace), block};
}

DenseMatrix SamplingBlockNoise::generate(std::size_t, const DenseMatrix& current,
                                         RngEngine&) {
  const std::size_t d = current.rows(), p = current.cols();
  DenseMatrix y(d, p);
  std::vector<double> z(d), proj(p);
  accumulate_block(*stream_, block_, current, y, z, proj);
  return y.scaled(1.0 / static_cast<double>(block_)) -
         cov_->multiply(current);
}

ErrorTerms measure_error_terms(
    const SymmetricMatrix& a, const OrthonormalBasis& u,
    const OrthonormalBasis& x, const std::vector<std::vector<double>>& samples) {
  if (samples.empty()) throw InvalidArgument("samples must be nonempty");
  const std::size_t d = x.dim(), p = x.width();
  if (a.dim() != d || u.dim() != d)
    throw DimensionMismatch("error-term shapes are inconsistent");

  DenseMatrix y(d, p);
  std::vector<double> proj(p);
  for (const auto& z : samples) {
    if (z.size() != d)
      throw DimensionMismatch("sample dimension does not match the iterate");
    for (std::size_t c = 0; c < p; ++c) {
      double dot = 0.0;
      for (std::size_t r = 0; r < d; ++r) dot += z[r] * x(r, c);
      proj[c] = dot;
    }
    for (std::size_t r = 0; r < d; ++r) {
      const double zr = z[r];
      if (zr == 0.0) continue;
      for (std::size_t c = 0; c < p; ++c) y(r, c) += zr * proj[c];
    }
  }
  const DenseMatrix g =
      a.multiply(x.matrix()) -
      y.scaled(1.0 / static_cast<double>(samples.size()));
  return ErrorTerms{spectral_norm(g),
                    spectral_norm(u.matrix().transposed() * g)};
}

bool truncate_sample(std::vector<double>& z, const OrthonormalBasis& x,
                     const OrthonormalBasis& u, double b, std::size_t p,
                     std::size_t n, double c_trunc) {
  const std::size_t d = z.size();
  if (x.dim() != d || u.dim() != d)
    throw DimensionMismatch("truncation shapes are inconsistent");
  const double log_n = std::log(static_cast<double>(n));
  const double norm_cap = c_trunc * log_n;
  const double proj_cap =
      norm_cap * std::sqrt(b * static_cast<double>(p) / static_cast<double>(d));

  auto projected_norm = [&](const OrthonormalBasis& basis) {
    double s = 0.0;
    for (std::size_t c = 0; c < basis.width(); ++c) {
      double dot = 0.0;
      for (std::size_t r = 0; r < d; ++r) dot += basis(r, c) * z[r];
      s += dot * dot;
    }
    return std::sqrt(s);
  };

  const bool cut = vec_norm(z) > norm_cap || projected_norm(u) > proj_cap ||
                   projected_norm(x) > proj_cap;
  if (cut) std::fill(z.begin(), z.end(), 0.0);
  return cut;
}

double calibrate_scale(SampleStream& stream, std::size_t pilot_draws) {
  if (pilot_draws < 100)
    throw InvalidArgument("calibration needs at least 100 pilot draws");
  std::vector<double> norms(pilot_draws);
  std::vector<double> z;
  for (std::size_t i = 0; i < pilot_draws; ++i) {
    if (!stream.next(z))
      throw StreamExhausted("stream ended during calibration pilot");
    norms[i] = vec_norm(z);
  }
  std::sort(norms.begin(), norms.end());

  const double levels[] = {1.0, 2.0, 4.0};
  const double n = static_cast<double>(pilot_draws);
  double scale = std::numeric_limits<double>::infinity();
  for (double t : levels) {
    const auto allowed = static_cast<std::size_t>(std::exp(-t) * n);
    const double q = norms[pilot_draws - 1 - allowed];
    if (q > 0.0) scale = std::min(scale, t / q);
  }
  if (!std::isfinite(scale)) scale = 1.0;  // all-zero pilot: any scale works

  auto tail_ok = [&](double s) {
    for (double t : levels) {
      std::size_t over = 0;
      for (double nm : norms)
        if (s * nm > t) ++over;
      if (static_cast<double>(over) > std::exp(-t) * n) return false;
    }
    return true;
  };
  for (int backoff = 0; backoff < 1000 && !tail_ok(scale); ++backoff)
    scale *= 0.999;

  if (!(scale >= 1e-6 && scale <= 1e6) || !tail_ok(scale))
    throw CalibrationFailed("no scale in [1e-6, 1e6] satisfies the tail bound");
  return scale;
}

}  // namespace noisypower
