#include "noisypower/power.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "noisypower/angles.hpp"

namespace noisypower {

namespace {

void validate_config(const SymmetricMatrix& a, const NpmConfig& cfg) {
  const std::size_t d = a.dim();
  if (cfg.target_rank < 1 || cfg.target_rank > cfg.width || cfg.width > d)
    throw InvalidArgument("npm config requires 1 <= k <= p <= d");
  if (cfg.iterations < 1) throw InvalidArgument("npm config requires L >= 1");
}

}  // namespace

NpmResult npm_run(const SymmetricMatrix& a, const NpmConfig& cfg,
                  NoiseSource& noise, const OrthonormalBasis* x0) {
  RngEngine noise_rng = make_rng(cfg.seed, kStreamNoise);
  return npm_run(a, cfg, noise, x0, noise_rng);
}

NpmResult npm_run(const SymmetricMatrix& a, const NpmConfig& cfg,
                  NoiseSource& noise, const OrthonormalBasis* x0,
                  RngEngine& noise_rng) {
  validate_config(a, cfg);
  const std::size_t d = a.dim();

  OrthonormalBasis x = [&] {
    if (x0 != nullptr) {
      if (x0->dim() != d || x0->width() != cfg.width)
        throw DimensionMismatch("start basis shape does not match config");
      return *x0;
    }
    RngEngine init_rng = make_rng(cfg.seed, kStreamInit);
    return random_orthonormal_basis(d, cfg.width, init_rng);
  }();

  const SpectrumSummary spectrum = symmetric_eig(a);
  const OrthonormalBasis u = top_eigenvectors(spectrum, cfg.target_rank);

  ConvergenceTrace trace;
  trace.rows.reserve(cfg.iterations);

  for (std::size_t ell = 1; ell <= cfg.iterations; ++ell) {
    const DenseMatrix g = noise.generate(ell, x.matrix(), noise_rng);
    if (g.rows() != d || g.cols() != cfg.width)
      throw DimensionMismatch("noise source emitted a wrong-shape matrix");
    const DenseMatrix y = a.multiply(x.matrix()) + g;
    try {
      x = gram_schmidt_qr(y).q;
    } catch (const RankDeficient& err) {
      throw RankDeficientRun(err, ell, std::move(trace));
    }

    const AngleReport report = angle_report(u, x);
    TraceRow row;
    row.iter = ell;
    row.tan_theta = report.tan_theta_k;
    row.cos_theta = report.cos_theta_k;
    row.residual = report.residual;
    if (cfg.record_noise_norms) {
      row.noise_norm = spectral_norm(g);
      row.noise_proj_norm = spectral_norm(u.matrix().transposed() * g);
    }
    row.x_inf_norm = x.max_abs();
    trace.rows.push_back(row);
  }

  return NpmResult{std::move(x), std::move(trace)};
}

DecreaseCheck check_decrease(const SymmetricMatrix& a, const OrthonormalBasis& x,
                             const DenseMatrix& g, std::size_t k, double eps) {
  if (k < 1 || k > x.width())
    throw InvalidArgument("check_decrease requires 1 <= k <= width(X)");
  if (g.rows() != x.dim() || g.cols() != x.width())
    throw DimensionMismatch("noise shape does not match the iterate");

  const SpectrumSummary spectrum = symmetric_eig(a);
  const double sigma_k = spectrum.singular_value(k - 1);
  const double sigma_k1 = spectrum.singular_value(k);
  const double gap = sigma_k - sigma_k1;
  const OrthonormalBasis u = top_eigenvectors(spectrum, k);

  const AngleReport before = angle_report(u, x);
  const double proj_norm = spectral_norm(u.matrix().transposed() * g);
  const double op_norm = spectral_norm(g);

  DecreaseCheck out;
  out.cos_before = before.cos_theta_k;
  out.preconditions_met = 4.0 * proj_norm <= gap * before.cos_theta_k &&
                          4.0 * op_norm <= gap * eps && eps < 1.0;

  const OrthonormalBasis next = gram_schmidt_qr(a.multiply(x.matrix()) + g).q;
  out.lhs = tan_theta_k(u, next);
  const double ratio = sigma_k > 0.0 ? std::pow(sigma_k1 / sigma_k, 0.25) : 1.0;
  out.rhs =
      std::max(eps, std::max(eps, ratio) * before.tan_theta_k) + 1e-9;
  out.holds = out.lhs <= out.rhs;
  return out;
}

std::size_t required_iterations(double sigma_k, double sigma_k1, std::size_t d,
                                double tau, double eps, double c_iter) {
  if (!(sigma_k > sigma_k1) || sigma_k1 < 0.0)
    throw GapNonpositive("required_iterations needs sigma_k > sigma_k1 >= 0");
  if (!(eps > 0.0 && eps <= 0.5))
    throw InvalidArgument("eps must lie in (0, 1/2]");
  if (tau < 1.0) throw InvalidArgument("tau must be at least 1");
  if (d < 1) throw InvalidArgument("dimension must be positive");
  const double value = c_iter * sigma_k / (sigma_k - sigma_k1) *
                       std::log(static_cast<double>(d) * tau / eps);
  return static_cast<std::size_t>(std::ceil(value));
}

bool noise_admissible(const SymmetricMatrix& a, const OrthonormalBasis& u,
                      const DenseMatrix& g, double eps, std::size_t p,
                      std::size_t k, double tau) {
  if (u.dim() != a.dim() || g.rows() != a.dim())
    throw DimensionMismatch("admissibility check shapes are inconsistent");
  const SpectrumSummary spectrum = symmetric_eig(a);
  const double gap =
      spectrum.singular_value(k - 1) - spectrum.singular_value(k);
  const double d = static_cast<double>(a.dim());
  const double width_term =
      std::sqrt(static_cast<double>(p)) - std::sqrt(static_cast<double>(k - 1));
  const bool op_ok = 5.0 * spectral_norm(g) <= eps * gap;
  const bool proj_ok = 5.0 * spectral_norm(u.matrix().transposed() * g) <=
                       gap * width_term / (tau * std::sqrt(d));
  return op_ok && proj_ok;
}

namespace {

// Gaussian noise rescaled each step so the conjectured caps always hold;
// drawn at 80% of the caps so clipping is the exception, not the rule.
class CappedGaussianNoise final : public NoiseSource {
 public:
  CappedGaussianNoise(const OrthonormalBasis& u, double cap_op, double cap_proj,
                      double scale_factor)
      : u_(u), cap_op_(cap_op), cap_proj_(cap_proj), factor_(scale_factor) {}

  DenseMatrix generate(std::size_t, const DenseMatrix& current,
                       RngEngine& rng) override {
    DenseMatrix g = gaussian_matrix(current.rows(), current.cols(), 1.0, rng);
    if (factor_ <= 0.0) {
      g.fill(0.0);
      return g;
    }
    const double op = spectral_norm(g);
    const double proj = spectral_norm(u_.matrix().transposed() * g);
    if (op <= 0.0 || proj <= 0.0) {
      g.fill(0.0);
      return g;
    }
    const double to_caps = std::min(cap_op_ / op, cap_proj_ / proj);
    const double scale = std::min(0.8 * factor_ * to_caps, to_caps);
    return g.scaled(scale);
  }
  NoiseKind kind() const override { return NoiseKind::gaussian; }

 private:
  const OrthonormalBasis& u_;
  double cap_op_;
  double cap_proj_;
  double factor_;
};

}  // namespace

ConjectureProbeReport probe_conjecture(const ConjectureProbeConfig& cfg) {
  if (cfg.id != 1 && cfg.id != 2)
    throw InvalidArgument("conjecture id must be 1 or 2");
  if (cfg.spectrum.size() != cfg.d)
    throw InvalidArgument("spectrum must list d singular values");
  if (cfg.k < 1 || cfg.p > cfg.d)
    throw InvalidArgument("probe requires 1 <= k and p <= d");
  if (cfg.id == 1 && cfg.p <= cfg.k)
    throw InvalidArgument("conjecture 1 requires p > k");
  if (cfg.id == 2 && cfg.p != 2 * cfg.k)
    throw InvalidArgument("conjecture 2 requires p = 2k");
  if (cfg.trials < 1) throw InvalidArgument("trials must be positive");
  if (!(cfg.eps > 0.0)) throw InvalidArgument("eps must be positive");
  if (cfg.spectrum.back() < 0.0)
    throw InvalidArgument("spectrum must be non-increasing and nonnegative");
  for (std::size_t i = 0; i + 1 < cfg.spectrum.size(); ++i)
    if (cfg.spectrum[i] < cfg.spectrum[i + 1])
      throw InvalidArgument("spectrum must be non-increasing and nonnegative");

  const std::size_t d = cfg.d;
  const auto sigma = [&](std::size_t j) {  // 1-based
    return j <= d ? cfg.spectrum[j - 1] : 0.0;
  };

  const SymmetricMatrix a = SymmetricMatrix::diagonal(cfg.spectrum);
  const OrthonormalBasis u = OrthonormalBasis::standard(d, cfg.k);
  const DenseMatrix a_dense = a.to_dense();

  double cap_op = 0.0, cap_proj = 0.0;
  std::size_t iterations = 0;
  const double dd = static_cast<double>(d);
  if (cfg.id == 1) {
    const double gap_p = sigma(cfg.k) - sigma(cfg.p + 1);
    if (!(gap_p > 0.0))
      throw GapNonpositive("conjecture 1 needs sigma_k > sigma_{p+1}");
    cap_op = cfg.eps * gap_p / 100.0;
    cap_proj = (std::sqrt(static_cast<double>(cfg.p)) -
                std::sqrt(static_cast<double>(cfg.k - 1))) /
               std::sqrt(dd) / 100.0;
    iterations = static_cast<std::size_t>(std::ceil(
        cfg.c_iter * sigma(cfg.k) / gap_p * std::log(dd / cfg.eps)));
  } else {
    cap_op = cfg.eps;
    cap_proj = cfg.eps * std::sqrt(static_cast<double>(cfg.k) / dd);
    iterations = static_cast<std::size_t>(std::ceil(
        cfg.c_iter * sigma(cfg.k + 1) / cfg.eps * std::log(dd)));
  }
  iterations = std::max<std::size_t>(iterations, 1);

  std::vector<double> margins(cfg.trials, 0.0);
  std::atomic<std::size_t> next_trial{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t t = next_trial.fetch_add(1);
      if (t >= cfg.trials || failed.load()) return;
      try {
        NpmConfig run_cfg;
        run_cfg.iterations = iterations;
        run_cfg.width = cfg.p;
        run_cfg.target_rank = cfg.k;
        run_cfg.seed = mix_seed(cfg.seed, kStreamTrialBase + t);
        run_cfg.record_noise_norms = false;
        CappedGaussianNoise noise(u, cap_op, cap_proj, cfg.noise_scale_factor);
        const NpmResult result = npm_run(a, run_cfg, noise);
        double margin = 0.0;
        if (cfg.id == 1) {
          margin = result.trace.rows.back().residual - cfg.eps;
        } else {
          const DenseMatrix& xm = result.basis.matrix();
          const DenseMatrix rest =
              a_dense - xm * (xm.transposed() * a_dense);
          margin = spectral_norm(rest) -
                   (sigma(cfg.k + 1) + cfg.c_conj * cfg.eps);
        }
        margins[t] = margin;
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };

  const std::size_t workers =
      std::max<std::size_t>(1, std::min(cfg.threads, cfg.trials));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) std::rethrow_exception(failure);

  ConjectureProbeReport report;
  report.id = cfg.id;
  report.trials = cfg.trials;
  report.iterations = iterations;
  report.worst_margin = -std::numeric_limits<double>::infinity();
  for (double m : margins) {
    report.worst_margin = std::max(report.worst_margin, m);
    if (m > 0.0) ++report.violations;
  }
  return report;
}

}  // namespace noisypower
