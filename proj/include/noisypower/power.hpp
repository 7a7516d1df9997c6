#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "noisypower/dense.hpp"
#include "noisypower/errors.hpp"
#include "noisypower/matrix.hpp"
#include "noisypower/noise.hpp"
#include "noisypower/rng.hpp"

namespace noisypower {

struct NpmConfig {
  std::size_t iterations = 1;   // L
  std::size_t width = 1;        // p
  std::size_t target_rank = 1;  // k, angles measured against the top-k subspace
  std::uint64_t seed = 0;
  bool record_noise_norms = true;
};

struct TraceRow {
  std::size_t iter = 0;
  double tan_theta = 0.0;
  double cos_theta = 0.0;
  double residual = 0.0;
  double noise_norm = 0.0;
  double noise_proj_norm = 0.0;
  double x_inf_norm = 0.0;
};

// One record per iteration, 1-based; angle columns measured against the
// oracle top-k eigenspace of the input matrix.
struct ConvergenceTrace {
  std::vector<TraceRow> rows;
};

struct NpmResult {
  OrthonormalBasis basis;
  ConvergenceTrace trace;
};

// Raised when an iterate A*X + G loses column rank mid-run. Carries the
// failing iteration and the rows recorded before it so noise-dominated
// regimes stay diagnosable.
class RankDeficientRun : public RankDeficient {
 public:
  RankDeficientRun(const RankDeficient& cause, std::size_t iteration,
                   ConvergenceTrace partial)
      : RankDeficient(cause),
        iteration(iteration),
        partial_trace(std::move(partial)) {}

  std::size_t iteration;
  ConvergenceTrace partial_trace;
};

// Power iteration with injected per-step noise: X_l = QR(A X_{l-1} + G_l),
// run for exactly cfg.iterations steps. When x0 is null the start basis is
// drawn from make_rng(cfg.seed, kStreamInit). The overload taking noise_rng
// lets callers keep consuming the same noise stream after the run.
NpmResult npm_run(const SymmetricMatrix& a, const NpmConfig& cfg,
                  NoiseSource& noise, const OrthonormalBasis* x0 = nullptr);
NpmResult npm_run(const SymmetricMatrix& a, const NpmConfig& cfg,
                  NoiseSource& noise, const OrthonormalBasis* x0,
                  RngEngine& noise_rng);

// One-step tangent decrease check. Preconditions (verified, reported via
// preconditions_met rather than thrown):
//   4 ||U^T G|| <= (sigma_k - sigma_{k+1}) cos theta_k(U, X)
//   4 ||G||     <= (sigma_k - sigma_{k+1}) eps,   eps < 1
// Claimed bound: tan theta_k(U, QR(AX+G)) <= max(eps, max(eps,
// (sigma_{k+1}/sigma_k)^{1/4}) tan theta_k(U, X)) + 1e-9.
struct DecreaseCheck {
  bool preconditions_met = false;
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double cos_before = 0.0;
};

DecreaseCheck check_decrease(const SymmetricMatrix& a, const OrthonormalBasis& x,
                             const DenseMatrix& g, std::size_t k, double eps);

// ceil(c_iter * sigma_k / (sigma_k - sigma_k1) * ln(d tau / eps)).
// Requires sigma_k > sigma_k1 >= 0 (else GapNonpositive), eps in (0, 1/2],
// tau >= 1.
std::size_t required_iterations(double sigma_k, double sigma_k1, std::size_t d,
                                double tau, double eps, double c_iter = 2.0);

// True iff 5||G|| <= eps (sigma_k - sigma_{k+1}) and
// 5||U^T G|| <= (sigma_k - sigma_{k+1}) (sqrt(p) - sqrt(k-1)) / (tau sqrt(d)).
bool noise_admissible(const SymmetricMatrix& a, const OrthonormalBasis& u,
                      const DenseMatrix& g, double eps, std::size_t p,
                      std::size_t k, double tau);

// Monte-Carlo probe of the two gap-free convergence conjectures on diagonal
// instances. Noise is Gaussian, drawn at 80% of the conjectured admissible
// caps and rescaled so the caps always hold; noise_scale_factor shrinks it
// further (0 gives the noiseless degenerate probe).
struct ConjectureProbeConfig {
  int id = 1;  // 1: subspace recovery with gap sigma_k - sigma_{p+1}
               // 2: spectral approximation with p = 2k and no gap
  std::size_t trials = 100;
  std::size_t d = 20;
  std::size_t k = 1;
  std::size_t p = 2;
  std::vector<double> spectrum;  // d singular values, non-increasing
  double eps = 0.1;
  double noise_scale_factor = 1.0;
  double c_iter = 2.0;
  double c_conj = 10.0;  // threshold sigma_{k+1} + c_conj * eps for id 2
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct ConjectureProbeReport {
  int id = 1;
  std::size_t trials = 0;
  std::size_t violations = 0;
  double worst_margin = 0.0;  // max over trials of lhs - rhs; > 0 violates
  std::size_t iterations = 0;
};

ConjectureProbeReport probe_conjecture(const ConjectureProbeConfig& cfg);

}  // namespace noisypower
