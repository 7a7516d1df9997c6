// End-to-end acceptance checks for the library. Each criterion prints one
// PASS/FAIL line with its measured margin and wall time; the process exits
// nonzero if any criterion fails. All tolerances are pinned here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "noisypower/angles.hpp"
#include "noisypower/dense.hpp"
#include "noisypower/errors.hpp"
#include "noisypower/io.hpp"
#include "noisypower/matrix.hpp"
#include "noisypower/noise.hpp"
#include "noisypower/power.hpp"
#include "noisypower/privacy.hpp"
#include "noisypower/rng.hpp"
#include "noisypower/streaming.hpp"

using namespace noisypower;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double max_entry_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

// Q diag(eigs) Q^T assembled entrywise so the result is exactly symmetric.
SymmetricMatrix rotated_diagonal(const std::vector<double>& eigs,
                                 RngEngine& rng) {
  const std::size_t d = eigs.size();
  const OrthonormalBasis q = random_orthonormal_basis(d, d, rng);
  SymmetricMatrix a(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double v = 0.0;
      for (std::size_t m = 0; m < d; ++m) v += q(i, m) * eigs[m] * q(j, m);
      a.set(i, j, v);
    }
  return a;
}

// --- criterion 1: noiseless contraction at the exact spectral ratio --------

Outcome criterion_contraction() {
  const SymmetricMatrix a = SymmetricMatrix::diagonal({3.0, 1.0});
  const double inv = 1.0 / std::sqrt(2.0);
  DenseMatrix x0m(2, 1);
  x0m(0, 0) = inv;
  x0m(1, 0) = inv;
  const OrthonormalBasis x0(std::move(x0m));

  NpmConfig cfg;
  cfg.iterations = 20;
  cfg.width = 1;
  cfg.target_rank = 1;
  ZeroNoise noise;
  const NpmResult run = npm_run(a, cfg, noise, &x0);

  double worst = 0.0;
  for (std::size_t i = 0; i < 20; ++i) {
    const double expected = std::pow(3.0, -static_cast<double>(i + 1));
    const double got = run.trace.rows[i].tan_theta;
    worst = std::max(worst, std::abs(got - expected) / expected);
  }
  return Outcome{worst <= 1e-12,
                 fmt("max relative tangent error %.2e over 20 steps", worst)};
}

// --- criteria 2 and 11 share one instance generator ------------------------

struct DecreaseInstance {
  std::vector<double> spectrum;
  SymmetricMatrix a;
  OrthonormalBasis u;
  OrthonormalBasis x;
  DenseMatrix g;
  std::size_t k = 1, p = 1;
  double eps = 0.1;
};

DecreaseInstance make_decrease_instance(RngEngine& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t d = 4 + static_cast<std::size_t>(unif(rng) * 17.0);  // 4..20
  const std::size_t k = 1 + static_cast<std::size_t>(unif(rng) * 3.0);  // 1..3
  const std::size_t p =
      std::min(d, k + static_cast<std::size_t>(unif(rng) * 3.0));

  std::vector<double> spec(d);
  double top = 1.0 + unif(rng);
  for (std::size_t i = 0; i < k; ++i) {
    spec[i] = top;
    top *= 1.0 - 0.05 * unif(rng);
  }
  double low = spec[k - 1] / (1.3 + 0.7 * unif(rng));
  for (std::size_t i = k; i < d; ++i) {
    spec[i] = low;
    low *= 1.0 - 0.1 * unif(rng);
  }

  DecreaseInstance inst{spec,
                        SymmetricMatrix::diagonal(spec),
                        OrthonormalBasis::standard(d, k),
                        random_orthonormal_basis(d, p, rng),
                        DenseMatrix(d, p),
                        k,
                        p,
                        0.05 + 0.4 * unif(rng)};

  const double gap = spec[k - 1] - spec[k];
  const double cos_before = cos_theta_k(inst.u, inst.x);
  DenseMatrix raw = gaussian_matrix(d, p, 1.0, rng);
  const double op = spectral_norm(raw);
  const double proj = spectral_norm(inst.u.matrix().transposed() * raw);
  const double scale = 0.9 * std::min(gap * cos_before / (4.0 * proj),
                                      gap * inst.eps / (4.0 * op));
  inst.g = raw.scaled(scale);
  return inst;
}

Outcome criterion_decrease_suite() {
  RngEngine rng = make_rng(0xC2);
  std::size_t violations = 0, unmet = 0;
  double worst = -1e300;
  for (int i = 0; i < 1000; ++i) {
    const DecreaseInstance inst = make_decrease_instance(rng);
    const DecreaseCheck c =
        check_decrease(inst.a, inst.x, inst.g, inst.k, inst.eps);
    if (!c.preconditions_met) ++unmet;
    if (!c.holds) ++violations;
    worst = std::max(worst, c.lhs - c.rhs);
  }
  const bool pass = violations == 0 && unmet == 0;
  return Outcome{pass, fmt("0 of 1000 instances may violate; %g violated, "
                           "%g unmet preconditions, worst lhs-rhs %.2e",
                           static_cast<double>(violations),
                           static_cast<double>(unmet), worst)};
}

Outcome criterion_projection_inequality() {
  RngEngine rng = make_rng(0xC2);  // same instances as the decrease suite
  std::size_t checked = 0, violations = 0;
  double worst = -1e300;
  for (int i = 0; i < 1000; ++i) {
    const DecreaseInstance inst = make_decrease_instance(rng);
    if (inst.p != inst.k) continue;
    ++checked;
    const double sigma_1 = inst.spectrum[0];
    const double sigma_k1 = inst.spectrum[inst.k];
    const DenseMatrix a_dense = inst.a.to_dense();

    const OrthonormalBasis next =
        gram_schmidt_qr(inst.a.multiply(inst.x.matrix()) + inst.g).q;
    for (const OrthonormalBasis* basis : {&inst.x, &next}) {
      const DenseMatrix& xm = basis->matrix();
      const double lhs = spectral_norm(a_dense - xm * (xm.transposed() * a_dense));
      const double sin_theta = residual_norm(inst.u, *basis);
      const double rhs = sigma_k1 + sin_theta * sigma_1 + 1e-9;
      if (lhs > rhs) ++violations;
      worst = std::max(worst, lhs - rhs);
    }
  }
  const bool pass = checked > 0 && violations == 0;
  return Outcome{pass, fmt("%g width-k iterates checked twice each, "
                           "%g violations, worst lhs-rhs %.2e",
                           static_cast<double>(checked),
                           static_cast<double>(violations), worst)};
}

// --- criterion 3: random-start tangent bound --------------------------------

Outcome criterion_start_tangent() {
  const std::size_t d = 50, p = 5, k = 3;
  const double tau = 4.0;
  std::vector<double> spec(d);
  for (std::size_t i = 0; i < d; ++i)
    spec[i] = 1.5 * std::pow(0.9, static_cast<double>(i));
  const SymmetricMatrix a = SymmetricMatrix::diagonal(spec);
  const OrthonormalBasis u = OrthonormalBasis::standard(d, k);

  const double bound = tau * std::sqrt(static_cast<double>(d)) /
                       (std::sqrt(5.0) - std::sqrt(2.0));
  std::size_t ok = 0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    RngEngine init = make_rng(seed, kStreamInit);
    const OrthonormalBasis x0 = random_orthonormal_basis(d, p, init);
    if (tan_theta_k(u, x0) <= bound) ++ok;
  }
  (void)a;
  return Outcome{ok >= 990, fmt("start tangent under %.4g in %g of 1000 seeds "
                                "(need 990)",
                                bound, static_cast<double>(ok))};
}

// --- criterion 4: orthogonal commutation, single step and full run ----------

Outcome criterion_commutation() {
  RngEngine rng = make_rng(0xC4);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst_step = 0.0, worst_run = 0.0;

  for (int i = 0; i < 100; ++i) {
    const std::size_t d = 3 + static_cast<std::size_t>(i % 10);
    const std::size_t p = 1 + static_cast<std::size_t>(i % 3);

    // Single step: GS(O V) == O GS(V) for a Haar-random rotation O.
    const DenseMatrix o_any = random_orthonormal_basis(d, d, rng).matrix();
    DenseMatrix v(d, p);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < p; ++c) v(r, c) = gauss(rng);
    worst_step = std::max(
        worst_step,
        max_entry_diff(gram_schmidt_qr(o_any * v).q.matrix(),
                       o_any * gram_schmidt_qr(v).q.matrix()));

    // Full run: sign flips in the eigenbasis commute with A, so the whole
    // noisy iteration transported by O must land on O X_L.
    std::vector<double> eigs(d);
    for (std::size_t m = 0; m < d; ++m)
      eigs[m] = 1.5 * std::pow(0.85, static_cast<double>(m));
    const SymmetricMatrix a = rotated_diagonal(eigs, rng);
    const OrthonormalBasis vbasis = symmetric_eig(a).eigenvectors;
    std::vector<double> signs(d);
    for (double& s : signs) s = unif(rng) < 0.5 ? -1.0 : 1.0;
    DenseMatrix o(d, d);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) {
        double val = 0.0;
        for (std::size_t m = 0; m < d; ++m)
          val += vbasis(r, m) * signs[m] * vbasis(c, m);
        o(r, c) = val;
      }

    const std::size_t L = 5;
    const OrthonormalBasis x0 = random_orthonormal_basis(d, p, rng);
    std::vector<DenseMatrix> gs, gs_rot;
    for (std::size_t ell = 0; ell < L; ++ell) {
      gs.push_back(gaussian_matrix(d, p, 0.1, rng));
      gs_rot.push_back(o * gs.back());
    }

    NpmConfig cfg;
    cfg.iterations = L;
    cfg.width = p;
    cfg.target_rank = 1;
    cfg.record_noise_norms = false;
    ReplayNoise noise_plain(gs), noise_rot(gs_rot);
    const OrthonormalBasis x0_rot(o * x0.matrix());
    const NpmResult plain = npm_run(a, cfg, noise_plain, &x0);
    const NpmResult rotated = npm_run(a, cfg, noise_rot, &x0_rot);
    worst_run = std::max(worst_run,
                         max_entry_diff(rotated.basis.matrix(),
                                        o * plain.basis.matrix()));
  }
  const bool pass = worst_step <= 1e-8 && worst_run <= 1e-8;
  return Outcome{pass, fmt("worst single-step gap %.2e, worst full-run gap "
                           "%.2e (cap 1e-8)",
                           worst_step, worst_run)};
}

// --- criterion 5: recursive angle oracle agrees with the eigensolver --------

Outcome criterion_oracle_agreement() {
  RngEngine rng = make_rng(0xC5);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const OrthonormalBasis u = random_orthonormal_basis(6, 2, rng);
    const OrthonormalBasis x = random_orthonormal_basis(6, 3, rng);
    const std::vector<double> angles = angle_oracle(u, x);
    const double gap =
        std::abs(std::cos(angles.back()) - cos_theta_k(u, x));
    worst = std::max(worst, gap);
  }
  return Outcome{worst <= 1e-4,
                 fmt("worst cosine disagreement %.2e over 50 instances", worst)};
}

// --- criterion 6: streaming recovery improves with the sample budget --------

Outcome criterion_streaming_trend() {
  RngEngine model_rng = make_rng(0xC6);
  const OrthonormalBasis u = random_orthonormal_basis(100, 2, model_rng);
  const SpikedCovarianceModel model =
      SpikedCovarianceModel::create(u, {1.0, 0.9}, 0.5);
  const SymmetricMatrix cov = model.covariance();
  const SpmTraceContext ctx = SpmTraceContext::make(cov, 2);

  const std::size_t budgets[] = {2000, 20000, 200000};
  double med[3] = {0.0, 0.0, 0.0};
  for (int ni = 0; ni < 3; ++ni) {
    std::vector<double> finals;
    for (std::uint64_t t = 0; t < 20; ++t) {
      SpikedStream stream(model, mix_seed(0xC6B, t * 8 + ni));
      SpmConfig cfg;
      cfg.samples = budgets[ni];
      cfg.iterations = 10;
      cfg.width = 4;
      cfg.target_rank = 2;
      cfg.seed = mix_seed(0xC6A, t);
      finals.push_back(spm_run(stream, cfg, &ctx).trace.rows.back().residual);
    }
    med[ni] = median(std::move(finals));
  }

  // Replay identity: the same blocks expressed as power-method noise must
  // reproduce the streaming run to near roundoff.
  SpikedStream source(model, mix_seed(0xC6B, 0));
  std::vector<std::vector<double>> samples(2000);
  for (auto& z : samples) source.next(z);
  SpmConfig cfg;
  cfg.samples = 2000;
  cfg.iterations = 10;
  cfg.width = 4;
  cfg.target_rank = 2;
  cfg.seed = mix_seed(0xC6A, 0);
  ReplayStream spm_stream(samples);
  const SpmResult spm = spm_run(spm_stream, cfg, &ctx);
  ReplayStream npm_stream(samples);
  SamplingBlockNoise noise(npm_stream, 200, cov);
  NpmConfig ncfg;
  ncfg.iterations = 10;
  ncfg.width = 4;
  ncfg.target_rank = 2;
  ncfg.seed = cfg.seed;
  const NpmResult npm = npm_run(cov, ncfg, noise);
  const double replay_gap =
      std::max(max_entry_diff(spm.basis.matrix(), npm.basis.matrix()),
               std::abs(spm.trace.rows.back().residual -
                        npm.trace.rows.back().residual));

  const bool pass = med[1] <= med[0] && med[2] <= med[1] && med[2] <= 0.2 &&
                    replay_gap <= 1e-10;
  return Outcome{pass, fmt("median residuals %.3g / %.3g / %.3g", med[0],
                           med[1], med[2]) +
                           fmt(" (largest must be <= 0.2), replay gap %.1e",
                               replay_gap)};
}

// --- criterion 7: sampling error scales like n^{-1/2} -----------------------

Outcome criterion_error_scaling() {
  RngEngine rng = make_rng(0xC7);
  const OrthonormalBasis ub = random_orthonormal_basis(50, 2, rng);
  const SpikedCovarianceModel model =
      SpikedCovarianceModel::create(ub, {1.0, 0.8}, 0.5);
  const SymmetricMatrix a = model.covariance();
  const OrthonormalBasis u = SpmTraceContext::make(a, 2).u;
  const OrthonormalBasis x = random_orthonormal_basis(50, 3, rng);
  SpikedStream stream(model, 0xC7B);

  const std::size_t grid[] = {100, 316, 1000, 3162, 10000, 31623, 100000};
  std::vector<double> lx, ly;
  std::vector<double> z;
  for (std::size_t n : grid) {
    std::vector<double> reps;
    for (int r = 0; r < 5; ++r) {
      std::vector<std::vector<double>> samples(n);
      for (auto& s : samples) stream.next(s);
      reps.push_back(measure_error_terms(a, u, x, samples).g_norm);
    }
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(median(std::move(reps))));
  }

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(ly.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = num / den;
  return Outcome{std::abs(slope + 0.5) <= 0.15,
                 fmt("log-log slope %.3f (want -0.5 +- 0.15)", slope)};
}

// --- criterion 8: privacy noise calibration ---------------------------------

Outcome criterion_noise_calibration() {
  const double sigma = gaussian_sigma(1.0, std::exp(-1.0), 1, 1).value;
  const double lambda = laplacian_lambda(1.0, 1, 1, 4).value;
  if (sigma != 2.0 || lambda != 20.0)
    return Outcome{false, fmt("scale goldens off: sigma %.17g, lambda %.17g",
                              sigma, lambda)};

  RngEngine rng = make_rng(0xC8);
  const DenseMatrix g = gaussian_matrix(1000, 1000, sigma, rng);
  const DenseMatrix l = laplace_matrix(1000, 1000, lambda, rng);
  double gs = 0.0, ls = 0.0;
  for (std::size_t i = 0; i < 1000; ++i)
    for (std::size_t j = 0; j < 1000; ++j) {
      gs += g(i, j) * g(i, j);
      ls += l(i, j) * l(i, j);
    }
  const double gvar = gs / 1e6, lvar = ls / 1e6;
  const double gerr = std::abs(gvar - sigma * sigma) / (sigma * sigma);
  const double lerr =
      std::abs(lvar - 2.0 * lambda * lambda) / (2.0 * lambda * lambda);
  const bool pass = gerr <= 0.02 && lerr <= 0.02;
  return Outcome{pass, fmt("scales exact; variance errors %.4f and %.4f "
                           "over 1e6 draws (cap 0.02)",
                           gerr, lerr)};
}

// --- criterion 9: iterates stay flat on an incoherent (DCT) instance --------

Outcome criterion_incoherent_entries() {
  const std::size_t d = 64;
  DenseMatrix c(d, d);
  const double pi = 3.14159265358979323846;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t m = 0; m < d; ++m) {
      const double amp = m == 0 ? std::sqrt(1.0 / static_cast<double>(d))
                                : std::sqrt(2.0 / static_cast<double>(d));
      c(i, m) = amp * std::cos(pi * (2.0 * static_cast<double>(i) + 1.0) *
                               static_cast<double>(m) /
                               (2.0 * static_cast<double>(d)));
    }
  SymmetricMatrix a(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double v = 0.0;
      for (std::size_t m = 0; m < d; ++m)
        v += c(i, m) * (2.0 - 0.03 * static_cast<double>(m)) * c(j, m);
      a.set(i, j, v);
    }

  const PrivacyParams priv(1.0, 1e-6, Mechanism::gaussian_entry_scaled,
                           Neighborhood::single_entry);
  const IncoherenceReport report = incoherence_trace(a, 2, 20, priv, 100, 0xC9);
  const std::size_t under = 100 - report.runs_over_threshold;
  const bool pass = report.mu <= 2.0 + 1e-9 && under >= 95;
  return Outcome{pass, fmt("coherence %.4f, %g of 100 runs under the entry "
                           "threshold %.4f (need 95)",
                           report.mu, static_cast<double>(under),
                           report.threshold)};
}

// --- criterion 10: sign symmetry of the noisy iteration ---------------------

Outcome criterion_sign_symmetry() {
  RngEngine rng = make_rng(0xCA);
  const SymmetricMatrix a = rotated_diagonal(
      {1.5, 1.2, 1.0, 0.8, 0.6, 0.5, 0.4, 0.3}, rng);
  const SignProfile profile =
      sign_profile(a, 2, 5, {0.5, 0.5, 0.5, 0.5, 0.5}, 400, 0xCB);
  double worst = 0.0;
  for (double f : profile.plus_frequency)
    worst = std::max(worst, std::abs(f - 0.5));
  return Outcome{worst <= 0.13,
                 fmt("largest +1-frequency deviation %.3f over 8 coordinates "
                     "(cap 0.13)",
                     worst)};
}

// --- criterion 12: near-noiseless private low-rank approximation ------------

Outcome criterion_private_low_rank() {
  const SymmetricMatrix a = SymmetricMatrix::diagonal({3.0, 2.0, 1.0});
  const PrivacyParams priv(1e6, 1e-6, Mechanism::gaussian_entry_scaled,
                           Neighborhood::single_entry);
  const LowRankResult run = private_low_rank(a, 1, priv, 0xCC);
  return Outcome{run.error_norm <= 1.01,
                 fmt("approximation error %.6f (cap 1.01)", run.error_norm)};
}

// --- criterion 13: conjecture probes complete and report margins ------------

Outcome criterion_conjecture_probes() {
  nlohmann::json reports = nlohmann::json::array();
  std::string summary;

  {
    ConjectureProbeConfig cfg;
    cfg.id = 1;
    cfg.trials = 200;
    cfg.d = 30;
    cfg.k = 2;
    cfg.p = 6;
    cfg.spectrum.resize(30);
    for (std::size_t i = 0; i < 30; ++i)
      cfg.spectrum[i] = std::max(0.05, 2.0 - 0.1 * static_cast<double>(i));
    cfg.eps = 0.3;
    cfg.seed = 0xCD01;
    cfg.threads = 4;
    const ConjectureProbeReport r = probe_conjecture(cfg);
    reports.push_back({{"id", r.id},
                       {"trials", r.trials},
                       {"violations", r.violations},
                       {"worst_margin", r.worst_margin},
                       {"iterations", r.iterations},
                       {"eps", cfg.eps},
                       {"d", cfg.d},
                       {"k", cfg.k},
                       {"p", cfg.p}});
    summary += fmt("subspace probe: %g violations, worst margin %.3g; ",
                   static_cast<double>(r.violations), r.worst_margin);
  }
  {
    ConjectureProbeConfig cfg;
    cfg.id = 2;
    cfg.trials = 200;
    cfg.d = 40;
    cfg.k = 2;
    cfg.p = 4;
    cfg.spectrum.resize(40);
    for (std::size_t i = 0; i < 40; ++i)
      cfg.spectrum[i] = 1.0 / static_cast<double>(i + 1);
    cfg.eps = 0.05;
    cfg.seed = 0xCD02;
    cfg.threads = 4;
    const ConjectureProbeReport r = probe_conjecture(cfg);
    reports.push_back({{"id", r.id},
                       {"trials", r.trials},
                       {"violations", r.violations},
                       {"worst_margin", r.worst_margin},
                       {"iterations", r.iterations},
                       {"eps", cfg.eps},
                       {"d", cfg.d},
                       {"k", cfg.k},
                       {"p", cfg.p}});
    summary += fmt("spectral probe: %g violations, worst margin %.3g",
                   static_cast<double>(r.violations), r.worst_margin);
  }

  std::ofstream out("conjecture_probe_reports.json", std::ios::binary);
  out << reports.dump(2) << "\n";
  return Outcome{out.good(), summary + " (reports written)"};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    Outcome (*fn)();
  };
  const Entry entries[] = {
      {1, "noiseless contraction", criterion_contraction},
      {2, "one-step decrease suite", criterion_decrease_suite},
      {3, "random start tangent bound", criterion_start_tangent},
      {4, "orthogonal commutation", criterion_commutation},
      {5, "angle oracle agreement", criterion_oracle_agreement},
      {6, "streaming recovery trend", criterion_streaming_trend},
      {7, "sampling error scaling", criterion_error_scaling},
      {8, "privacy noise calibration", criterion_noise_calibration},
      {9, "incoherent-basis entry bound", criterion_incoherent_entries},
      {10, "sign symmetry", criterion_sign_symmetry},
      {11, "projection error inequality", criterion_projection_inequality},
      {12, "private low-rank error", criterion_private_low_rank},
      {13, "conjecture probes", criterion_conjecture_probes},
  };

  int failures = 0;
  for (const Entry& e : entries) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = e.fn();
    } catch (const std::exception& err) {
      out = Outcome{false, std::string("threw: ") + err.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (!out.pass) ++failures;
    std::printf("%s %2d %-30s %s [%.2fs]\n", out.pass ? "PASS" : "FAIL", e.id,
                e.name, out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
