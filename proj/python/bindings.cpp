// Python bindings for the core operations. Matrices cross the boundary as
// float64 numpy arrays (copied in and out); results come back as plain dicts
// so callers stay free of wrapper types. Library precondition errors map to
// ValueError, rank collapse and eigensolver stalls to RuntimeError.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "noisypower/angles.hpp"
#include "noisypower/dense.hpp"
#include "noisypower/errors.hpp"
#include "noisypower/matrix.hpp"
#include "noisypower/noise.hpp"
#include "noisypower/power.hpp"
#include "noisypower/privacy.hpp"
#include "noisypower/rng.hpp"
#include "noisypower/streaming.hpp"

namespace py = pybind11;
using namespace noisypower;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

DenseMatrix dense_from(const Array& arr, const char* what) {
  if (arr.ndim() != 2)
    throw InvalidArgument(std::string(what) + " must be a 2d array");
  DenseMatrix m(static_cast<std::size_t>(arr.shape(0)),
                static_cast<std::size_t>(arr.shape(1)));
  const auto r = arr.unchecked<2>();
  for (py::ssize_t i = 0; i < arr.shape(0); ++i)
    for (py::ssize_t j = 0; j < arr.shape(1); ++j)
      m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = r(i, j);
  return m;
}

SymmetricMatrix symmetric_from(const Array& arr, const char* what) {
  const DenseMatrix m = dense_from(arr, what);
  return SymmetricMatrix::from_dense(m, 1e-12 * (1.0 + m.max_abs()));
}

OrthonormalBasis basis_from(const Array& arr, const char* what) {
  return OrthonormalBasis(dense_from(arr, what));
}

py::array_t<double> to_array(const DenseMatrix& m) {
  py::array_t<double> out({static_cast<py::ssize_t>(m.rows()),
                           static_cast<py::ssize_t>(m.cols())});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      w(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = m(i, j);
  return out;
}

// Columns: iter, tan_theta, cos_theta, residual, noise_norm,
// noise_proj_norm, x_inf_norm. One row per iteration.
py::array_t<double> trace_to_array(const ConvergenceTrace& trace) {
  py::array_t<double> out(
      {static_cast<py::ssize_t>(trace.rows.size()), py::ssize_t{7}});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const TraceRow& r = trace.rows[i];
    const py::ssize_t row = static_cast<py::ssize_t>(i);
    w(row, 0) = static_cast<double>(r.iter);
    w(row, 1) = r.tan_theta;
    w(row, 2) = r.cos_theta;
    w(row, 3) = r.residual;
    w(row, 4) = r.noise_norm;
    w(row, 5) = r.noise_proj_norm;
    w(row, 6) = r.x_inf_norm;
  }
  return out;
}

std::vector<std::vector<double>> samples_from(const Array& arr) {
  if (arr.ndim() != 2)
    throw InvalidArgument("samples must be a 2d array, one sample per row");
  const auto r = arr.unchecked<2>();
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(arr.shape(0)));
  for (py::ssize_t i = 0; i < arr.shape(0); ++i) {
    rows[static_cast<std::size_t>(i)].resize(
        static_cast<std::size_t>(arr.shape(1)));
    for (py::ssize_t j = 0; j < arr.shape(1); ++j)
      rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = r(i, j);
  }
  return rows;
}

PrivacyParams entry_params(double epsilon, double delta) {
  return PrivacyParams(epsilon, delta, Mechanism::gaussian_entry_scaled,
                       Neighborhood::single_entry);
}

// Same seed derivation as the CLI's model mode, so python-generated inputs
// reproduce CLI runs exactly.
SpikedCovarianceModel spiked_model(std::size_t d,
                                   const std::vector<double>& lambdas,
                                   double sigma, std::uint64_t seed) {
  RngEngine rng = make_rng(mix_seed(seed, kStreamSamples), kStreamInit);
  return SpikedCovarianceModel::create(
      random_orthonormal_basis(d, lambdas.size(), rng), lambdas, sigma);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Noisy power method: streaming and differentially private PCA";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const RankDeficient& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    } catch (const NoConvergence& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    } catch (const Error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def(
      "npm",
      [](const Array& a, std::size_t k, std::size_t p, std::size_t L,
         std::uint64_t seed, const std::string& noise, double noise_sigma,
         const std::optional<Array>& x0) {
        const SymmetricMatrix sym = symmetric_from(a, "a");
        NpmConfig cfg;
        cfg.target_rank = k;
        cfg.width = p;
        cfg.iterations = L;
        cfg.seed = seed;
        std::unique_ptr<NoiseSource> src;
        if (noise == "zero")
          src = std::make_unique<ZeroNoise>();
        else if (noise == "gaussian")
          src = std::make_unique<GaussianNoise>(noise_sigma);
        else
          throw InvalidArgument("noise must be 'zero' or 'gaussian'");
        std::optional<OrthonormalBasis> start;
        if (x0) start = basis_from(*x0, "x0");
        const NpmResult r = npm_run(sym, cfg, *src, start ? &*start : nullptr);
        return py::dict(py::arg("basis") = to_array(r.basis.matrix()),
                        py::arg("trace") = trace_to_array(r.trace));
      },
      py::arg("a"), py::arg("k"), py::arg("p"), py::arg("L"), py::arg("seed"),
      py::arg("noise") = "gaussian", py::arg("noise_sigma") = 0.1,
      py::arg("x0") = py::none(),
      "Power iteration X <- QR(A X + G) with per-step noise. Returns the "
      "final basis and the per-iteration trace (columns: iter, tan_theta, "
      "cos_theta, residual, noise_norm, noise_proj_norm, x_inf_norm), "
      "angles measured against the top-k eigenspace of a.");

  m.def(
      "spm",
      [](const Array& samples, std::size_t k, std::size_t p, std::size_t L,
         std::uint64_t seed, std::optional<std::size_t> n,
         const std::optional<Array>& reference) {
        std::vector<std::vector<double>> rows = samples_from(samples);
        SpmConfig cfg;
        cfg.samples = n ? *n : rows.size();
        cfg.iterations = L;
        cfg.width = p;
        cfg.target_rank = k;
        cfg.seed = seed;
        std::optional<SymmetricMatrix> ref;
        std::optional<SpmTraceContext> ctx;
        if (reference) {
          ref = symmetric_from(*reference, "reference");
          ctx.emplace(SpmTraceContext::make(*ref, k));
        }
        ReplayStream stream(std::move(rows));
        const SpmResult r = spm_run(stream, cfg, ctx ? &*ctx : nullptr);
        return py::dict(py::arg("basis") = to_array(r.basis.matrix()),
                        py::arg("trace") = trace_to_array(r.trace),
                        py::arg("block_size") = r.block_size);
      },
      py::arg("samples"), py::arg("k"), py::arg("p"), py::arg("L"),
      py::arg("seed"), py::arg("n") = py::none(),
      py::arg("reference") = py::none(),
      "Streaming PCA over the given samples (one per row) in L blocks of "
      "floor(n/L). The trace is empty unless a reference covariance is "
      "supplied for angle measurement.");

  m.def(
      "ppm",
      [](const Array& a, std::size_t k, std::size_t p, std::size_t L,
         double epsilon, double delta, std::uint64_t seed) {
        const PpmResult r =
            ppm_run(symmetric_from(a, "a"), p, L, entry_params(epsilon, delta),
                    seed, k);
        return py::dict(py::arg("basis") = to_array(r.basis.matrix()),
                        py::arg("trace") = trace_to_array(r.trace),
                        py::arg("final_product") = to_array(r.final_product),
                        py::arg("sigma") = r.noise_scale.value,
                        py::arg("noisy_products") = r.noisy_products);
      },
      py::arg("a"), py::arg("k"), py::arg("p"), py::arg("L"),
      py::arg("epsilon"), py::arg("delta"), py::arg("seed"),
      "Private power method under the entry-scaled Gaussian mechanism; "
      "sigma is calibrated for L+1 noisy products.");

  m.def(
      "spectral_ppm",
      [](const Array& a, std::size_t k, std::size_t p, std::size_t L,
         double epsilon, double delta, const std::string& mechanism,
         std::uint64_t seed) {
        Mechanism mech;
        if (mechanism == "gaussian")
          mech = Mechanism::gaussian_spectral;
        else if (mechanism == "laplacian")
          mech = Mechanism::laplacian_spectral;
        else
          throw InvalidArgument("mechanism must be 'gaussian' or 'laplacian'");
        const PrivacyParams priv(epsilon, delta, mech,
                                 Neighborhood::unit_spectral);
        const SpectralPpmResult r =
            spectral_ppm_run(symmetric_from(a, "a"), p, L, priv, seed, k);
        return py::dict(py::arg("basis") = to_array(r.basis.matrix()),
                        py::arg("trace") = trace_to_array(r.trace),
                        py::arg("scale") = r.noise_scale.value,
                        py::arg("noisy_products") = r.noisy_products);
      },
      py::arg("a"), py::arg("k"), py::arg("p"), py::arg("L"),
      py::arg("epsilon"), py::arg("delta") = 0.0,
      py::arg("mechanism") = "gaussian", py::arg("seed") = 0,
      "Private power method under unit-spectral neighborhoods with plain "
      "Gaussian or Laplacian noise (the latter requires delta = 0).");

  m.def(
      "low_rank",
      [](const Array& a, std::size_t k, double epsilon, double delta,
         std::uint64_t seed, double tau, double eps_target) {
        const LowRankResult r = private_low_rank(
            symmetric_from(a, "a"), k, entry_params(epsilon, delta), seed, tau,
            eps_target);
        return py::dict(py::arg("approx") = to_array(r.approx),
                        py::arg("error_norm") = r.error_norm,
                        py::arg("residual_norm") = r.residual_norm,
                        py::arg("final_noise_norm") = r.final_noise_norm,
                        py::arg("iterations") = r.iterations,
                        py::arg("sigma") = r.noise_scale.value);
      },
      py::arg("a"), py::arg("k"), py::arg("epsilon"), py::arg("delta"),
      py::arg("seed"), py::arg("tau") = 1.0, py::arg("eps_target") = 0.01,
      "Private rank-2k approximation B = X_L Y^T with its spectral error.");

  m.def(
      "gaussian_sigma",
      [](double epsilon, double delta, std::size_t p, std::size_t L) {
        return gaussian_sigma(epsilon, delta, p, L).value;
      },
      py::arg("epsilon"), py::arg("delta"), py::arg("p"), py::arg("L"),
      "Per-entry Gaussian scale (1/epsilon) sqrt(4 p L ln(1/delta)).");

  m.def(
      "laplacian_lambda",
      [](double epsilon, std::size_t p, std::size_t L, std::size_t d) {
        return laplacian_lambda(epsilon, p, L, d).value;
      },
      py::arg("epsilon"), py::arg("p"), py::arg("L"), py::arg("d"),
      "Per-entry Laplacian scale 10 p L sqrt(d) / epsilon.");

  m.def("required_iterations", &required_iterations, py::arg("sigma_k"),
        py::arg("sigma_k1"), py::arg("d"), py::arg("tau"), py::arg("eps"),
        py::arg("c_iter") = 2.0,
        "ceil(c_iter sigma_k / gap * ln(d tau / eps)); needs a positive gap "
        "and eps in (0, 1/2].");

  m.def(
      "cos_theta_k",
      [](const Array& u, const Array& x) {
        return cos_theta_k(basis_from(u, "u"), basis_from(x, "x"));
      },
      py::arg("u"), py::arg("x"),
      "Cosine of the k-th principal angle between the column spans.");

  m.def(
      "tan_theta_k",
      [](const Array& u, const Array& x) {
        return tan_theta_k(basis_from(u, "u"), basis_from(x, "x"));
      },
      py::arg("u"), py::arg("x"),
      "Tangent of the k-th principal angle; +inf when the cosine vanishes.");

  m.def(
      "residual_norm",
      [](const Array& u, const Array& x) {
        return residual_norm(basis_from(u, "u"), basis_from(x, "x"));
      },
      py::arg("u"), py::arg("x"), "Spectral norm of (I - X X^T) U.");

  m.def(
      "angle_oracle",
      [](const Array& u, const Array& x) {
        return angle_oracle(basis_from(u, "u"), basis_from(x, "x"));
      },
      py::arg("u"), py::arg("x"),
      "All principal angles (ascending, radians) via the recursive "
      "definition rather than the eigensolver.");

  m.def(
      "check_decrease",
      [](const Array& a, const Array& x, const Array& g, std::size_t k,
         double eps) {
        const DecreaseCheck c =
            check_decrease(symmetric_from(a, "a"), basis_from(x, "x"),
                           dense_from(g, "g"), k, eps);
        return py::dict(py::arg("preconditions_met") = c.preconditions_met,
                        py::arg("holds") = c.holds, py::arg("lhs") = c.lhs,
                        py::arg("rhs") = c.rhs,
                        py::arg("cos_before") = c.cos_before);
      },
      py::arg("a"), py::arg("x"), py::arg("g"), py::arg("k"), py::arg("eps"),
      "One-step tangent decrease check with its admissibility "
      "preconditions.");

  m.def(
      "noise_admissible",
      [](const Array& a, const Array& u, const Array& g, double eps,
         std::size_t p, std::size_t k, double tau) {
        return noise_admissible(symmetric_from(a, "a"), basis_from(u, "u"),
                                dense_from(g, "g"), eps, p, k, tau);
      },
      py::arg("a"), py::arg("u"), py::arg("g"), py::arg("eps"), py::arg("p"),
      py::arg("k"), py::arg("tau"),
      "Whether both per-step noise bounds hold for this noise matrix.");

  m.def(
      "coherence",
      [](const Array& a, std::optional<std::size_t> rank) {
        return coherence(symmetric_from(a, "a"), rank);
      },
      py::arg("a"), py::arg("rank") = py::none(),
      "d * max_ij U_ij^2 over the leading eigenvector matrix.");

  m.def(
      "symmetric_eig",
      [](const Array& a) {
        const SpectrumSummary s = symmetric_eig(symmetric_from(a, "a"));
        return py::make_tuple(s.eigenvalues,
                              to_array(s.eigenvectors.matrix()));
      },
      py::arg("a"),
      "Jacobi eigendecomposition: (eigenvalues descending by value, "
      "eigenvector columns in the same order).");

  m.def(
      "spiked_covariance",
      [](std::size_t d, const std::vector<double>& lambdas, double sigma,
         std::uint64_t seed) {
        return to_array(
            spiked_model(d, lambdas, sigma, seed).covariance().to_dense());
      },
      py::arg("d"), py::arg("lambdas"), py::arg("sigma"), py::arg("seed"),
      "Covariance of the normalized spiked model with a seed-derived basis; "
      "matches the CLI's model mode for the same seed.");

  m.def(
      "spiked_samples",
      [](std::size_t d, const std::vector<double>& lambdas, double sigma,
         std::size_t n, std::uint64_t seed) {
        const SpikedCovarianceModel model =
            spiked_model(d, lambdas, sigma, seed);
        SpikedStream stream(model,
                            mix_seed(mix_seed(seed, kStreamSamples),
                                     kStreamNoise));
        py::array_t<double> out({static_cast<py::ssize_t>(n),
                                 static_cast<py::ssize_t>(d)});
        auto w = out.mutable_unchecked<2>();
        std::vector<double> z;
        for (std::size_t i = 0; i < n; ++i) {
          stream.next(z);
          for (std::size_t j = 0; j < d; ++j)
            w(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = z[j];
        }
        return out;
      },
      py::arg("d"), py::arg("lambdas"), py::arg("sigma"), py::arg("n"),
      py::arg("seed"),
      "First n samples of the spiked stream the CLI's model mode would "
      "consume for the same seed.");

  m.def(
      "probe_conjecture",
      [](int id, std::size_t trials, std::size_t k, std::size_t p,
         const std::vector<double>& spectrum, double eps, std::uint64_t seed,
         double noise_scale_factor, double c_iter, double c_conj,
         std::size_t threads) {
        ConjectureProbeConfig cfg;
        cfg.id = id;
        cfg.trials = trials;
        cfg.d = spectrum.size();
        cfg.k = k;
        cfg.p = p;
        cfg.spectrum = spectrum;
        cfg.eps = eps;
        cfg.seed = seed;
        cfg.noise_scale_factor = noise_scale_factor;
        cfg.c_iter = c_iter;
        cfg.c_conj = c_conj;
        cfg.threads = threads;
        const ConjectureProbeReport r = probe_conjecture(cfg);
        return py::dict(py::arg("id") = r.id, py::arg("trials") = r.trials,
                        py::arg("violations") = r.violations,
                        py::arg("worst_margin") = r.worst_margin,
                        py::arg("iterations") = r.iterations);
      },
      py::arg("id"), py::arg("trials"), py::arg("k"), py::arg("p"),
      py::arg("spectrum"), py::arg("eps"), py::arg("seed"),
      py::arg("noise_scale_factor") = 1.0, py::arg("c_iter") = 2.0,
      py::arg("c_conj") = 10.0, py::arg("threads") = 1,
      "Monte-Carlo probe of the gap-free convergence conjectures on "
      "diagonal instances; reports violations and the worst margin.");

  m.def(
      "sign_profile",
      [](const Array& a, std::size_t p, std::size_t L,
         const std::vector<double>& sigma_schedule, std::size_t runs,
         std::uint64_t seed) {
        const SignProfile r = sign_profile(symmetric_from(a, "a"), p, L,
                                           sigma_schedule, runs, seed);
        return py::dict(py::arg("runs") = r.runs,
                        py::arg("plus_frequency") = r.plus_frequency);
      },
      py::arg("a"), py::arg("p"), py::arg("L"), py::arg("sigma_schedule"),
      py::arg("runs"), py::arg("seed"),
      "Per-eigenvector frequency of a positive alignment of the first "
      "iterate column across independent noisy runs.");

  m.def(
      "incoherence_trace",
      [](const Array& a, std::size_t p, std::size_t L, double epsilon,
         double delta, std::size_t runs, std::uint64_t seed) {
        const IncoherenceReport r =
            incoherence_trace(symmetric_from(a, "a"), p, L,
                              entry_params(epsilon, delta), runs, seed);
        return py::dict(py::arg("mu") = r.mu,
                        py::arg("threshold") = r.threshold,
                        py::arg("per_run_max") = r.per_run_max,
                        py::arg("overall_max") = r.overall_max,
                        py::arg("runs_over_threshold") = r.runs_over_threshold);
      },
      py::arg("a"), py::arg("p"), py::arg("L"), py::arg("epsilon"),
      py::arg("delta"), py::arg("runs"), py::arg("seed"),
      "Max-entry profile of private runs against the incoherence threshold "
      "4 sqrt(mu ln d / d).");

  m.def("mix_seed", &mix_seed, py::arg("seed"), py::arg("stream"),
        "The library's splitmix64-based seed/stream mixer, exposed so "
        "external drivers can reproduce sub-stream derivations.");
}
