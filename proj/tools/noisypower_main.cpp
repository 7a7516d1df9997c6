// Seeded experiment runner. Every subcommand reads an optional JSON config
// file plus flags (flags win), validates, dispatches into the library, and
// writes its artifacts under --out. Exit codes: 0 success, 2 for config or
// precondition errors, 3 when a run loses rank or an eigensolve stalls.
// Artifacts are byte-identical across reruns of the same resolved config.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>
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

using nlohmann::json;
using namespace noisypower;

namespace {

// Config-level failure; the message always names the offending field.
class ConfigInvalid : public std::runtime_error {
 public:
  explicit ConfigInvalid(const std::string& what)
      : std::runtime_error(what) {}
};

// Merged config (file fields overridden by flags) with typed accessors.
// Every accessor records the value it resolved, including defaults, so the
// summary can embed the exact configuration that produced the run.
class Config {
 public:
  Config(json merged, std::string command) : in_(std::move(merged)) {
    resolved_["command"] = std::move(command);
  }

  bool has(const char* key) const { return in_.contains(key); }

  std::uint64_t u64(const char* key) {
    const json& v = fetch(key);
    if (v.is_number_unsigned()) return note(key, v.get<std::uint64_t>());
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
      return note(key, static_cast<std::uint64_t>(v.get<std::int64_t>()));
    throw ConfigInvalid(std::string(key) + " must be a non-negative integer");
  }

  std::size_t size(const char* key) {
    return static_cast<std::size_t>(u64(key));
  }
  std::size_t size_or(const char* key, std::size_t def) {
    if (has(key)) return size(key);
    note(key, static_cast<std::uint64_t>(def));
    return def;
  }

  double num(const char* key) {
    const json& v = fetch(key);
    if (!v.is_number())
      throw ConfigInvalid(std::string(key) + " must be a number");
    return note(key, v.get<double>());
  }
  double num_or(const char* key, double def) {
    if (has(key)) return num(key);
    note(key, def);
    return def;
  }

  std::string str(const char* key) {
    const json& v = fetch(key);
    if (!v.is_string())
      throw ConfigInvalid(std::string(key) + " must be a string");
    return note(key, v.get<std::string>());
  }
  std::string str_or(const char* key, const std::string& def) {
    if (has(key)) return str(key);
    note(key, def);
    return def;
  }

  std::vector<double> num_list(const char* key) {
    const json& v = fetch(key);
    if (!v.is_array() || v.empty())
      throw ConfigInvalid(std::string(key) + " must be a non-empty array");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number())
        throw ConfigInvalid(std::string(key) + " must hold numbers only");
      out.push_back(e.get<double>());
    }
    note(key, out);
    return out;
  }

  std::vector<std::size_t> size_list(const char* key) {
    const json& v = fetch(key);
    if (!v.is_array() || v.empty())
      throw ConfigInvalid(std::string(key) + " must be a non-empty array");
    std::vector<std::size_t> out;
    for (const json& e : v) {
      if (!(e.is_number_unsigned() ||
            (e.is_number_integer() && e.get<std::int64_t>() >= 0)))
        throw ConfigInvalid(std::string(key) +
                            " must hold non-negative integers only");
      out.push_back(e.get<std::size_t>());
    }
    note(key, out);
    return out;
  }

  const json& resolved() const { return resolved_; }

 private:
  const json& fetch(const char* key) const {
    const auto it = in_.find(key);
    if (it == in_.end())
      throw ConfigInvalid(std::string(key) + " is required");
    return *it;
  }

  template <typename T>
  T note(const char* key, const T& value) {
    resolved_[key] = value;
    return value;
  }
  double note(const char* key, double value) {
    resolved_[key] = value;
    return value;
  }
  std::uint64_t note(const char* key, std::uint64_t value) {
    resolved_[key] = value;
    return value;
  }

  json in_;
  json resolved_ = json::object();
};

std::string join(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string prepare_out(Config& c) {
  const std::string out = c.str_or("out", ".");
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw ConfigInvalid("out directory cannot be created: " + out);
  return out;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  f << j.dump(2) << '\n';
  if (!f) throw ConfigInvalid("out path is not writable: " + path);
}

json trace_tail(const ConvergenceTrace& trace) {
  if (trace.rows.empty()) return nullptr;
  const TraceRow& r = trace.rows.back();
  return json{{"iter", r.iter},
              {"tan_theta", r.tan_theta},
              {"cos_theta", r.cos_theta},
              {"residual", r.residual},
              {"noise_norm", r.noise_norm},
              {"noise_proj_norm", r.noise_proj_norm},
              {"x_inf_norm", r.x_inf_norm}};
}

// Runs fn(), writing any partial trace a rank collapse left behind before
// letting the failure propagate to the exit-code mapping.
template <typename Fn>
auto run_with_partial_trace(const std::string& out, Fn&& fn) {
  try {
    return fn();
  } catch (const RankDeficientRun& e) {
    write_trace_csv(join(out, "trace.csv"), e.partial_trace);
    throw;
  }
}

void write_privacy_ledger(const std::string& path, const PrivacyParams& priv,
                          std::size_t noisy_products, double scale) {
  write_json(path, json{{"epsilon", priv.epsilon()},
                        {"delta", priv.delta()},
                        {"mechanism", mechanism_name(priv.mechanism())},
                        {"noisy_products", noisy_products},
                        {"sigma_or_lambda", scale}});
}

// Shared derivation for CLI-owned spiked models: the basis and the sample
// stream are seeded under the samples sub-stream of the run seed, so they
// never alias the iterate-init or noise streams the algorithms use.
OrthonormalBasis model_basis(std::size_t d, std::size_t spikes,
                             std::uint64_t seed) {
  RngEngine rng = make_rng(mix_seed(seed, kStreamSamples), kStreamInit);
  return random_orthonormal_basis(d, spikes, rng);
}

SymmetricMatrix empirical_covariance(
    const std::vector<std::vector<double>>& rows, std::size_t used) {
  const std::size_t d = rows.front().size();
  SymmetricMatrix acc(d);
  for (std::size_t s = 0; s < used; ++s)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        acc.set(i, j, acc(i, j) + rows[s][i] * rows[s][j]);
  const double inv = 1.0 / static_cast<double>(used);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) acc.set(i, j, acc(i, j) * inv);
  return acc;
}

// Deterministic default start for CLI runs: QR of [I_p; ones]. Spreads mass
// over every coordinate (tan theta_0 = 1 against the top axis in the 2d
// diagonal case) and stays fixed under RNG changes, unlike a seeded draw.
OrthonormalBasis spread_start(std::size_t d, std::size_t p) {
  DenseMatrix m(d, p);
  for (std::size_t j = 0; j < p; ++j) m(j, j) = 1.0;
  for (std::size_t i = p; i < d; ++i)
    for (std::size_t j = 0; j < p; ++j) m(i, j) = 1.0;
  return gram_schmidt_qr(m).q;
}

// --- subcommand handlers ----------------------------------------------------

int cmd_npm(Config& c) {
  const std::uint64_t seed = c.u64("seed");
  const std::string out = prepare_out(c);
  const SymmetricMatrix a = load_symmetric(c.str("matrix"));

  NpmConfig cfg;
  cfg.target_rank = c.size("k");
  cfg.width = c.size("p");
  cfg.iterations = c.size("L");
  cfg.seed = seed;

  const std::string kind = c.str_or("noise", "gaussian");
  std::unique_ptr<NoiseSource> noise;
  if (kind == "zero")
    noise = std::make_unique<ZeroNoise>();
  else if (kind == "gaussian")
    noise = std::make_unique<GaussianNoise>(c.num_or("noise_sigma", 0.1));
  else
    throw ConfigInvalid("noise must be \"zero\" or \"gaussian\"");

  std::optional<OrthonormalBasis> x0;
  if (c.has("x0")) {
    x0.emplace(load_dense(c.str("x0")));
  } else {
    const std::string init = c.str_or("init", "spread");
    if (init == "spread") {
      if (cfg.width >= 1 && cfg.width <= a.dim())
        x0 = spread_start(a.dim(), cfg.width);
    } else if (init != "random") {
      throw ConfigInvalid("init must be \"spread\" or \"random\"");
    }
  }

  const NpmResult result = run_with_partial_trace(
      out, [&] { return npm_run(a, cfg, *noise, x0 ? &*x0 : nullptr); });
  write_trace_csv(join(out, "trace.csv"), result.trace);
  write_json(join(out, "summary.json"),
             json{{"command", "npm"},
                  {"config", c.resolved()},
                  {"result", {{"iterations", result.trace.rows.size()},
                              {"final", trace_tail(result.trace)}}}});
  return 0;
}

int cmd_spm(Config& c) {
  const std::uint64_t seed = c.u64("seed");
  const std::string out = prepare_out(c);

  SpmConfig cfg;
  cfg.samples = c.size("n");
  cfg.iterations = c.size("L");
  cfg.width = c.size("p");
  cfg.target_rank = c.size("k");
  cfg.seed = seed;
  if (cfg.iterations == 0) throw ConfigInvalid("L must be positive");

  std::unique_ptr<SampleStream> stream;
  std::optional<SymmetricMatrix> reference;
  if (c.has("samples")) {
    std::vector<std::vector<double>> rows = load_vectors(c.str("samples"));
    const std::size_t used =
        cfg.iterations * (cfg.samples / cfg.iterations);
    if (rows.size() < used)
      throw StreamExhausted("samples file holds " +
                            std::to_string(rows.size()) +
                            " rows but the run consumes " +
                            std::to_string(used));
    if (c.has("matrix"))
      reference = load_symmetric(c.str("matrix"));
    else if (used > 0)
      reference = empirical_covariance(rows, used);
    stream = std::make_unique<ReplayStream>(std::move(rows));
  } else {
    const std::size_t d = c.size("d");
    const std::vector<double> lambdas = c.num_list("lambdas");
    const double model_sigma = c.num("model_sigma");
    const SpikedCovarianceModel model = SpikedCovarianceModel::create(
        model_basis(d, lambdas.size(), seed), lambdas, model_sigma);
    reference = model.covariance();
    stream = std::make_unique<SpikedStream>(
        model, mix_seed(mix_seed(seed, kStreamSamples), kStreamNoise));
  }

  std::optional<SpmTraceContext> ctx;
  if (reference) ctx.emplace(SpmTraceContext::make(*reference, cfg.target_rank));

  const SpmResult result = run_with_partial_trace(out, [&] {
    return spm_run(*stream, cfg, ctx ? &*ctx : nullptr);
  });
  write_trace_csv(join(out, "trace.csv"), result.trace);
  write_json(join(out, "summary.json"),
             json{{"command", "spm"},
                  {"config", c.resolved()},
                  {"result", {{"block_size", result.block_size},
                              {"iterations", result.trace.rows.size()},
                              {"final", trace_tail(result.trace)}}}});
  return 0;
}

int cmd_ppm(Config& c) {
  const std::uint64_t seed = c.u64("seed");
  const std::string out = prepare_out(c);
  const SymmetricMatrix a = load_symmetric(c.str("matrix"));
  const std::size_t k = c.size("k");
  const std::size_t p = c.size("p");
  const std::size_t L = c.size("L");
  const PrivacyParams priv(c.num("epsilon"), c.num("delta"),
                           Mechanism::gaussian_entry_scaled,
                           Neighborhood::single_entry);

  const PpmResult result = run_with_partial_trace(
      out, [&] { return ppm_run(a, p, L, priv, seed, k); });
  write_trace_csv(join(out, "trace.csv"), result.trace);
  write_json(join(out, "summary.json"),
             json{{"command", "ppm"},
                  {"config", c.resolved()},
                  {"result", {{"sigma", result.noise_scale.value},
                              {"noisy_products", result.noisy_products},
                              {"iterations", result.trace.rows.size()},
                              {"final", trace_tail(result.trace)}}}});
  write_privacy_ledger(join(out, "privacy.json"), priv,
                       result.noisy_products, result.noise_scale.value);
  return 0;
}

int cmd_spectral_ppm(Config& c) {
  const std::uint64_t seed = c.u64("seed");
  const std::string out = prepare_out(c);
  const SymmetricMatrix a = load_symmetric(c.str("matrix"));
  const std::size_t k = c.size("k");
  const std::size_t p = c.size("p");
  const std::size_t L = c.size("L");
  const double epsilon = c.num("epsilon");

  const std::string mech_name = c.str_or("mechanism", "gaussian");
  Mechanism mech;
  double delta = 0.0;
  if (mech_name == "gaussian") {
    mech = Mechanism::gaussian_spectral;
    delta = c.num("delta");
  } else if (mech_name == "laplacian") {
    mech = Mechanism::laplacian_spectral;
    delta = c.num_or("delta", 0.0);
  } else {
    throw ConfigInvalid("mechanism must be \"gaussian\" or \"laplacian\"");
  }
  const PrivacyParams priv(epsilon, delta, mech,
                           Neighborhood::unit_spectral);

  const SpectralPpmResult result = run_with_partial_trace(
      out, [&] { return spectral_ppm_run(a, p, L, priv, seed, k); });
  write_trace_csv(join(out, "trace.csv"), result.trace);
  write_json(join(out, "summary.json"),
             json{{"command", "spectral-ppm"},
                  {"config", c.resolved()},
                  {"result", {{"scale", result.noise_scale.value},
                              {"noisy_products", result.noisy_products},
                              {"iterations", result.trace.rows.size()},
                              {"final", trace_tail(result.trace)}}}});
  write_privacy_ledger(join(out, "privacy.json"), priv,
                       result.noisy_products, result.noise_scale.value);
  return 0;
}

int cmd_lowrank(Config& c) {
  const std::uint64_t seed = c.u64("seed");
  const std::string out = prepare_out(c);
  const SymmetricMatrix a = load_symmetric(c.str("matrix"));
  const std::size_t k = c.size("k");
  const double tau = c.num_or("tau", 1.0);
  const double eps_target = c.num_or("eps_target", 0.01);
  const PrivacyParams priv(c.num("epsilon"), c.num("delta"),
                           Mechanism::gaussian_entry_scaled,
                           Neighborhood::single_entry);

  const LowRankResult result =
      private_low_rank(a, k, priv, seed, tau, eps_target);
  save_dense(join(out, "approx.txt"), result.approx);
  write_json(join(out, "summary.json"),
             json{{"command", "lowrank"},
                  {"config", c.resolved()},
                  {"result", {{"error_norm", result.error_norm},
                              {"residual_norm", result.residual_norm},
                              {"final_noise_norm", result.final_noise_norm},
                              {"iterations", result.iterations},
                              {"sigma", result.noise_scale.value}}}});
  write_privacy_ledger(join(out, "privacy.json"), priv,
                       result.iterations + 1, result.noise_scale.value);
  return 0;
}

int cmd_coherence(Config& c) {
  c.u64("seed");
  const std::string out = prepare_out(c);
  const SymmetricMatrix a = load_symmetric(c.str("matrix"));
  std::optional<std::size_t> rank;
  if (c.has("rank")) rank = c.size("rank");
  const double mu = coherence(a, rank);
  write_json(join(out, "summary.json"),
             json{{"command", "coherence"},
                  {"config", c.resolved()},
                  {"result", {{"mu", mu}, {"d", a.dim()}}}});
  return 0;
}

int cmd_probe_conjecture(Config& c) {
  ConjectureProbeConfig cfg;
  cfg.seed = c.u64("seed");
  const std::string out = prepare_out(c);
  cfg.id = static_cast<int>(c.size_or("id", 1));
  cfg.trials = c.size("trials");
  cfg.k = c.size("k");
  cfg.p = c.size("p");
  cfg.spectrum = c.num_list("spectrum");
  cfg.d = c.size_or("d", cfg.spectrum.size());
  cfg.eps = c.num("eps");
  cfg.noise_scale_factor = c.num_or("noise_scale_factor", 1.0);
  cfg.c_iter = c.num_or("c_iter", 2.0);
  cfg.c_conj = c.num_or("c_conj", 10.0);
  cfg.threads = c.size_or("threads", 1);

  const ConjectureProbeReport report = probe_conjecture(cfg);
  const json rep{{"id", report.id},
                 {"trials", report.trials},
                 {"violations", report.violations},
                 {"worst_margin", report.worst_margin},
                 {"iterations", report.iterations}};
  write_json(join(out, "report.json"), rep);
  write_json(join(out, "summary.json"),
             json{{"command", "probe-conjecture"},
                  {"config", c.resolved()},
                  {"result", rep}});
  return 0;
}

int cmd_probe_signs(Config& c) {
  const std::uint64_t seed = c.u64("seed");
  const std::string out = prepare_out(c);
  const SymmetricMatrix a = load_symmetric(c.str("matrix"));
  const std::size_t p = c.size("p");
  const std::size_t L = c.size("L");
  const std::size_t runs = c.size("runs");
  std::vector<double> schedule;
  if (c.has("sigma_schedule"))
    schedule = c.num_list("sigma_schedule");
  else
    schedule.assign(L, c.num("noise_sigma"));

  const SignProfile profile = sign_profile(a, p, L, schedule, runs, seed);
  double worst = 0.0;
  for (double f : profile.plus_frequency)
    worst = std::max(worst, std::abs(f - 0.5));
  const json rep{{"runs", profile.runs},
                 {"plus_frequency", profile.plus_frequency},
                 {"max_deviation_from_half", worst}};
  write_json(join(out, "report.json"), rep);
  write_json(join(out, "summary.json"),
             json{{"command", "probe-signs"},
                  {"config", c.resolved()},
                  {"result", rep}});
  return 0;
}

int cmd_probe_incoherence(Config& c) {
  const std::uint64_t seed = c.u64("seed");
  const std::string out = prepare_out(c);
  const SymmetricMatrix a = load_symmetric(c.str("matrix"));
  const std::size_t p = c.size("p");
  const std::size_t L = c.size("L");
  const std::size_t runs = c.size("runs");
  const PrivacyParams priv(c.num("epsilon"), c.num("delta"),
                           Mechanism::gaussian_entry_scaled,
                           Neighborhood::single_entry);

  const IncoherenceReport report =
      incoherence_trace(a, p, L, priv, runs, seed);
  const json rep{{"mu", report.mu},
                 {"threshold", report.threshold},
                 {"overall_max", report.overall_max},
                 {"runs", report.per_run_max.size()},
                 {"runs_over_threshold", report.runs_over_threshold},
                 {"per_run_max", report.per_run_max}};
  write_json(join(out, "report.json"), rep);
  write_json(join(out, "summary.json"),
             json{{"command", "probe-incoherence"},
                  {"config", c.resolved()},
                  {"result", rep}});
  return 0;
}

int cmd_sweep_samples(Config& c) {
  const std::uint64_t seed = c.u64("seed");
  const std::string out = prepare_out(c);
  const std::size_t d = c.size("d");
  const std::vector<double> lambdas = c.num_list("lambdas");
  const double model_sigma = c.num("model_sigma");
  const std::size_t k = c.size("k");
  const std::size_t p = c.size("p");
  const std::size_t L = c.size("L");
  const std::vector<std::size_t> grid = c.size_list("grid");
  const std::size_t seeds = c.size("seeds");
  const std::size_t threads = c.size_or("threads", 1);

  if (grid.size() < 2)
    throw ConfigInvalid("grid needs at least 2 points");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw ConfigInvalid("grid must be strictly ascending");
  if (seeds < 5) throw ConfigInvalid("seeds must be at least 5");
  if (L == 0) throw ConfigInvalid("L must be positive");

  const SpikedCovarianceModel model = SpikedCovarianceModel::create(
      model_basis(d, lambdas.size(), seed), lambdas, model_sigma);
  const SymmetricMatrix cov = model.covariance();
  const SpmTraceContext ctx = SpmTraceContext::make(cov, k);

  // Trials are independent given their sub-seeds; results land in fixed
  // slots, so the curve does not depend on the worker count.
  const std::size_t jobs = grid.size() * seeds;
  std::vector<double> finals(jobs, 0.0);
  std::atomic<std::size_t> next{0};
  std::mutex fail_mutex;
  std::exception_ptr failure;

  const auto worker = [&] {
    try {
      for (std::size_t j = next.fetch_add(1); j < jobs;
           j = next.fetch_add(1)) {
        const std::size_t gi = j / seeds;
        SpikedStream stream(
            model, mix_seed(mix_seed(seed, kStreamSamples),
                            kStreamTrialBase + j));
        SpmConfig cfg;
        cfg.samples = grid[gi];
        cfg.iterations = L;
        cfg.width = p;
        cfg.target_rank = k;
        cfg.seed = mix_seed(seed, kStreamTrialBase + j);
        finals[j] = spm_run(stream, cfg, &ctx).trace.rows.back().residual;
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(fail_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  const std::size_t pool = std::max<std::size_t>(1, std::min(threads, jobs));
  std::vector<std::thread> team;
  for (std::size_t t = 0; t + 1 < pool; ++t) team.emplace_back(worker);
  worker();
  for (std::thread& t : team) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<double> medians;
  std::string csv = "n,median_final_residual\n";
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    std::vector<double> column(finals.begin() + gi * seeds,
                               finals.begin() + (gi + 1) * seeds);
    std::sort(column.begin(), column.end());
    const double med = seeds % 2 ? column[seeds / 2]
                                 : 0.5 * (column[seeds / 2 - 1] +
                                          column[seeds / 2]);
    medians.push_back(med);
    csv += std::to_string(grid[gi]) + "," + format_double(med) + "\n";
  }
  std::ofstream f(join(out, "sweep.csv"), std::ios::binary);
  f << csv;
  if (!f) throw ConfigInvalid("out path is not writable: sweep.csv");

  write_json(join(out, "summary.json"),
             json{{"command", "sweep-samples"},
                  {"config", c.resolved()},
                  {"result", {{"grid", grid}, {"medians", medians}}}});
  return 0;
}

// --- flag plumbing ----------------------------------------------------------

struct FlagVals {
  std::string config_path, matrix, samples, out, noise, mechanism, init, x0;
  std::uint64_t seed = 0;
  std::size_t k = 0, p = 0, L = 0, n = 0, d = 0, rank = 0, trials = 0,
              runs = 0, seeds = 0, threads = 0, id = 1;
  double epsilon = 0.0, delta = 0.0, tau = 0.0, eps_target = 0.0,
         noise_sigma = 0.0, model_sigma = 0.0, eps = 0.0,
         noise_scale_factor = 0.0, c_iter = 0.0, c_conj = 0.0;
  std::vector<double> lambdas, spectrum, sigma_schedule;
  std::vector<std::size_t> grid;
};

bool flag_set(const CLI::App& sub, const std::string& name) {
  for (const CLI::Option* opt : sub.get_options())
    if (opt->check_name(name)) return opt->count() > 0;
  return false;
}

// Flags override config-file fields; only flags actually present merge.
void merge_flags(const CLI::App& sub, const FlagVals& fv, json& cfg) {
  const auto put = [&](const char* flag, const char* key, const auto& val) {
    if (flag_set(sub, flag)) cfg[key] = val;
  };
  put("--matrix", "matrix", fv.matrix);
  put("--samples", "samples", fv.samples);
  put("--out", "out", fv.out);
  put("--seed", "seed", fv.seed);
  put("--k", "k", fv.k);
  put("--p", "p", fv.p);
  put("--L", "L", fv.L);
  put("--n", "n", fv.n);
  put("--d", "d", fv.d);
  put("--rank", "rank", fv.rank);
  put("--noise", "noise", fv.noise);
  put("--init", "init", fv.init);
  put("--x0", "x0", fv.x0);
  put("--noise-sigma", "noise_sigma", fv.noise_sigma);
  put("--epsilon", "epsilon", fv.epsilon);
  put("--delta", "delta", fv.delta);
  put("--tau", "tau", fv.tau);
  put("--eps-target", "eps_target", fv.eps_target);
  put("--mechanism", "mechanism", fv.mechanism);
  put("--lambdas", "lambdas", fv.lambdas);
  put("--model-sigma", "model_sigma", fv.model_sigma);
  put("--id", "id", fv.id);
  put("--trials", "trials", fv.trials);
  put("--spectrum", "spectrum", fv.spectrum);
  put("--eps", "eps", fv.eps);
  put("--noise-scale-factor", "noise_scale_factor", fv.noise_scale_factor);
  put("--c-iter", "c_iter", fv.c_iter);
  put("--c-conj", "c_conj", fv.c_conj);
  put("--threads", "threads", fv.threads);
  put("--runs", "runs", fv.runs);
  put("--sigma-schedule", "sigma_schedule", fv.sigma_schedule);
  put("--grid", "grid", fv.grid);
  put("--seeds", "seeds", fv.seeds);
}

CLI::App* add_command(CLI::App& app, FlagVals& fv, const char* name,
                      const char* desc) {
  CLI::App* s = app.add_subcommand(name, desc);
  s->add_option("--config", fv.config_path,
                "JSON config file; flags override its fields");
  s->add_option("--out", fv.out, "output directory (default .)");
  s->add_option("--seed", fv.seed, "RNG seed; required for every command");
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noisy power method experiment runner"};
  app.require_subcommand(1);
  FlagVals fv;

  CLI::App* npm = add_command(app, fv, "npm",
                              "power method with injected Gaussian or zero "
                              "noise on a matrix file");
  npm->add_option("--matrix", fv.matrix, "symmetric matrix file");
  npm->add_option("--k", fv.k, "target rank for angle tracking");
  npm->add_option("--p", fv.p, "iterate width");
  npm->add_option("--L", fv.L, "iteration count");
  npm->add_option("--noise", fv.noise, "zero | gaussian (default gaussian)");
  npm->add_option("--noise-sigma", fv.noise_sigma,
                  "entrywise noise scale (default 0.1)");
  npm->add_option("--init", fv.init,
                  "start basis: spread (deterministic, default) | random "
                  "(seeded Haar draw)");
  npm->add_option("--x0", fv.x0, "start basis file (overrides --init)");

  CLI::App* spm = add_command(app, fv, "spm",
                              "streaming PCA over a sample file or a spiked "
                              "covariance model");
  spm->add_option("--samples", fv.samples, "sample file, one vector per line");
  spm->add_option("--matrix", fv.matrix,
                  "reference covariance for the trace (default: empirical "
                  "estimate for files, exact model covariance otherwise)");
  spm->add_option("--k", fv.k, "target rank");
  spm->add_option("--p", fv.p, "iterate width");
  spm->add_option("--L", fv.L, "iteration count; block size is n/L");
  spm->add_option("--n", fv.n, "total sample budget");
  spm->add_option("--d", fv.d, "ambient dimension (model mode)");
  spm->add_option("--lambdas", fv.lambdas, "spike strengths (model mode)")
      ->delimiter(',');
  spm->add_option("--model-sigma", fv.model_sigma,
                  "isotropic noise level (model mode)");

  CLI::App* ppm = add_command(app, fv, "ppm",
                              "private power method, entry-scaled Gaussian "
                              "mechanism");
  ppm->add_option("--matrix", fv.matrix, "symmetric matrix file");
  ppm->add_option("--k", fv.k, "target rank");
  ppm->add_option("--p", fv.p, "iterate width");
  ppm->add_option("--L", fv.L, "iteration count (L+1 noisy products)");
  ppm->add_option("--epsilon", fv.epsilon, "privacy budget epsilon");
  ppm->add_option("--delta", fv.delta, "privacy budget delta");

  CLI::App* sppm = add_command(app, fv, "spectral-ppm",
                               "private power method under unit-spectral "
                               "neighborhoods");
  sppm->add_option("--matrix", fv.matrix, "symmetric matrix file");
  sppm->add_option("--k", fv.k, "target rank");
  sppm->add_option("--p", fv.p, "iterate width");
  sppm->add_option("--L", fv.L, "iteration count");
  sppm->add_option("--epsilon", fv.epsilon, "privacy budget epsilon");
  sppm->add_option("--delta", fv.delta,
                   "privacy budget delta (Gaussian mechanism only)");
  sppm->add_option("--mechanism", fv.mechanism,
                   "gaussian | laplacian (default gaussian)");

  CLI::App* lowrank = add_command(app, fv, "lowrank",
                                  "private rank-2k approximation");
  lowrank->add_option("--matrix", fv.matrix, "symmetric matrix file");
  lowrank->add_option("--k", fv.k, "target rank");
  lowrank->add_option("--epsilon", fv.epsilon, "privacy budget epsilon");
  lowrank->add_option("--delta", fv.delta, "privacy budget delta");
  lowrank->add_option("--tau", fv.tau,
                      "start-quality factor for the iteration count "
                      "(default 1)");
  lowrank->add_option("--eps-target", fv.eps_target,
                      "target accuracy for the iteration count "
                      "(default 0.01)");

  CLI::App* coh = add_command(app, fv, "coherence",
                              "coherence of a matrix's eigenbasis");
  coh->add_option("--matrix", fv.matrix, "symmetric matrix file");
  coh->add_option("--rank", fv.rank,
                  "number of leading eigenvectors (default: numerical rank)");

  CLI::App* pconj = add_command(app, fv, "probe-conjecture",
                                "Monte-Carlo probe of the gap-free "
                                "convergence conjectures");
  pconj->add_option("--id", fv.id, "1: subspace recovery, 2: spectral "
                                   "approximation (default 1)");
  pconj->add_option("--trials", fv.trials, "trial count");
  pconj->add_option("--d", fv.d, "dimension (default: spectrum length)");
  pconj->add_option("--k", fv.k, "target rank");
  pconj->add_option("--p", fv.p, "iterate width");
  pconj->add_option("--spectrum", fv.spectrum,
                    "non-increasing singular values, comma separated")
      ->delimiter(',');
  pconj->add_option("--eps", fv.eps, "target accuracy");
  pconj->add_option("--noise-scale-factor", fv.noise_scale_factor,
                    "fraction of the admissible caps to draw at (default 1)");
  pconj->add_option("--c-iter", fv.c_iter,
                    "iteration-count constant (default 2)");
  pconj->add_option("--c-conj", fv.c_conj,
                    "spectral slack constant (default 10)");
  pconj->add_option("--threads", fv.threads, "worker threads (default 1)");

  CLI::App* psign = add_command(app, fv, "probe-signs",
                                "sign-symmetry profile of the noisy "
                                "iteration");
  psign->add_option("--matrix", fv.matrix, "symmetric matrix file");
  psign->add_option("--p", fv.p, "iterate width");
  psign->add_option("--L", fv.L, "iteration count");
  psign->add_option("--runs", fv.runs, "independent runs");
  psign->add_option("--sigma-schedule", fv.sigma_schedule,
                    "per-step noise scales, comma separated (length L)")
      ->delimiter(',');
  psign->add_option("--noise-sigma", fv.noise_sigma,
                    "constant noise scale (alternative to a schedule)");

  CLI::App* pinc = add_command(app, fv, "probe-incoherence",
                               "entry-size profile of private runs");
  pinc->add_option("--matrix", fv.matrix, "symmetric matrix file");
  pinc->add_option("--p", fv.p, "iterate width");
  pinc->add_option("--L", fv.L, "iteration count");
  pinc->add_option("--runs", fv.runs, "independent runs");
  pinc->add_option("--epsilon", fv.epsilon, "privacy budget epsilon");
  pinc->add_option("--delta", fv.delta, "privacy budget delta");

  CLI::App* sweep = add_command(app, fv, "sweep-samples",
                                "median streaming residual across a sample "
                                "budget grid");
  sweep->add_option("--d", fv.d, "ambient dimension");
  sweep->add_option("--lambdas", fv.lambdas, "spike strengths")
      ->delimiter(',');
  sweep->add_option("--model-sigma", fv.model_sigma, "isotropic noise level");
  sweep->add_option("--k", fv.k, "target rank");
  sweep->add_option("--p", fv.p, "iterate width");
  sweep->add_option("--L", fv.L, "iteration count per run");
  sweep->add_option("--grid", fv.grid,
                    "ascending sample budgets, comma separated (>= 2)")
      ->delimiter(',');
  sweep->add_option("--seeds", fv.seeds, "trials per grid point (>= 5)");
  sweep->add_option("--threads", fv.threads, "worker threads (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  CLI::App* sub = app.get_subcommands().front();

  try {
    json merged = json::object();
    if (flag_set(*sub, "--config") && !fv.config_path.empty()) {
      std::ifstream in(fv.config_path);
      if (!in)
        throw ConfigInvalid("config file cannot be opened: " +
                            fv.config_path);
      try {
        merged = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ConfigInvalid(std::string("config file is not valid JSON: ") +
                            e.what());
      }
      if (!merged.is_object())
        throw ConfigInvalid("config file must hold a JSON object");
      if (merged.contains("command") &&
          merged["command"] != sub->get_name())
        throw ConfigInvalid("command in config file does not match '" +
                            sub->get_name() + "'");
      merged.erase("command");
    }
    merge_flags(*sub, fv, merged);
    Config c(std::move(merged), sub->get_name());

    const std::string name = sub->get_name();
    if (name == "npm") return cmd_npm(c);
    if (name == "spm") return cmd_spm(c);
    if (name == "ppm") return cmd_ppm(c);
    if (name == "spectral-ppm") return cmd_spectral_ppm(c);
    if (name == "lowrank") return cmd_lowrank(c);
    if (name == "coherence") return cmd_coherence(c);
    if (name == "probe-conjecture") return cmd_probe_conjecture(c);
    if (name == "probe-signs") return cmd_probe_signs(c);
    if (name == "probe-incoherence") return cmd_probe_incoherence(c);
    if (name == "sweep-samples") return cmd_sweep_samples(c);
    throw ConfigInvalid("unknown command: " + name);
  } catch (const RankDeficient& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const NoConvergence& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
