#include "hkreg/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hkreg/checks.hpp"
#include "hkreg/error.hpp"
#include "hkreg/experiment.hpp"
#include "hkreg/io.hpp"

namespace hkreg::cli {

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every flag of every subcommand. Unset optionals take a per-command default.
struct RunConfig {
  std::string manifold = "circle";
  std::string method = "dbm";
  std::optional<long long> n;
  double sigma2 = 0.1;
  std::optional<double> marginal_A;
  std::optional<double> c;
  std::optional<long long> grid_K;
  std::optional<double> rate_epsilon;
  std::uint64_t seed = 1;
  std::optional<int> replicates;
  std::string out;
  std::optional<double> anneal_t0;
  std::optional<double> anneal_cool;
  std::optional<int> anneal_steps;
  std::optional<double> anneal_floor;
  std::optional<double> proposal_time;
  std::string data;
  std::string results = "results.csv";
  std::string run_id;
  std::string axis;
  std::vector<double> values;
  std::vector<long long> n_values;
  std::optional<int> mcmc_iterations;
  std::optional<int> mcmc_burn_in;
  std::optional<int> mcmc_thinning;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  bool timing = false;
  double kernel_offset = 0.0;
};

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  using Setter = std::function<void(const nlohmann::json&)>;
  const std::map<std::string, Setter> setters = {
      {"manifold", [&](const auto& v) { cfg.manifold = v.template get<std::string>(); }},
      {"method", [&](const auto& v) { cfg.method = v.template get<std::string>(); }},
      {"n", [&](const auto& v) { cfg.n = v.template get<long long>(); }},
      {"sigma2", [&](const auto& v) { cfg.sigma2 = v.template get<double>(); }},
      {"marginal-A", [&](const auto& v) { cfg.marginal_A = v.template get<double>(); }},
      {"c", [&](const auto& v) { cfg.c = v.template get<double>(); }},
      {"grid-K", [&](const auto& v) { cfg.grid_K = v.template get<long long>(); }},
      {"rate-epsilon", [&](const auto& v) { cfg.rate_epsilon = v.template get<double>(); }},
      {"seed", [&](const auto& v) { cfg.seed = v.template get<std::uint64_t>(); }},
      {"replicates", [&](const auto& v) { cfg.replicates = v.template get<int>(); }},
      {"out", [&](const auto& v) { cfg.out = v.template get<std::string>(); }},
      {"anneal-t0", [&](const auto& v) { cfg.anneal_t0 = v.template get<double>(); }},
      {"anneal-cool", [&](const auto& v) { cfg.anneal_cool = v.template get<double>(); }},
      {"anneal-steps", [&](const auto& v) { cfg.anneal_steps = v.template get<int>(); }},
      {"anneal-floor", [&](const auto& v) { cfg.anneal_floor = v.template get<double>(); }},
      {"proposal-time", [&](const auto& v) { cfg.proposal_time = v.template get<double>(); }},
      {"data", [&](const auto& v) { cfg.data = v.template get<std::string>(); }},
      {"results", [&](const auto& v) { cfg.results = v.template get<std::string>(); }},
      {"run-id", [&](const auto& v) { cfg.run_id = v.template get<std::string>(); }},
      {"axis", [&](const auto& v) { cfg.axis = v.template get<std::string>(); }},
      {"values", [&](const auto& v) { cfg.values = v.template get<std::vector<double>>(); }},
      {"n-values", [&](const auto& v) { cfg.n_values = v.template get<std::vector<long long>>(); }},
      {"mcmc-iterations", [&](const auto& v) { cfg.mcmc_iterations = v.template get<int>(); }},
      {"mcmc-burn-in", [&](const auto& v) { cfg.mcmc_burn_in = v.template get<int>(); }},
      {"mcmc-thinning", [&](const auto& v) { cfg.mcmc_thinning = v.template get<int>(); }},
      {"threads", [&](const auto& v) { cfg.threads = v.template get<std::size_t>(); }},
      {"timing", [&](const auto& v) { cfg.timing = v.template get<bool>(); }},
  };
  for (const auto& [key, value] : j.items()) {
    const auto it = setters.find(normalize_key(key));
    if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
    try {
      it->second(value);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
}

std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--config", "JSON file supplying any flag; flags override it");
  sub->add_option("--manifold", cfg.manifold, "circle | sphere | torus")
      ->check(CLI::IsMember({"circle", "sphere", "torus"}));
  sub->add_option("--n", cfg.n, "number of observations");
  sub->add_option("--sigma2", cfg.sigma2, "noise variance (heat-kernel time)");
  sub->add_option("--seed", cfg.seed, "base random seed");
  sub->add_option("--out", cfg.out, "output file");
  sub->add_option("--threads", cfg.threads, "worker threads");
}

void add_fit_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--method", cfg.method, "dbm | cbm | ker")
      ->check(CLI::IsMember({"dbm", "cbm", "ker"}));
  sub->add_option("--marginal-A", cfg.marginal_A,
                  "marginalize sigma^2 over uniform [1/A, A]");
  sub->add_option("--c", cfg.c, "Brownian-motion time scale of the prior");
  sub->add_option("--grid-K", cfg.grid_K, "number of geodesic pieces (DBM)");
  sub->add_option("--rate-epsilon", cfg.rate_epsilon,
                  "choose K = round(n^(1/2 - 2 eps)) instead of --grid-K");
  sub->add_option("--anneal-t0", cfg.anneal_t0, "initial temperature");
  sub->add_option("--anneal-cool", cfg.anneal_cool, "cooling factor");
  sub->add_option("--anneal-steps", cfg.anneal_steps, "steps per temperature");
  sub->add_option("--anneal-floor", cfg.anneal_floor, "final temperature");
  sub->add_option("--proposal-time", cfg.proposal_time,
                  "heat-kernel time of knot proposals");
}

double positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string(what) + " must be positive");
  }
  return v;
}

Manifold manifold_of(const RunConfig& cfg) {
  try {
    return Manifold::of_kind(parse_manifold_kind(cfg.manifold));
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

SigmaMode sigma_of(const RunConfig& cfg) {
  if (cfg.marginal_A) {
    if (!(*cfg.marginal_A > 1.0)) throw ConfigError("--marginal-A must exceed 1");
    return MarginalVariance{*cfg.marginal_A, 16};
  }
  return KnownVariance{positive(cfg.sigma2, "--sigma2")};
}

AnnealConfig anneal_of(const RunConfig& cfg) {
  AnnealConfig a;
  if (cfg.anneal_t0) a.initial_temperature = *cfg.anneal_t0;
  if (cfg.anneal_cool) a.cooling_factor = *cfg.anneal_cool;
  if (cfg.anneal_steps) a.steps_per_temperature = *cfg.anneal_steps;
  if (cfg.anneal_floor) a.temperature_floor = *cfg.anneal_floor;
  if (cfg.proposal_time) a.proposal_time = *cfg.proposal_time;
  try {
    a.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return a;
}

std::size_t sample_size(const RunConfig& cfg) {
  const long long n = cfg.n.value_or(30);
  if (n < 1) throw ConfigError("--n must be at least 1");
  return static_cast<std::size_t>(n);
}

FitSettings fit_settings(const RunConfig& cfg, std::size_t n) {
  FitSettings s;
  try {
    s.method = parse_method(cfg.method);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  s.sigma = sigma_of(cfg);
  s.scale = positive(cfg.c.value_or(0.01), "--c");
  if (cfg.grid_K && cfg.rate_epsilon) {
    throw ConfigError("--grid-K and --rate-epsilon are mutually exclusive");
  }
  if (cfg.grid_K) {
    if (*cfg.grid_K < 1) throw ConfigError("--grid-K must be at least 1");
    s.intervals = static_cast<std::size_t>(*cfg.grid_K);
  } else if (cfg.rate_epsilon) {
    try {
      s.intervals = theorem_rate_sidelength(n, *cfg.rate_epsilon).intervals;
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  s.anneal = anneal_of(cfg);
  return s;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::Io, "cannot write " + path);
  file << text;
  if (!file) throw Error(ErrorCode::Io, "failed writing " + path);
}

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  const auto m = manifold_of(cfg);
  const std::size_t n = sample_size(cfg);
  const double sigma2 = positive(cfg.sigma2, "--sigma2");
  const std::string path = cfg.out.empty() ? "dataset.csv" : cfg.out;
  Rng rng(cfg.seed);
  const auto data = generate_dataset(m, benchmark_truth(m), n, sigma2,
                                     PredictorDensity::uniform(), rng);
  save_dataset(path, m, data);
  out << "generated " << n << " observations on the " << m.name()
      << " (sigma2=" << format_double(sigma2) << ", seed=" << cfg.seed
      << ") -> " << path << '\n';
  return kOk;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  const auto m = manifold_of(cfg);
  if (cfg.data.empty()) throw ConfigError("fit needs --data");
  if (!std::filesystem::exists(cfg.data)) {
    throw ConfigError("dataset not found: " + cfg.data);
  }
  Dataset data;
  try {
    data = load_dataset(cfg.data, m);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (data.size() < 2) throw ConfigError("dataset needs at least two rows");
  const auto settings = fit_settings(cfg, data.size());
  const auto truth = benchmark_truth(m);

  Rng rng(cfg.seed);
  const auto start = std::chrono::steady_clock::now();
  const auto fit = fit_method(m, data, settings, rng);
  const auto stop = std::chrono::steady_clock::now();

  nlohmann::json doc;
  if (fit.anneal) {
    doc = fit_to_json(m, *fit.anneal);
  } else {
    doc = {{"path", path_to_json(m, fit.path)}, {"bandwidth", fit.bandwidth}};
  }
  doc["method"] = to_string(fit.method);

  ExperimentRow row;
  row.run_id = cfg.run_id.empty() ? "fit-" + std::to_string(cfg.seed) : cfg.run_id;
  row.method = to_string(fit.method);
  row.n = data.size();
  row.intervals = fit.path.intervals();
  row.scale = settings.scale;
  row.sigma2 = std::holds_alternative<KnownVariance>(settings.sigma)
                   ? std::get<KnownVariance>(settings.sigma).sigma2
                   : 0.0;
  row.seed = cfg.seed;
  row.l1_error = l1_error(m, fit.curve, truth);
  row.runtime_ms =
      cfg.timing ? std::chrono::duration<double, std::milli>(stop - start).count()
                 : 0.0;
  row.knot_tv = knot_total_variation(m, fit.path);
  doc["l1_error"] = row.l1_error;

  write_text(cfg.out.empty() ? "fit.json" : cfg.out, doc.dump(2) + "\n");
  const bool fresh = !std::filesystem::exists(cfg.results) ||
                     std::filesystem::file_size(cfg.results) == 0;
  std::ofstream results(cfg.results, std::ios::binary | std::ios::app);
  if (!results) throw Error(ErrorCode::Io, "cannot append to " + cfg.results);
  if (fresh) results << experiment_csv_header() << '\n';
  write_experiment_row(results, row);

  out << "method=" << row.method << " K=" << row.intervals
      << " c=" << format_double(row.scale);
  if (fit.method == Method::Ker) out << " bandwidth=" << format_double(fit.bandwidth);
  if (fit.anneal) {
    out << " best_log_posterior=" << format_double(fit.anneal->best_log_posterior);
  }
  out << " l1_error=" << format_double(row.l1_error) << '\n';
  return kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const auto m = manifold_of(cfg);
  SweepConfig sweep;
  try {
    sweep.axis = parse_sweep_axis(cfg.axis);
  } catch (const Error& e) {
    throw ConfigError(std::string(e.what()) + " (use c, K or n)");
  }
  if (cfg.values.size() < 2) throw ConfigError("a sweep needs at least two --values");
  sweep.n = sample_size(cfg);
  sweep.fit = fit_settings(cfg, sweep.n);
  sweep.sigma2 = positive(cfg.sigma2, "--sigma2");
  sweep.values = cfg.values;
  sweep.replicates = cfg.replicates.value_or(1);
  if (sweep.replicates < 1) throw ConfigError("--replicates must be at least 1");
  sweep.seed = cfg.seed;
  sweep.threads = cfg.threads;
  sweep.timing = cfg.timing;
  std::vector<ExperimentRow> rows;
  try {
    rows = run_sweep(m, sweep);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) throw ConfigError(e.what());
    throw;
  }

  std::ostringstream csv;
  csv << experiment_csv_header() << '\n';
  for (const auto& row : rows) write_experiment_row(csv, row);
  const std::string path = cfg.out.empty() ? "sweep.csv" : cfg.out;
  write_text(path, csv.str());

  const auto reps = static_cast<std::size_t>(sweep.replicates);
  for (std::size_t vi = 0; vi < sweep.values.size(); ++vi) {
    double l1 = 0.0;
    double tv = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      l1 += rows[vi * reps + r].l1_error;
      tv += rows[vi * reps + r].knot_tv;
    }
    out << cfg.axis << '=' << format_double(sweep.values[vi])
        << " mean_l1_error=" << format_double(l1 / reps)
        << " mean_knot_tv=" << format_double(tv / reps) << '\n';
  }
  out << "wrote " << rows.size() << " rows -> " << path << '\n';
  return kOk;
}

int cmd_contract(const RunConfig& cfg, std::ostream& out) {
  const auto m = manifold_of(cfg);
  if (cfg.grid_K) throw ConfigError("contract sets K by the rate rule; drop --grid-K");
  if (cfg.n_values.size() < 3) throw ConfigError("contract needs at least three --n-values");
  ContractionConfig cc;
  for (long long n : cfg.n_values) {
    if (n < 2) throw ConfigError("--n-values must be at least 2");
    cc.n_values.push_back(static_cast<std::size_t>(n));
  }
  cc.epsilon = cfg.rate_epsilon.value_or(0.05);
  if (!(cc.epsilon > 0.0 && cc.epsilon < 0.25)) {
    throw ConfigError("--rate-epsilon must lie in (0, 1/4)");
  }
  cc.replicates = cfg.replicates.value_or(5);
  if (cc.replicates < 1) throw ConfigError("--replicates must be at least 1");
  cc.sigma2 = positive(cfg.sigma2, "--sigma2");
  cc.scale = positive(cfg.c.value_or(1.0), "--c");
  cc.seed = cfg.seed;
  cc.threads = cfg.threads;
  if (cfg.mcmc_iterations) cc.iterations = *cfg.mcmc_iterations;
  if (cfg.mcmc_burn_in) cc.burn_in = *cfg.mcmc_burn_in;
  if (cfg.mcmc_thinning) cc.thinning = *cfg.mcmc_thinning;
  if (cfg.proposal_time) cc.proposal_time = positive(*cfg.proposal_time, "--proposal-time");
  try {
    McmcConfig{cc.iterations, cc.burn_in, cc.thinning, 1.0}.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }

  const auto report = run_contraction(m, cc);
  std::ostringstream csv;
  csv << "n,K,replicate,posterior_mean_d1\n";
  for (const auto& p : report.points) {
    for (std::size_t r = 0; r < p.replicate_errors.size(); ++r) {
      csv << p.n << ',' << p.intervals << ',' << r << ','
          << format_double(p.replicate_errors[r]) << '\n';
    }
  }
  const std::string path = cfg.out.empty() ? "contract.csv" : cfg.out;
  write_text(path, csv.str());
  for (const auto& p : report.points) {
    out << "n=" << p.n << " K=" << p.intervals
        << " mean_d1=" << format_double(p.mean_error)
        << " acceptance=" << format_double(p.mean_acceptance) << '\n';
  }
  out << "slope=" << format_double(report.slope) << '\n';
  return kOk;
}

int cmd_check_kernels(const RunConfig& cfg, std::ostream& out) {
  const auto results = run_kernel_checks({cfg.kernel_offset});
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": "
        << format_double(r.value) << " (limit " << format_double(r.threshold)
        << ")\n";
    all = all && r.passed;
  }
  out << (all ? "all kernel checks passed" : "kernel checks FAILED") << '\n';
  return all ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Heat-kernel regression on compact manifolds"};
  app.require_subcommand(1);

  auto* generate = app.add_subcommand("generate", "draw a synthetic dataset");
  add_common(generate, cfg);

  auto* fit = app.add_subcommand("fit", "fit DBM, CBM or KER to a dataset");
  add_common(fit, cfg);
  add_fit_options(fit, cfg);
  fit->add_option("--data", cfg.data, "dataset CSV");
  fit->add_option("--results", cfg.results, "experiment CSV to append to");
  fit->add_option("--run-id", cfg.run_id, "run identifier for the results row");
  fit->add_flag("--timing", cfg.timing, "record wall-clock runtime_ms");

  auto* sweep = app.add_subcommand("sweep", "sweep c, K or n over replicates");
  add_common(sweep, cfg);
  add_fit_options(sweep, cfg);
  sweep->add_option("--axis", cfg.axis, "c | K | n");
  sweep->add_option("--values", cfg.values, "axis values")->delimiter(',');
  sweep->add_option("--replicates", cfg.replicates, "replicates per value");
  sweep->add_flag("--timing", cfg.timing, "record wall-clock runtime_ms");

  auto* contract = app.add_subcommand("contract", "empirical posterior contraction rate");
  add_common(contract, cfg);
  contract->add_option("--n-values", cfg.n_values, "sample sizes")->delimiter(',');
  contract->add_option("--rate-epsilon", cfg.rate_epsilon, "epsilon of the rate rule");
  contract->add_option("--c", cfg.c, "prior time scale (default 1)");
  contract->add_option("--grid-K", cfg.grid_K, "rejected: K follows the rate rule")
      ->group("");
  contract->add_option("--replicates", cfg.replicates, "replicates per n");
  contract->add_option("--mcmc-iterations", cfg.mcmc_iterations, "chain length");
  contract->add_option("--mcmc-burn-in", cfg.mcmc_burn_in, "discarded prefix");
  contract->add_option("--mcmc-thinning", cfg.mcmc_thinning, "keep every k-th state");
  contract->add_option("--proposal-time", cfg.proposal_time, "knot proposal time");

  auto* check = app.add_subcommand("check-kernels", "verify heat-kernel identities");
  check->add_option("--inject-kernel-offset", cfg.kernel_offset,
                    "test hook: add a constant to every kernel value")
      ->group("");

  try {
    if (const auto path = find_config_path(args)) {
      std::ifstream file(*path);
      if (!file) throw ConfigError("cannot read config file " + *path);
      nlohmann::json j;
      try {
        file >> j;
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + *path + ": " + e.what());
      }
      apply_json(cfg, j);
    }
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (*generate) return cmd_generate(cfg, out);
    if (*fit) return cmd_fit(cfg, out);
    if (*sweep) return cmd_sweep(cfg, out);
    if (*contract) return cmd_contract(cfg, out);
    if (*check) return cmd_check_kernels(cfg, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kConfigError;
}

}  // namespace hkreg::cli
