#include "hkreg/experiment.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "hkreg/error.hpp"
#include "hkreg/io.hpp"
#include "hkreg/kernel_regression.hpp"
#include "hkreg/parallel.hpp"

namespace hkreg {

std::string to_string(Method method) {
  switch (method) {
    case Method::Dbm: return "dbm";
    case Method::Cbm: return "cbm";
    case Method::Ker: return "ker";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "dbm") return Method::Dbm;
  if (name == "cbm") return Method::Cbm;
  if (name == "ker") return Method::Ker;
  throw Error(ErrorCode::InvalidArgument,
              "unknown method '" + std::string(name) + "'");
}

MethodFit fit_method(const Manifold& m, const Dataset& data,
                     const FitSettings& settings, Rng& rng) {
  if (data.empty()) throw Error(ErrorCode::EmptyDataset, "nothing to fit");
  switch (settings.method) {
    case Method::Dbm:
    case Method::Cbm: {
      auto fit = settings.method == Method::Dbm
                     ? anneal_map(data, settings.sigma,
                                  PriorSpec{settings.intervals, settings.scale},
                                  settings.anneal, m, rng)
                     : fit_cbm(data, settings.sigma, settings.scale,
                               settings.anneal, m, rng);
      MethodFit out{settings.method, fit.path, fit, 0.0, as_curve(m, fit.path)};
      return out;
    }
    case Method::Ker: {
      auto ker = KernelFit::with_rule_bandwidth(m, data);
      std::vector<ManifoldPoint> knots;
      knots.reserve(kFineIntervals + 1);
      for (std::size_t k = 0; k <= kFineIntervals; ++k) {
        knots.push_back(ker(static_cast<double>(k) / kFineIntervals));
      }
      MethodFit out{Method::Ker,
                    PiecewiseGeodesicPath(m.kind(), std::move(knots)),
                    std::nullopt, ker.bandwidth(),
                    [ker](double t) { return ker(t); }};
      return out;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method");
}

double constant_baseline_error(const Manifold& m, const Dataset& data,
                               const Curve& truth) {
  std::vector<ManifoldPoint> points;
  for (const auto& obs : data.observations) points.push_back(obs.x);
  const std::vector<double> weights(points.size(), 1.0);
  const auto center = frechet_mean_weighted(m, points, weights);
  return l1_error(m, [center](double) { return center; }, truth);
}

std::string experiment_csv_header() {
  return "run_id,method,n,K,c,sigma2,seed,l1_error,runtime_ms,knot_tv";
}

void write_experiment_row(std::ostream& out, const ExperimentRow& row) {
  out << row.run_id << ',' << row.method << ',' << row.n << ','
      << row.intervals << ',' << format_double(row.scale) << ','
      << format_double(row.sigma2) << ',' << row.seed << ','
      << format_double(row.l1_error) << ',' << format_double(row.runtime_ms)
      << ',' << format_double(row.knot_tv) << '\n';
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "c") return SweepAxis::Scale;
  if (name == "K") return SweepAxis::Intervals;
  if (name == "n") return SweepAxis::SampleSize;
  throw Error(ErrorCode::InvalidArgument,
              "unknown sweep axis '" + std::string(name) + "'");
}

namespace {

std::size_t as_count(double v, const char* what) {
  if (!(v >= 1.0) || v != std::floor(v)) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + " values must be positive integers");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<ExperimentRow> run_sweep(const Manifold& m, const SweepConfig& cfg) {
  if (cfg.values.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "a sweep needs at least two values");
  }
  if (cfg.replicates < 1) {
    throw Error(ErrorCode::InvalidArgument, "replicates must be >= 1");
  }
  for (double v : cfg.values) {
    if (cfg.axis == SweepAxis::Scale && !(v > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "c values must be positive");
    }
    if (cfg.axis == SweepAxis::Intervals) as_count(v, "K");
    if (cfg.axis == SweepAxis::SampleSize) as_count(v, "n");
  }
  const auto truth = benchmark_truth(m);
  const auto reps = static_cast<std::size_t>(cfg.replicates);
  std::vector<ExperimentRow> rows(cfg.values.size() * reps);
  parallel_for(rows.size(), cfg.threads, [&](std::size_t cell) {
    const std::size_t vi = cell / reps;
    const std::size_t rep = cell % reps;
    FitSettings settings = cfg.fit;
    std::size_t n = cfg.n;
    switch (cfg.axis) {
      case SweepAxis::Scale: settings.scale = cfg.values[vi]; break;
      case SweepAxis::Intervals:
        settings.intervals = as_count(cfg.values[vi], "K");
        break;
      case SweepAxis::SampleSize: n = as_count(cfg.values[vi], "n"); break;
    }
    Rng data_rng(derive_seed(cfg.seed, {rep}));
    const auto data = generate_dataset(m, truth, n, cfg.sigma2,
                                       PredictorDensity::uniform(), data_rng);
    const std::uint64_t fit_seed = derive_seed(cfg.seed, {vi, rep});
    Rng rng(fit_seed);
    const auto start = std::chrono::steady_clock::now();
    const auto fit = fit_method(m, data, settings, rng);
    const auto stop = std::chrono::steady_clock::now();
    ExperimentRow row;
    row.run_id = "v" + std::to_string(vi) + "-r" + std::to_string(rep);
    row.method = to_string(settings.method);
    row.n = n;
    row.intervals = fit.path.intervals();
    row.scale = settings.scale;
    row.sigma2 = cfg.sigma2;
    row.seed = fit_seed;
    row.l1_error = l1_error(m, fit.curve, truth);
    row.runtime_ms =
        cfg.timing
            ? std::chrono::duration<double, std::milli>(stop - start).count()
            : 0.0;
    row.knot_tv = knot_total_variation(m, fit.path);
    rows[cell] = std::move(row);
  });
  return rows;
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "slope needs >= 2 paired values");
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) {
    throw Error(ErrorCode::InvalidArgument, "slope needs distinct x values");
  }
  return sxy / sxx;
}

ContractionReport run_contraction(const Manifold& m, const ContractionConfig& cfg) {
  if (cfg.n_values.size() < 3) {
    throw Error(ErrorCode::InvalidArgument,
                "the rate check needs at least three sample sizes");
  }
  if (cfg.replicates < 1) {
    throw Error(ErrorCode::InvalidArgument, "replicates must be >= 1");
  }
  const auto truth = benchmark_truth(m);
  const auto reps = static_cast<std::size_t>(cfg.replicates);
  const std::size_t cells = cfg.n_values.size() * reps;
  std::vector<double> errors(cells);
  std::vector<double> acceptance(cells);
  parallel_for(cells, cfg.threads, [&](std::size_t cell) {
    const std::size_t ni = cell / reps;
    const std::size_t rep = cell % reps;
    const std::size_t n = cfg.n_values[ni];
    const auto rate = theorem_rate_sidelength(n, cfg.epsilon);
    Rng rng(derive_seed(cfg.seed, {ni, rep}));
    const auto data = generate_dataset(m, truth, n, cfg.sigma2,
                                       PredictorDensity::uniform(), rng);
    McmcConfig mcmc{cfg.iterations, cfg.burn_in, cfg.thinning, cfg.proposal_time};
    if (!(mcmc.proposal_time > 0.0)) {
      mcmc.proposal_time = std::min(
          0.05, cfg.sigma2 * static_cast<double>(rate.intervals) / static_cast<double>(n));
    }
    const auto run = mh_sample(data, KnownVariance{cfg.sigma2},
                               PriorSpec{rate.intervals, cfg.scale}, mcmc, m, rng);
    if (run.samples.empty()) {
      throw Error(ErrorCode::NoConvergence, "sampler returned no states");
    }
    double total = 0.0;
    for (const auto& s : run.samples) {
      total += l1_error(m, as_curve(m, s), truth, cfg.grid);
    }
    errors[cell] = total / static_cast<double>(run.samples.size());
    acceptance[cell] = run.acceptance_rate;
  });

  ContractionReport report;
  std::vector<double> log_n;
  std::vector<double> log_err;
  for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
    ContractionPoint point;
    point.n = cfg.n_values[ni];
    point.intervals = theorem_rate_sidelength(point.n, cfg.epsilon).intervals;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      point.replicate_errors.push_back(errors[ni * reps + rep]);
      point.mean_error += errors[ni * reps + rep];
      point.mean_acceptance += acceptance[ni * reps + rep];
    }
    point.mean_error /= static_cast<double>(reps);
    point.mean_acceptance /= static_cast<double>(reps);
    if (!(point.mean_error > 0.0) || !std::isfinite(point.mean_error)) {
      throw Error(ErrorCode::NoConvergence,
                  "posterior error is not a positive finite number");
    }
    log_n.push_back(std::log(static_cast<double>(point.n)));
    log_err.push_back(std::log(point.mean_error));
    report.points.push_back(std::move(point));
  }
  report.slope = least_squares_slope(log_n, log_err);
  return report;
}

}  // namespace hkreg
