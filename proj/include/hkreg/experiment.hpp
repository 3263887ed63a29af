#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hkreg/inference.hpp"
#include "hkreg/metrics.hpp"

namespace hkreg {

enum class Method { Dbm, Cbm, Ker };

std::string to_string(Method method);
Method parse_method(std::string_view name);

struct FitSettings {
  Method method = Method::Dbm;
  SigmaMode sigma = KnownVariance{0.1};
  double scale = 0.01;
  std::size_t intervals = 40;  // DBM only; CBM uses kFineIntervals
  AnnealConfig anneal{};
};

struct MethodFit {
  Method method = Method::Dbm;
  // MAP path for DBM/CBM; for KER the estimator sampled on the fine grid.
  PiecewiseGeodesicPath path;
  std::optional<FitResult> anneal;
  double bandwidth = 0.0;
  Curve curve;
};

MethodFit fit_method(const Manifold& m, const Dataset& data,
                     const FitSettings& settings, Rng& rng);

/// L1 error of the constant path at the unweighted Frechet mean of the
/// responses.
double constant_baseline_error(const Manifold& m, const Dataset& data,
                               const Curve& truth);

// One ExperimentResult CSV row. knot_tv (knot total variation of the fitted
// path) follows the nine standard columns.
struct ExperimentRow {
  std::string run_id;
  std::string method;
  std::size_t n = 0;
  std::size_t intervals = 0;
  double scale = 0.0;
  double sigma2 = 0.0;
  std::uint64_t seed = 0;
  double l1_error = 0.0;
  double runtime_ms = 0.0;
  double knot_tv = 0.0;
};

std::string experiment_csv_header();
void write_experiment_row(std::ostream& out, const ExperimentRow& row);

enum class SweepAxis { Scale, Intervals, SampleSize };
SweepAxis parse_sweep_axis(std::string_view name);

struct SweepConfig {
  FitSettings fit{};
  std::size_t n = 30;
  double sigma2 = 0.1;  // noise of the generated data
  SweepAxis axis = SweepAxis::Scale;
  std::vector<double> values;
  int replicates = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  bool timing = false;  // runtime_ms stays 0 unless set
};

/// One row per (axis value, replicate), ordered by value then replicate.
/// Replicate r fits data drawn with derive_seed(seed, {r}) so that every axis
/// value sees the same dataset (on the n axis, the same seed draws each
/// requested size); the fit itself uses derive_seed(seed, {value index, r}).
std::vector<ExperimentRow> run_sweep(const Manifold& m, const SweepConfig& cfg);

struct ContractionConfig {
  std::vector<std::size_t> n_values;
  double epsilon = 0.05;
  int replicates = 5;
  double sigma2 = 0.1;
  double scale = 1.0;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  int iterations = 40000;
  int burn_in = 10000;
  int thinning = 100;
  // Knot proposal time; <= 0 selects min(0.05, sigma2 K / n), the rough
  // posterior variance of a knot.
  double proposal_time = 0.0;
  QuadratureGrid grid{256};
};

struct ContractionPoint {
  std::size_t n = 0;
  std::size_t intervals = 0;
  std::vector<double> replicate_errors;  // posterior-mean d_1 per replicate
  double mean_error = 0.0;
  double mean_acceptance = 0.0;
};

struct ContractionReport {
  std::vector<ContractionPoint> points;
  double slope = 0.0;  // least-squares slope of log mean_error vs log n
};

ContractionReport run_contraction(const Manifold& m, const ContractionConfig& cfg);

double least_squares_slope(std::span<const double> x, std::span<const double> y);

}  // namespace hkreg
