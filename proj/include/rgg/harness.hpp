#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rgg/assembly.hpp"
#include "rgg/geometry.hpp"
#include "rgg/latent.hpp"
#include "rgg/params.hpp"

namespace rgg::harness {

struct AtomSpec {
  std::vector<double> point;
  double mass = 0.0;
  bool operator==(const AtomSpec&) const = default;
};

struct ExperimentConfig {
  std::string manifold = "torus:2";
  std::vector<AtomSpec> atoms;
  std::string connection = "exp:0.1:0.5:0.7071067811865476";
  std::uint32_t n = 2000;  // total vertex count |V|; truncated to a multiple of 8
  double q = 1.0;
  std::uint64_t seed = 1;
  ParameterConfig params;
  bool reconstruct = true;
  bool evaluate = true;
  bool dump_errors = false;
  bool provenance = false;
  std::string out_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

/// Desk-scale configuration on the flat 2-torus used by the acceptance runs:
/// overridden accessible radius, empirical kernel-gap constant and window
/// relaxation, with the asymptotic preconditions reported as warnings.
ExperimentConfig desk_preset();

std::string to_json(const ExperimentConfig& cfg);
ExperimentConfig from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void save_config(const std::string& path, const ExperimentConfig& cfg);

geometry::ManifoldModel manifold_of(const ExperimentConfig& cfg);
geometry::SamplingMeasure measure_of(const ExperimentConfig& cfg);
/// Dimension, sparsity, connection function, accessible radius and Ahlfors constant.
ModelInputs model_inputs(const ExperimentConfig& cfg);

struct ErrorReport {
  std::uint32_t n = 0;  // |V|
  double q = 1.0;
  std::uint64_t seed = 0;
  std::size_t pairs = 0;
  double max_abs_error = 0.0;
  double mean_abs_error = 0.0;
  double p50 = 0.0, p90 = 0.0, p99 = 0.0;
  double theory_scale = 0.0;     // (log^2 n / (q n))^{1/(d+2)} with n = |V| / 4
  double fitted_constant = 0.0;  // max_abs_error / theory_scale
  std::size_t below_latent = 0;  // estimates under the latent distance
  double t_generate = 0.0, t_stage1 = 0.0, t_paths = 0.0, t_evaluate = 0.0, t_total = 0.0;
  std::size_t failed_runs = 0;
  std::size_t failed_vertices = 0;
  std::size_t infinite_pairs = 0;
};

/// Column order of the report CSV.
std::string report_header();
std::string report_row(const ErrorReport& r);

/// Nearest-rank quantile of ascending-sorted values: element ceil(p N) (1-based).
double nearest_rank(const std::vector<double>& sorted, double p);

double theory_scale(std::uint32_t N, double q, int d);

/// Exhaustive comparison of dm with the latent distances; optional raw dump of
/// |d - latent| in pair order (binary "ERRS" + n, then f64 values for i < j).
ErrorReport evaluate(const assembly::DistanceMatrix& dm, const LatentPositions& latent, double q,
                     const std::string& dump_path = "");

/// Re-reads a raw error dump.
std::vector<double> read_error_dump(const std::string& path, std::uint32_t* n = nullptr);

/// Evaluation from files; refuses when the latent file is missing.
ErrorReport evaluate_files(const std::string& dmat_path, const std::string& latent_path,
                           const geometry::ManifoldModel& m, double q);

struct ExperimentOutcome {
  ErrorReport report;
  int exit_code = 0;  // 0 ok, 2 stage failure
  std::vector<std::string> diagnostics;
};

/// generate -> reconstruct -> evaluate, writing graph.rgg1, latent.csv,
/// distances.dmat, report.csv (and errors.bin, weights.csv on request) into out_dir.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

struct SweepResult {
  std::vector<ErrorReport> reports;
  double error_slope = 0.0;  // least squares slope of log max error vs log n
  double time_slope = 0.0;
  std::vector<int> exit_codes;
};

SweepResult scaling_sweep(const ExperimentConfig& base, const std::vector<std::uint32_t>& ns);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct CalibrationSuite {
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::uint32_t n = 4000;
  std::vector<double> c;         // gap constant grid
  std::vector<double> c_kernel;  // GenerateCluster gap constant grid
  std::vector<double> relax;     // window relaxation grid
  int probes_per_side = 50;
};

struct CalibrationOutcome {
  ParameterConfig selected;
  std::vector<std::string> log;
};

/// Sweeps the grids in ascending order and returns the first configuration for
/// which Stage 1 and Stage 2 oracles pass on every seed. StageFailure with the
/// frontier when nothing passes.
CalibrationOutcome calibrate_constants(const ExperimentConfig& base, const CalibrationSuite& suite);

}  // namespace rgg::harness
