#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rgg/connection.hpp"

namespace rgg::suites {

/// Random geodesic triangles on the unit 2-sphere, checked against the
/// model-space formulas.
struct GeometryConfig {
  std::size_t triangles = 10000;
  double max_side = 0.7853981633974483;  // pi / 4
  double exact_tol = 1e-9;
  double sandwich_tol = 1e-12;
  std::uint64_t seed = 1;
};

struct GeometryReport {
  std::size_t triangles = 0;
  std::size_t rejected = 0;  // third side at or above max_side
  double max_exact_error = 0.0;
  std::size_t exact_violations = 0;
  std::size_t sandwich_violations = 0;
  std::size_t remainder_checked = 0;  // opposite-side remainder, both signs of curvature
  std::size_t remainder_violations = 0;
  std::size_t angle_checked = 0;  // c <= a / 2 implies theta <= 2c / a
  std::size_t angle_violations = 0;
  std::size_t expansion_checked = 0;  // first-order expansion of the opposite side
  std::size_t expansion_violations = 0;
  double seconds = 0.0;
  bool pass() const {
    return exact_violations == 0 && sandwich_violations == 0 && remainder_violations == 0 &&
           angle_violations == 0 && expansion_violations == 0;
  }
};

GeometryReport geometry_suite(const GeometryConfig& cfg);

/// Edge redraws over fixed latent points on the flat 2-torus.
struct ConcentrationConfig {
  double n_log = 10000.0;  // the n inside log n
  std::uint32_t U = 500;
  std::uint32_t V = 500;
  std::size_t redraws = 1000;
  double q = 1.0;
  std::string connection = "exp:0.1:0.5:0.7071067811865476";
  int kernel_grid = 256;  // quadrature points per side for the kernel table
  std::uint64_t seed = 1;
};

struct ConcentrationReport {
  std::size_t redraws = 0;
  std::size_t fluctuation_violations = 0;  // redraws with some v off by more than fe(U)
  std::size_t common_violations = 0;       // redraws with some pair off by more than log n / sqrt(q^2 |U|)
  double fe = 0.0;
  double cn_bound = 0.0;
  double max_fluctuation = 0.0;
  double max_common = 0.0;
  bool common_precondition = false;  // q^2 |U| >= 25 log n
  double seconds = 0.0;
  double fluctuation_rate() const { return redraws ? double(fluctuation_violations) / redraws : 0.0; }
  double common_rate() const { return redraws ? double(common_violations) / redraws : 0.0; }
};

ConcentrationReport concentration_suite(const ConcentrationConfig& cfg);

/// Kernel table <x, y> on the flat 2-torus as a function of the displacement,
/// from the cyclic autocorrelation of p on a k x k periodic grid.
class TorusKernelTable {
 public:
  TorusKernelTable(const ConnectionFunction& p, int k);
  /// Bilinear interpolation at displacement (dx, dy).
  double operator()(double dx, double dy) const;

 private:
  int k_;
  std::vector<double> table_;  // (k/2 + 1)^2 entries over [0, 1/2]^2
};

/// Monte Carlo kernel gap on the flat 2-torus.
struct KernelGapConfig {
  std::size_t pairs = 100;
  std::size_t samples = 100000;
  std::string connection = "exp:1:0.5:0.7071067811865476";
  double se_multiple = 4.0;
  std::uint64_t seed = 1;
};

struct KernelGapReport {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double c = 0.0;    // mu_min(r_G) ell_p^2 / (2 pi^2)
  double r_G = 0.0;
  double min_slack = 0.0;  // min over pairs of gap - bound + se_multiple * se
  double seconds = 0.0;
};

KernelGapReport kernel_gap_suite(const KernelGapConfig& cfg);

/// GenerateCluster on planted inputs: m points uniform in a disc of radius
/// c_gap eta^2, plus `far` points uniform outside the disc of radius 4 r_G,
/// counted through |U| uniform points. Only U x V edges are drawn.
struct PlantedConfig {
  std::size_t seeds = 50;
  std::uint64_t first_seed = 1;
  std::uint32_t U = 50000;
  std::uint32_t m = 200;
  std::uint32_t far = 200;
  std::string connection = "exp:0.05:0.5:0.7071067811865476";
  double eta = 0.02;
  double c_gap = 11.0;
};

struct PlantedRun {
  std::uint64_t seed = 0;
  double radius = 0.0;
  std::size_t size = 0;
  std::size_t planted_members = 0;
  bool ok = false;
};

struct PlantedReport {
  std::vector<PlantedRun> runs;
  std::size_t successes = 0;
  double r_G = 0.0;
  double seconds = 0.0;
};

PlantedReport planted_cluster_suite(const PlantedConfig& cfg);

}  // namespace rgg::suites
