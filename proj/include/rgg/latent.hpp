#pragma once

#ifdef RGG_RECONSTRUCTION_ONLY
#error "latent positions are evaluation-only and must not be included by reconstruction code"
#endif

#include <cstdint>
#include <string>
#include <vector>

#include "rgg/connection.hpp"
#include "rgg/geometry.hpp"
#include "rgg/graph.hpp"

namespace rgg {

/// Sealed side channel: the sampled latent point of every vertex.
class LatentPositions {
 public:
  LatentPositions() = default;
  LatentPositions(geometry::ManifoldModel model, std::vector<geometry::Point> points);

  const geometry::ManifoldModel& model() const { return model_; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(n_); }
  int coord_dim() const { return k_; }
  const double* coords(std::uint32_t i) const { return data_.data() + static_cast<std::size_t>(i) * k_; }
  geometry::Point point(std::uint32_t i) const;
  double distance(std::uint32_t i, std::uint32_t j) const;
  /// Distance from vertex i to an arbitrary point.
  double distance_to(std::uint32_t i, const geometry::Point& x) const;

 private:
  geometry::ManifoldModel model_;
  std::size_t n_ = 0;
  int k_ = 0;
  std::vector<double> data_;
};

struct GeneratedGraph {
  Graph graph;
  LatentPositions latent;
};

/// Samples latent points from mu with streams (seed, point, i), then draws
/// edges with the pair-keyed uniforms of seed.
GeneratedGraph generate_graph(const geometry::ManifoldModel& m, const geometry::SamplingMeasure& mu,
                              const ConnectionFunction& p, double q, std::uint32_t n,
                              std::uint64_t seed);

std::vector<geometry::Point> sample_latent(const geometry::ManifoldModel& m,
                                           const geometry::SamplingMeasure& mu, std::uint32_t n,
                                           std::uint64_t seed);

/// Edge set for fixed latent points under the pair-keyed uniforms of edge_seed.
Graph graph_from_latent(const LatentPositions& latent, const ConnectionFunction& p, double q,
                        std::uint64_t edge_seed);

/// True when U_ij < q p(d_2(i, j)) on the bump torus, using the chord bound
/// and calling the lattice oracle only when the draw falls between the bounds.
bool bump_edge(const geometry::ManifoldModel& m, const double* xi, const double* xj,
               const ConnectionFunction& p, double q, double u, double* d_out = nullptr);
/// bump_edge with the chord length of (xi, xj) already computed.
bool bump_edge_with_chord(const geometry::ManifoldModel& m, const double* xi, const double* xj,
                          const ConnectionFunction& p, double q, double u, double chord,
                          double* d_out = nullptr);

void write_latent_csv(const std::string& path, const LatentPositions& latent);
LatentPositions read_latent_csv(const std::string& path, const geometry::ManifoldModel& m);

struct KernelEstimate {
  double xy = 0.0;        // <x,y>
  double xx = 0.0;        // <x,x>
  double yy = 0.0;        // <y,y>
  double gap = 0.0;       // (1/2) E[(p(d(x,Z)) - p(d(y,Z)))^2]
  double se_xy = 0.0;
  double se_gap = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo estimate of E_Z[p(d(x,Z)) p(d(y,Z))] and the related terms.
KernelEstimate kernel_estimate(const geometry::ManifoldModel& m, const geometry::SamplingMeasure& mu,
                               const ConnectionFunction& p, const geometry::Point& x,
                               const geometry::Point& y, std::size_t samples, std::uint64_t seed);

}  // namespace rgg
