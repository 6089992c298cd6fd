#pragma once

#include <cstdint>
#include <optional>

#include "rgg/connection.hpp"
#include "rgg/graph.hpp"

namespace rgg::clustering {

struct ClusterPair {
  VertexSet members;  // sorted
  Vertex center = 0;
};

/// Returns the cluster of pairs of V whose common-neighbour count through U
/// is within c_gap * eta^2 / 2 of the maximum.
ClusterPair generate_cluster(const Graph& g, const VertexSet& U, const VertexSet& V, double eta,
                             double c_gap);

/// Same selection on a precomputed matrix over V.
ClusterPair generate_cluster(const CommonNeighborMatrix& M, const VertexSet& V, double eta,
                             double c_gap);

struct CalibrationResult {
  std::optional<double> estimate;  // empty means FAR
  double margin = 0.0;             // 2 eta
  bool far() const { return !estimate.has_value(); }
};

/// Single-cluster calibration from a normalized count N = N_U(w).
CalibrationResult calibrate_count(double N, double fe_U, double eta, double r_G,
                                  const ConnectionFunction& p);

/// Computes N_U(w) from the graph, with fe(U) = log n / sqrt(q |U|).
CalibrationResult calibrate_distance(const Graph& g, const VertexSet& U, Vertex w, double eta,
                                     double r_G, double n_log, const ConnectionFunction& p);

enum class Annulus { InsideBand, Below, Above, Inconclusive };

/// Classifies N = N_U(w) against the band |d - r| <= alpha.
/// InsideBand: p(r + alpha) <= N <= p(r - alpha), so r - alpha - 2eta <= d <= r + alpha + 2eta.
/// Below: N < p(r + alpha), so d >= r + alpha - 2eta.
/// Above: N > p(r - alpha), so d <= r - alpha + 2eta.
/// Inconclusive: p is flat across the band and N differs from its value there.
Annulus annulus_count(double N, double fe_U, double r, double alpha, double eta,
                      const ConnectionFunction& p);

Annulus annulus_test(const Graph& g, const VertexSet& U, Vertex w, double r, double alpha,
                     double eta, double n_log, const ConnectionFunction& p);

}  // namespace rgg::clustering
