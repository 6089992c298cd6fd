#include "rgg/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rgg/errors.hpp"

namespace rgg::clustering {

ClusterPair generate_cluster(const CommonNeighborMatrix& M, const VertexSet& V, double eta,
                             double c_gap) {
  const std::size_t k = V.size();
  if (k < 2) throw InvalidInput("generate_cluster needs |V| >= 2");
  if (M.size() != k) throw InvalidInput("matrix does not match V");
  std::uint32_t top = 0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) top = std::max(top, M.count(a, b));
  // Kept iff value >= max - c_gap eta^2 / 2, compared in integer counts.
  const double slack = 0.5 * c_gap * eta * eta / M.scale();
  const double floor_d = static_cast<double>(top) - slack;
  const std::uint32_t floor_c =
      floor_d <= 0.0 ? 0u : static_cast<std::uint32_t>(std::ceil(floor_d - 1e-9));
  std::vector<std::uint32_t> deg(k, 0);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b)
      if (M.count(a, b) >= floor_c) {
        ++deg[a];
        ++deg[b];
      }
  std::size_t best = k;
  for (std::size_t a = 0; a < k; ++a) {
    if (deg[a] == 0) continue;
    if (best == k || deg[a] > deg[best] || (deg[a] == deg[best] && V[a] < V[best])) best = a;
  }
  ClusterPair out;
  if (best == k) {
    // Only reachable for an empty kept graph; fall back to the top pair.
    for (std::size_t a = 0; a < k && best == k; ++a)
      for (std::size_t b = a + 1; b < k; ++b)
        if (M.count(a, b) == top) {
          out.center = std::min(V[a], V[b]);
          out.members = {std::min(V[a], V[b]), std::max(V[a], V[b])};
          return out;
        }
  }
  out.center = V[best];
  out.members.push_back(V[best]);
  for (std::size_t b = 0; b < k; ++b)
    if (b != best && M.count(best, b) >= floor_c) out.members.push_back(V[b]);
  std::sort(out.members.begin(), out.members.end());
  return out;
}

ClusterPair generate_cluster(const Graph& g, const VertexSet& U, const VertexSet& V, double eta,
                             double c_gap) {
  if (V.size() < 2) throw InvalidInput("generate_cluster needs |V| >= 2");
  return generate_cluster(common_neighbor_matrix(g, U, V), V, eta, c_gap);
}

CalibrationResult calibrate_count(double N, double fe_U, double eta, double r_G,
                                  const ConnectionFunction& p) {
  if (fe_U > p.ell_p() * eta) throw ConfigError("calibration margin fe(U) <= ell_p eta violated");
  CalibrationResult r;
  r.margin = 2.0 * eta;
  if (N >= p(r_G)) r.estimate = p.inverse(N).x;
  return r;
}

CalibrationResult calibrate_distance(const Graph& g, const VertexSet& U, Vertex w, double eta,
                                     double r_G, double n_log, const ConnectionFunction& p) {
  const double N = normalized_count(g, U, w);
  const double fe = fluctuation_scale(n_log, g.q(), static_cast<double>(U.size()));
  return calibrate_count(N, fe, eta, r_G, p);
}

Annulus annulus_count(double N, double fe_U, double r, double alpha, double eta,
                      const ConnectionFunction& p) {
  if (fe_U > p.ell_p() * eta) throw ConfigError("calibration margin fe(U) <= ell_p eta violated");
  if (!(alpha >= 0.0 && alpha <= r)) throw InvalidInput("annulus half-width must lie in [0, r]");
  const double hi = p(r - alpha);
  const double lo = p(r + alpha);
  if (N >= lo && N <= hi) return Annulus::InsideBand;
  if (hi == lo) return Annulus::Inconclusive;
  return N < lo ? Annulus::Below : Annulus::Above;
}

Annulus annulus_test(const Graph& g, const VertexSet& U, Vertex w, double r, double alpha,
                     double eta, double n_log, const ConnectionFunction& p) {
  const double N = normalized_count(g, U, w);
  const double fe = fluctuation_scale(n_log, g.q(), static_cast<double>(U.size()));
  return annulus_count(N, fe, r, alpha, eta, p);
}

}  // namespace rgg::clustering
