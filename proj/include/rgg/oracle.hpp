#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rgg/assembly.hpp"
#include "rgg/latent.hpp"
#include "rgg/netframe.hpp"
#include "rgg/params.hpp"
#include "rgg/refinement.hpp"

namespace rgg::oracle {

/// Largest latent distance from the centre to a member.
double cluster_radius(const LatentPositions& lat, Vertex center, const VertexSet& members);

struct Stage1Check {
  std::size_t frames = 0;
  std::size_t complete_frames = 0;
  std::size_t separation_violations = 0;  // net-centre pairs closer than delta
  std::size_t probes = 0;
  std::size_t uncovered_probes = 0;       // probes farther than 2 delta from every centre
  std::size_t window_checks = 0;
  std::size_t window_violations = 0;      // |d - r| or |d - sqrt2 r| above delta
  double max_net_radius = 0.0;
  double max_ortho_radius = 0.0;
  bool net_complete = false;
  bool pass() const {
    return net_complete && separation_violations == 0 && uncovered_probes == 0 &&
           window_violations == 0;
  }
};

/// Separation, 2 delta covering of a probe grid (probes_per_side^d points of the
/// torus chart), and frame windows. The sphere uses Fibonacci probes.
Stage1Check stage1_check(const netframe::NetOutput& net, const LatentPositions& lat,
                         const Scales& s, int probes_per_side = 50);

struct Stage2Check {
  std::size_t clusters = 0;
  std::size_t failed_vertices = 0;
  std::size_t fine_vertices = 0;
  std::size_t radius_violations = 0;    // latent radius above 6 lambda / ell_p
  std::size_t fe_violations = 0;        // fe(W_w) above 6 lambda
  std::size_t inner_violations = 0;     // v within lambda / (6 L_p) of w and N >= p(9 delta) but not in W_w
  std::size_t centres = 0;
  std::size_t separation_violations = 0;  // centre pairs closer than 2 zeta
  std::size_t cover_violations = 0;       // covered vertex farther than C zeta
  double max_radius = 0.0;
  double max_cover_radius = 0.0;
  double min_centre_gap = 0.0;
  double failed_fraction() const {
    return fine_vertices ? double(failed_vertices) / fine_vertices : 0.0;
  }
  bool pass() const {
    return radius_violations == 0 && fe_violations == 0 && separation_violations == 0 &&
           cover_violations == 0 && failed_fraction() <= 0.01;
  }
};

Stage2Check stage2_check(const Graph& g, const assembly::RunResult& run, const LatentPositions& lat,
                         const Scales& s, const ModelInputs& in, const ParameterConfig& cfg);

struct WeightCheck {
  std::size_t finite = 0;
  std::size_t under_latent = 0;    // w < latent
  std::size_t over_margin = 0;     // latent < w - 4 xi
  std::size_t missing_near = 0;    // latent <= r_G / 2 but w = inf
};

WeightCheck weight_check(const assembly::WeightGraph& wg, const LatentPositions& lat,
                         const Scales& s);

/// Planted (radius, m)-dense instance: m points inside a ball of the given
/// radius around a random centre, the rest uniform on the flat torus.
struct PlantedInstance {
  GeneratedGraph gen;
  geometry::Point centre;
  VertexSet planted;
};

PlantedInstance planted_instance(int d, std::uint32_t n, std::uint32_t m, double radius,
                                 const ConnectionFunction& p, double q, std::uint64_t seed);

}  // namespace rgg::oracle
