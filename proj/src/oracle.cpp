#include "rgg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rgg/errors.hpp"
#include "rgg/parallel.hpp"
#include "rgg/rng.hpp"

namespace rgg::oracle {

namespace {

constexpr std::uint64_t kPlantStream = 0x504c4e54'00000000ull;

std::vector<geometry::Point> probe_points(const geometry::ManifoldModel& m, int side) {
  std::vector<geometry::Point> out;
  const int d = m.dim();
  if (m.kind() == geometry::ManifoldKind::Sphere) {
    if (d != 2) throw Unsupported("sphere probes are implemented for d = 2");
    const int total = side * side;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < total; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / total;
      const double rad = std::sqrt(1.0 - z * z);
      out.push_back(geometry::Point::sphere({rad * std::cos(golden * k), rad * std::sin(golden * k), z}));
    }
    return out;
  }
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(side);
  for (std::size_t id = 0; id < total; ++id) {
    std::vector<double> c(d);
    std::size_t r = id;
    for (int i = 0; i < d; ++i) {
      c[i] = (static_cast<double>(r % side) + 0.5) / side;
      r /= side;
    }
    out.push_back(geometry::Point::torus(c));
  }
  return out;
}

}  // namespace

double cluster_radius(const LatentPositions& lat, Vertex center, const VertexSet& members) {
  double r = 0.0;
  for (Vertex v : members) r = std::max(r, lat.distance(center, v));
  return r;
}

Stage1Check stage1_check(const netframe::NetOutput& net, const LatentPositions& lat,
                         const Scales& s, int probes_per_side) {
  Stage1Check c;
  c.frames = net.net.size();
  c.net_complete = net.complete;
  const int d = lat.model().dim();
  for (const auto& F : net.net) {
    c.complete_frames += F.complete(d);
    c.max_net_radius = std::max(c.max_net_radius, cluster_radius(lat, F.center.center, F.center.members));
  }
  for (const auto& V : net.ortho_pool)
    c.max_ortho_radius = std::max(c.max_ortho_radius, cluster_radius(lat, V.center, V.members));
  for (std::size_t i = 0; i < net.net.size(); ++i)
    for (std::size_t j = i + 1; j < net.net.size(); ++j)
      c.separation_violations += lat.distance(net.net[i].center.center, net.net[j].center.center) < s.delta;
  const auto probes = probe_points(lat.model(), probes_per_side);
  c.probes = probes.size();
  std::vector<char> uncovered(probes.size(), 0);
  parallel_for(probes.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      bool ok = false;
      for (const auto& F : net.net) {
        if (lat.distance_to(F.center.center, probes[k]) <= 2.0 * s.delta) {
          ok = true;
          break;
        }
      }
      uncovered[k] = !ok;
    }
  });
  for (char u : uncovered) c.uncovered_probes += u;
  const double r2 = std::sqrt(2.0) * s.r;
  for (const auto& F : net.net) {
    for (std::size_t a = 0; a < F.axes.size(); ++a) {
      ++c.window_checks;
      c.window_violations += std::abs(lat.distance(F.center.center, F.axes[a].center) - s.r) > s.delta;
      for (std::size_t b = 0; b < a; ++b) {
        ++c.window_checks;
        c.window_violations += std::abs(lat.distance(F.axes[a].center, F.axes[b].center) - r2) > s.delta;
      }
    }
  }
  return c;
}

Stage2Check stage2_check(const Graph& g, const assembly::RunResult& run, const LatentPositions& lat,
                         const Scales& s, const ModelInputs& in, const ParameterConfig& cfg) {
  Stage2Check c;
  c.clusters = run.fine.clusters.size();
  c.failed_vertices = run.fine.failures.size();
  c.fine_vertices = run.V_fine.size();
  const double ell = in.p.ell_p();
  const double radius_cap = 6.0 * s.lambda / ell;
  const double inner = s.lambda / (6.0 * in.p.L_p());
  const double coarse = in.p(9.0 * s.delta);
  for (const auto& fc : run.fine.clusters) {
    const double rad = cluster_radius(lat, fc.owner, fc.members);
    c.max_radius = std::max(c.max_radius, rad);
    c.radius_violations += rad > radius_cap;
    const double fe = fluctuation_scale(s.n, g.q(), static_cast<double>(fc.members.size()));
    c.fe_violations += fe > 6.0 * s.lambda;
  }
  // Inner-ball inclusion, checked against the reference cluster count that gates W_w.
  const auto ctx = refinement::prepare_fine(g, run.net, run.V_fine, s, in);
  for (const auto& fc : run.fine.clusters) {
    const std::size_t w = ctx.local(fc.owner);
    const auto& UN = ctx.net_N[ctx.ref[w]];
    for (std::size_t v = 0; v < ctx.V_fine.size(); ++v) {
      if (UN[v] < coarse) continue;
      if (lat.distance(fc.owner, ctx.V_fine[v]) > inner) continue;
      c.inner_violations += !std::binary_search(fc.members.begin(), fc.members.end(), ctx.V_fine[v]);
    }
  }
  const auto& fn = run.fine_net;
  c.centres = fn.S.size();
  c.min_centre_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < fn.S.size(); ++i)
    for (std::size_t j = i + 1; j < fn.S.size(); ++j) {
      const double dd = lat.distance(fn.S[i], fn.S[j]);
      c.min_centre_gap = std::min(c.min_centre_gap, dd);
      c.separation_violations += dd < 2.0 * fn.zeta;
    }
  for (std::size_t i = 0; i < fn.S.size(); ++i) {
    const double rad = cluster_radius(lat, fn.S[i], fn.cover[i]);
    c.max_cover_radius = std::max(c.max_cover_radius, rad);
    for (Vertex v : fn.cover[i]) c.cover_violations += lat.distance(fn.S[i], v) > cfg.C_fine_net * fn.zeta;
  }
  return c;
}

WeightCheck weight_check(const assembly::WeightGraph& wg, const LatentPositions& lat,
                         const Scales& s) {
  WeightCheck c;
  for (std::size_t i = 0; i < wg.n(); ++i)
    for (std::size_t j = i + 1; j < wg.n(); ++j) {
      const double lt = lat.distance(static_cast<Vertex>(i), static_cast<Vertex>(j));
      const double w = wg.weight(i, j);
      if (!std::isfinite(w)) {
        c.missing_near += lt <= s.r_G / 2.0;
        continue;
      }
      ++c.finite;
      c.under_latent += w < lt;
      c.over_margin += lt < w - 4.0 * s.xi;
    }
  return c;
}

PlantedInstance planted_instance(int d, std::uint32_t n, std::uint32_t m, double radius,
                                 const ConnectionFunction& p, double q, std::uint64_t seed) {
  if (m > n) throw InvalidInput("planted size exceeds n");
  const auto model = geometry::ManifoldModel::flat_torus(d);
  const auto mu = geometry::SamplingMeasure::uniform(model);
  auto pts = sample_latent(model, mu, n, seed);
  CounterStream cs(seed, StreamTag::Aux, kPlantStream);
  std::vector<double> centre(d);
  for (auto& x : centre) x = cs.uniform();
  PlantedInstance inst;
  inst.centre = geometry::Point::torus(centre);
  // The first m vertices are placed uniformly in the ball by rejection.
  for (std::uint32_t i = 0; i < m; ++i) {
    std::vector<double> off(d);
    double r2;
    do {
      r2 = 0.0;
      for (auto& x : off) {
        x = (2.0 * cs.uniform() - 1.0) * radius;
        r2 += x * x;
      }
    } while (r2 > radius * radius);
    std::vector<double> c(d);
    for (int k = 0; k < d; ++k) c[k] = centre[k] + off[k];
    pts[i] = geometry::Point::torus(c);
    inst.planted.push_back(i);
  }
  LatentPositions lat(model, std::move(pts));
  Graph g = graph_from_latent(lat, p, q, seed);
  inst.gen = {std::move(g), std::move(lat)};
  return inst;
}

}  // namespace rgg::oracle
