#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "fixture.hpp"
#include "rgg/errors.hpp"
#include "rgg/geometry.hpp"
#include "rgg/latent.hpp"
#include "rgg/netframe.hpp"
#include "rgg/parallel.hpp"
#include "rgg/rng.hpp"

using namespace rgg;
using namespace rgg::netframe;
using geometry::ManifoldModel;
using geometry::Point;

namespace {

const double kDiam = 0.7071067811865476;

VertexSet range(Vertex a, Vertex b) {
  VertexSet s;
  for (Vertex v = a; v < b; ++v) s.push_back(v);
  return s;
}

std::string report_text(const NetOutput& net) {
  std::ostringstream os;
  write_report(os, net);
  return os.str();
}

/// Uniform point in the disc of radius rad around c on the flat 2-torus.
Point in_disc(CounterStream& s, const std::vector<double>& c, double rad) {
  const double a = 2.0 * std::numbers::pi * s.uniform(), r = rad * std::sqrt(s.uniform());
  return Point::torus({c[0] + r * std::cos(a), c[1] + r * std::sin(a)});
}

/// Spectral norm of A - I for a symmetric 2 x 2 matrix A.
double gram_deviation(double a11, double a12, double a22) {
  const double m = 0.5 * (a11 + a22), h = std::hypot(0.5 * (a11 - a22), a12);
  return std::max(std::fabs(m + h - 1.0), std::fabs(m - h - 1.0));
}

}  // namespace

TEST(ClusterNet, ZeroDiameterInputGivesOneIncompleteFrame) {
  // All latent points coincide: the graph is complete.
  std::vector<std::vector<Vertex>> up(300);
  for (Vertex i = 0; i < 300; ++i)
    for (Vertex j = i + 1; j < 300; ++j) up[i].push_back(j);
  const auto g = Graph::from_upper_rows(300, up, 1.0, 0);
  ModelInputs in;
  in.p = ConnectionFunction::exp_decay(1.0, 0.5, kDiam);
  in.r_G = 0.03;
  in.c_mu = std::numbers::pi;
  Scales s;
  s.r = 0.1;
  s.delta = 0.01;
  s.eta = 0.001;
  s.c_kernel = 1.0;
  const auto out = cluster_net(g, range(0, 100), range(100, 200), range(200, 300), s, in, ParameterConfig{});
  ASSERT_EQ(out.net.size(), 1u);
  EXPECT_EQ(out.net[0].center.members, range(100, 200));
  EXPECT_TRUE(out.net[0].axes.empty());
  EXPECT_TRUE(out.ortho_pool.empty());
  EXPECT_FALSE(out.complete);
  EXPECT_FALSE(out.diagnostics.empty());
}

TEST(ClusterNet, OverlappingSetsRejected) {
  std::vector<std::vector<Vertex>> up(10);
  const auto g = Graph::from_upper_rows(10, up, 1.0, 0);
  ModelInputs in;
  in.p = ConnectionFunction::exp_decay(1.0, 0.5, kDiam);
  Scales s;
  s.r = 0.1;
  s.delta = 0.01;
  s.eta = 0.001;
  EXPECT_THROW(cluster_net(g, {0, 1, 2}, {2, 3, 4}, {5, 6, 7}, s, in, ParameterConfig{}), InvalidInput);
}

TEST(ClusterNet, DeskRunStructuralInvariants) {
  const auto& D = rgg::testing::desk_run();
  const auto& net = D.run.net;
  ASSERT_FALSE(net.net.empty());
  EXPECT_LE(net.iterations, 3 * D.run.V_net.size());
  // Clusters are pairwise disjoint and lie in their source sets.
  std::set<Vertex> seen;
  const std::set<Vertex> vnet(D.run.V_net.begin(), D.run.V_net.end());
  const std::set<Vertex> vortho(D.run.V_ortho.begin(), D.run.V_ortho.end());
  for (const auto& F : net.net) {
    EXPECT_TRUE(std::binary_search(F.center.members.begin(), F.center.members.end(), F.center.center));
    for (Vertex v : F.center.members) {
      EXPECT_TRUE(seen.insert(v).second);
      EXPECT_TRUE(vnet.count(v));
    }
    std::set<std::size_t> axes(F.axis_map.begin(), F.axis_map.end());
    EXPECT_EQ(axes.size(), F.axis_map.size());
    for (std::size_t a = 0; a < F.axis_map.size(); ++a) {
      ASSERT_LT(F.axis_map[a], net.ortho_pool.size());
      EXPECT_EQ(F.axes[a].members, net.ortho_pool[F.axis_map[a]].members);
    }
  }
  for (const auto& V : net.ortho_pool)
    for (Vertex v : V.members) {
      EXPECT_TRUE(seen.insert(v).second);
      EXPECT_TRUE(vortho.count(v));
    }
  // One reveal entry per extracted cluster, in strictly increasing steps.
  EXPECT_EQ(net.reveal_log.size(), net.net.size() + net.ortho_pool.size());
  for (std::size_t k = 1; k < net.reveal_log.size(); ++k)
    EXPECT_LT(net.reveal_log[k - 1].step, net.reveal_log[k].step);
  for (const auto& e : net.reveal_log) {
    const auto& c = e.kind == ClusterKind::Net ? net.net[e.index].center : net.ortho_pool[e.index];
    EXPECT_EQ(e.center, c.center);
    EXPECT_EQ(e.size, c.members.size());
  }
}

TEST(ClusterNet, ReportRoundTrip) {
  const auto& net = rgg::testing::desk_run().run.net;
  std::istringstream is(report_text(net));
  const auto back = read_report(is);
  EXPECT_EQ(report_text(back), report_text(net));
}

TEST(ClusterNet, IndependentOfThreadCount) {
  const auto& D = rgg::testing::desk_run();
  const unsigned saved = threads();
  set_threads(3);
  const auto net3 = cluster_net(D.gen.graph, D.run.V_cn, D.run.V_net, D.run.V_ortho, D.s, D.in, D.cfg.params);
  set_threads(saved);
  EXPECT_EQ(report_text(net3), report_text(D.run.net));
}

TEST(Psi, Examples) {
  const auto& D = rgg::testing::desk_run();
  const auto& F = D.run.net.net.front();
  const Vertex w = D.run.V_fine.front();
  EXPECT_EQ(psi_frame(D.gen.graph, F, w, w), 0.0);
  EXPECT_EQ(psi_from_counts({0.3, 0.7}, {0.3, 0.7}), 0.0);
  EXPECT_DOUBLE_EQ(psi_from_counts({0.0, 0.0}, {0.3, 0.4}), 0.5);
  EXPECT_THROW(psi_from_counts({0.1}, {0.1, 0.2}), InvalidInput);
}

TEST(Psi, PlantedFrameSandwich) {
  // Frame at z: centre cluster and two axes at distance r along the
  // coordinate axes, each with m points within eta; probes within 3 delta of z.
  const auto T = ManifoldModel::flat_torus(2);
  const auto p = ConnectionFunction::exp_decay(1.0, 0.5, kDiam);
  const double r = 0.05, delta = 0.005, eta = 0.0005;
  const std::uint32_t m = 500, probes = 400;
  const std::vector<double> z{0.5, 0.5};
  CounterStream s(17, StreamTag::Aux, 0);
  std::vector<Point> pts;
  for (std::uint32_t i = 0; i < m; ++i) pts.push_back(in_disc(s, z, eta));
  for (std::uint32_t i = 0; i < m; ++i) pts.push_back(in_disc(s, {z[0] + r, z[1]}, eta));
  for (std::uint32_t i = 0; i < m; ++i) pts.push_back(in_disc(s, {z[0], z[1] + r}, eta));
  for (std::uint32_t i = 0; i < probes; ++i) pts.push_back(in_disc(s, z, 3.0 * delta));
  const std::uint32_t n = static_cast<std::uint32_t>(pts.size());
  const LatentPositions lat(T, pts);
  std::vector<std::vector<Vertex>> up(n);
  for (Vertex u = 0; u < 3 * m; ++u)
    for (Vertex w = 3 * m; w < n; ++w)
      if (pair_uniform(17, u, w) < p(lat.distance(u, w))) up[u].push_back(w);
  const auto g = Graph::from_upper_rows(n, up, 1.0, 17);
  Frame F;
  F.center = {range(0, m), 0};
  F.axes = {{range(m, 2 * m), m}, {range(2 * m, 3 * m), 2 * m}};
  F.axis_map = {0, 1};
  const double fe = fluctuation_scale(n, 1.0, m);
  std::size_t checked = 0;
  for (Vertex a = 3 * m; a + 1 < n; a += 2) {
    const Vertex b = a + 1;
    const double top = std::max(normalized_count(g, F.center.members, a),
                                normalized_count(g, F.center.members, b));
    if (top < p(9.0 * delta)) continue;
    ++checked;
    const double psi = psi_frame(g, F, a, b), d = lat.distance(a, b);
    EXPECT_LE((psi - 2.0 * std::sqrt(2.0) * fe) / (3.0 * p.L_p()), d);
    EXPECT_LE(d, 3.0 / p.ell_p() * (psi + 2.0 * std::sqrt(2.0) * fe));
  }
  EXPECT_GT(checked, 100u);
}

TEST(FrameGeometry, GramNearIdentityAndBasisEquivalence) {
  // Axis endpoints perturbed inside the frame windows, on the flat torus and
  // on the unit sphere (tangent directions from comparison angles).
  CounterStream s(23, StreamTag::Aux, 1);
  for (double kappa : {0.0, 1.0}) {
    const double r = 0.05, delta = 0.002;
    for (int trial = 0; trial < 2000; ++trial) {
      const double a = r + delta * (2 * s.uniform() - 1);
      const double b = r + delta * (2 * s.uniform() - 1);
      const double c = std::sqrt(2.0) * r + delta * (2 * s.uniform() - 1);
      const double theta = geometry::comparison_angle(kappa, a, b, c);
      const double dev = gram_deviation(1.0, std::cos(theta), 1.0);
      EXPECT_LE(dev, 10.0 * 2.0 * (delta / r + kappa * r * r));
      // y1 = e1, y2 at angle theta; random q.
      const double eps = 2.0 * dev;
      for (int k = 0; k < 4; ++k) {
        const double qa = 2 * std::numbers::pi * s.uniform();
        const double q0 = std::cos(qa), q1 = std::sin(qa);
        const double sum = q0 * q0 + std::pow(std::cos(theta) * q0 + std::sin(theta) * q1, 2);
        EXPECT_LE((1.0 - eps) * sum, 1.0 + 1e-12);
        EXPECT_LE(1.0, (1.0 + eps) * sum + 1e-12);
      }
    }
  }
}
