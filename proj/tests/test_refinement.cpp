#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "fixture.hpp"
#include "rgg/errors.hpp"
#include "rgg/geometry.hpp"
#include "rgg/parallel.hpp"
#include "rgg/refinement.hpp"
#include "rgg/rng.hpp"

using namespace rgg;
using namespace rgg::refinement;
using geometry::ManifoldModel;
using geometry::Point;

namespace {

const double kDiam = 0.7071067811865476;

/// One frame at z = (1/2, 1/2) with axes at z + r e_1 and z + r e_2, and
/// fine vertices whose counts are the exact expectations p(latent distance).
struct ExactFrame {
  ManifoldModel T = ManifoldModel::flat_torus(2);
  ModelInputs in;
  Scales s;
  netframe::NetOutput net;
  FineContext ctx;
  std::vector<Point> fine_pts;

  ExactFrame(const std::vector<Point>& pts, double lambda) : fine_pts(pts) {
    in.d = 2;
    in.p = ConnectionFunction::exp_decay(1.0, 0.5, kDiam);
    in.c_mu = std::numbers::pi;
    s.r = 0.1;
    s.delta = 0.02;
    s.eta = 0.01;
    s.lambda = lambda;
    const Point z = Point::torus({0.5, 0.5});
    const std::vector<Point> axes{Point::torus({0.6, 0.5}), Point::torus({0.5, 0.6})};
    netframe::Frame F;
    F.center = {{0}, 0};
    F.axes = {{{1}, 1}, {{2}, 2}};
    F.axis_map = {0, 1};
    net.net.push_back(F);
    net.ortho_pool = F.axes;
    const Vertex base = 10;
    ctx.net_N.assign(1, {});
    ctx.ortho_N.assign(2, {});
    for (std::size_t k = 0; k < pts.size(); ++k) {
      ctx.V_fine.push_back(base + static_cast<Vertex>(k));
      ctx.net_N[0].push_back(in.p(geometry::distance(T, pts[k], z)));
      for (int j = 0; j < 2; ++j) ctx.ortho_N[j].push_back(in.p(geometry::distance(T, pts[k], axes[j])));
      const bool ok = ctx.net_N[0].back() >= in.p(3.0 * s.delta);
      ctx.ref.push_back(ok ? 0 : -1);
      ctx.ref_failure.push_back(ok ? "" : "no cluster found around w");
    }
  }
  double dist(std::size_t a, std::size_t b) const { return geometry::distance(T, fine_pts[a], fine_pts[b]); }
};

std::vector<Point> disc_points(CounterStream& s, double cx, double cy, double rad, std::size_t n) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2 * std::numbers::pi * s.uniform(), r = rad * std::sqrt(s.uniform());
    out.push_back(Point::torus({cx + r * std::cos(a), cy + r * std::sin(a)}));
  }
  return out;
}

}  // namespace

TEST(BalancedLambda, Examples) {
  // (sqrt2 * 18 / 6 * log(1e6) / 1e3)^{1/2} and (sqrt2 * 18^2 / 6 * log(1e6) / 1e3)^{1/3}.
  const double t = std::log(1e6) / 1e3;
  EXPECT_NEAR(balanced_lambda(1e6, 1.0, 2, 1.0, 1.0), std::sqrt(std::sqrt(2.0) * 3.0 * t), 1e-14);
  EXPECT_NEAR(balanced_lambda(1e6, 1.0, 2, 1.0, 1.0), 0.2421038, 1e-7);
  EXPECT_NEAR(balanced_lambda(1e6, 1.0, 4, 1.0, 1.0), 1.0180, 1e-4);
  // log n / sqrt n decreases from n = e^2 on.
  double prev = balanced_lambda(8, 1.0, 2, 1.0, 1.0);
  for (double n = 32; n < 1e9; n *= 4) {
    const double l = balanced_lambda(n, 1.0, 2, 1.0, 1.0);
    EXPECT_LT(l, prev);
    prev = l;
  }
  EXPECT_THROW(balanced_lambda(10, 0.05, 2, 1.0, 1.0), InvalidInput);
}

TEST(BalancedLambda, ClampSelectsBalancedValueInsideTheWindow) {
  ModelInputs in;
  in.p = ConnectionFunction::exp_decay(1.0, 0.5, kDiam);
  in.c_mu = std::numbers::pi;
  ParameterConfig cfg;
  cfg.strict = false;
  cfg.r_G = 0.5;
  cfg.c = 0.9;
  cfg.m = 1e7;
  const Scales s = resolve_scales(cfg, in, 1e8);
  const double floor = 4.0 * std::sqrt(2.0) * s.fe_m;
  ASSERT_LT(floor, s.lambda_bal);
  ASSERT_LT(s.lambda_bal, s.eta);
  EXPECT_EQ(s.lambda, s.lambda_bal);
  cfg.m = 1e4;  // floor above eta: lambda pinned to eta with a warning
  const Scales t = resolve_scales(cfg, in, 1e8);
  EXPECT_EQ(t.lambda, t.eta);
  EXPECT_FALSE(t.warnings.empty());
}

TEST(RefineFine, InnerAndOuterBallsWithExactCounts) {
  CounterStream s(5, StreamTag::Aux, 0);
  const double lambda = 0.01;
  ExactFrame X(disc_points(s, 0.5, 0.5, 0.08, 600), lambda);
  const auto rr = refine_fine(Graph(), X.net, X.ctx, X.s, X.in);
  const double coarse = X.in.p(9.0 * X.s.delta);
  std::size_t inner = 0, outer = 0;
  for (const auto& c : rr.clusters) {
    const std::size_t w = X.ctx.local(c.owner);
    EXPECT_TRUE(std::binary_search(c.members.begin(), c.members.end(), c.owner));
    EXPECT_EQ(c.lambda_used, lambda);
    for (std::size_t v = 0; v < X.fine_pts.size(); ++v) {
      const bool in = std::binary_search(c.members.begin(), c.members.end(), X.ctx.V_fine[v]);
      const double d = X.dist(w, v);
      if (d <= lambda / (6.0 * X.in.p.L_p()) && X.ctx.net_N[0][v] >= coarse) {
        ++inner;
        EXPECT_TRUE(in);
      }
      if (d >= 6.0 * lambda / X.in.p.ell_p()) {
        ++outer;
        EXPECT_FALSE(in);
      }
    }
  }
  EXPECT_GT(inner, 0u);
  EXPECT_GT(outer, 0u);
  // Vertices farther than 3 delta from the frame centre have no reference.
  EXPECT_EQ(rr.clusters.size() + rr.failures.size(), X.fine_pts.size());
  EXPECT_FALSE(rr.failures.empty());
}

TEST(RefineFine, EveryVertexFailingIsAStageFailure) {
  CounterStream s(6, StreamTag::Aux, 0);
  ExactFrame X(disc_points(s, 0.1, 0.1, 0.01, 20), 0.01);
  EXPECT_THROW(refine_fine(Graph(), X.net, X.ctx, X.s, X.in), StageFailure);
}

TEST(RefineFineNet, TwoSeparatedBlobsGiveTwoCentres) {
  CounterStream s(7, StreamTag::Aux, 0);
  auto pts = disc_points(s, 0.47, 0.5, 0.001, 40);
  const auto b = disc_points(s, 0.53, 0.5, 0.001, 40);
  pts.insert(pts.end(), b.begin(), b.end());
  ExactFrame X(pts, 0.01);
  ParameterConfig cfg;
  X.s.fe_m = 0.0;
  const double zeta = 0.002;
  const auto fn = refine_fine_net(X.net, X.ctx, zeta, X.s, X.in, cfg);
  ASSERT_EQ(fn.S.size(), 2u);
  EXPECT_LT(X.ctx.local(fn.S[0]), 40u);
  EXPECT_GE(X.ctx.local(fn.S[1]), 40u);
  EXPECT_GE(X.dist(X.ctx.local(fn.S[0]), X.ctx.local(fn.S[1])), 2.0 * zeta);
  for (std::size_t i = 0; i < 2; ++i)
    for (Vertex v : fn.cover[i])
      EXPECT_LE(X.dist(X.ctx.local(fn.S[i]), X.ctx.local(v)), cfg.C_fine_net * zeta);
}

TEST(RefineFineNet, CoarseScaleCoversEverythingWithFewCentres) {
  CounterStream s(8, StreamTag::Aux, 0);
  ExactFrame X(disc_points(s, 0.5, 0.5, 0.05, 300), 0.01);
  ParameterConfig cfg;
  X.s.fe_m = 0.0;
  const auto fn = refine_fine_net(X.net, X.ctx, X.s.eta, X.s, X.in, cfg);
  std::size_t covered = 0;
  for (const auto& c : fn.cover) covered += c.size();
  EXPECT_EQ(covered, 300u);
  EXPECT_LT(fn.S.size(), 30u);
}

TEST(RefineFineNet, ScaleOutsideWindowRejectedInStrictMode) {
  CounterStream s(9, StreamTag::Aux, 0);
  ExactFrame X(disc_points(s, 0.5, 0.5, 0.05, 20), 0.01);
  ParameterConfig cfg;
  X.s.fe_m = 0.0;
  EXPECT_THROW(refine_fine_net(X.net, X.ctx, 2.0 * X.s.eta, X.s, X.in, cfg), ConfigError);
  cfg.strict = false;
  EXPECT_FALSE(refine_fine_net(X.net, X.ctx, 2.0 * X.s.eta, X.s, X.in, cfg).diagnostics.empty());
}

TEST(RefineFineNet, DeskRunCoversArePartition) {
  const auto& D = rgg::testing::desk_run();
  ASSERT_FALSE(D.run.failed) << D.run.failure;
  const auto& fn = D.run.fine_net;
  std::multiset<Vertex> all;
  for (std::size_t i = 0; i < fn.S.size(); ++i) {
    ASSERT_FALSE(fn.cover[i].empty());
    EXPECT_TRUE(std::find(fn.cover[i].begin(), fn.cover[i].end(), fn.S[i]) != fn.cover[i].end());
    all.insert(fn.cover[i].begin(), fn.cover[i].end());
  }
  VertexSet flat(all.begin(), all.end());
  VertexSet expect = D.run.V_fine;
  std::sort(expect.begin(), expect.end());
  EXPECT_EQ(flat, expect);
  // Greedy order: centres are increasing.
  EXPECT_TRUE(std::is_sorted(fn.S.begin(), fn.S.end()));
}

TEST(RefineFine, DeskRunClustersContainOwners) {
  const auto& D = rgg::testing::desk_run();
  ASSERT_FALSE(D.run.failed) << D.run.failure;
  EXPECT_EQ(D.run.fine.clusters.size() + D.run.fine.failures.size(), D.run.V_fine.size());
  for (const auto& c : D.run.fine.clusters)
    EXPECT_TRUE(std::binary_search(c.members.begin(), c.members.end(), c.owner));
}

TEST(RefineFine, IndependentOfThreadCount) {
  const auto& D = rgg::testing::desk_run();
  const unsigned saved = threads();
  set_threads(3);
  const auto ctx = prepare_fine(D.gen.graph, D.run.net, D.run.V_fine, D.s, D.in);
  const auto rr = refine_fine(D.gen.graph, D.run.net, ctx, D.s, D.in);
  set_threads(saved);
  ASSERT_EQ(rr.clusters.size(), D.run.fine.clusters.size());
  for (std::size_t k = 0; k < rr.clusters.size(); ++k)
    EXPECT_EQ(rr.clusters[k].members, D.run.fine.clusters[k].members);
}
