#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rgg/connection.hpp"
#include "rgg/errors.hpp"
#include "rgg/geometry.hpp"
#include "rgg/rng.hpp"

using namespace rgg;
using namespace rgg::geometry;
using std::numbers::pi;

TEST(Philox, KnownAnswerVectors) {
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}),
            (Ctr4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(philox4x32({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}),
            (Ctr4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                       {0xa4093822u, 0x299f31d0u}),
            (Ctr4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, PairUniformIsSymmetricAndInUnitInterval) {
  for (std::uint32_t i = 0; i < 50; ++i)
    for (std::uint32_t j = i + 1; j < 50; ++j) {
      const double u = pair_uniform(7, i, j);
      EXPECT_EQ(u, pair_uniform(7, j, i));
      EXPECT_GE(u, 0.0);
      EXPECT_LT(u, 1.0);
    }
  EXPECT_NE(pair_uniform(7, 1, 2), pair_uniform(8, 1, 2));
}

TEST(Philox, StreamsAreReproducibleAndTagged) {
  CounterStream a(3, StreamTag::Point, 11), b(3, StreamTag::Point, 11), c(3, StreamTag::Aux, 11);
  bool differs = false;
  for (int k = 0; k < 20; ++k) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    differs = differs || x != c.uniform();
  }
  EXPECT_TRUE(differs);
}

TEST(Philox, NormalMoments) {
  CounterStream s(5, StreamTag::Aux, 0);
  double m = 0.0, v = 0.0;
  const int N = 200000;
  for (int k = 0; k < N; ++k) {
    const double z = s.normal();
    m += z;
    v += z * z;
  }
  m /= N;
  v = v / N - m * m;
  EXPECT_NEAR(m, 0.0, 5.0 / std::sqrt(N));
  EXPECT_NEAR(v, 1.0, 0.02);
}

TEST(Distance, FlatTorusExamples) {
  const auto T = ManifoldModel::flat_torus(2);
  EXPECT_NEAR(distance(T, Point::torus({0, 0}), Point::torus({0.5, 0.5})), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(distance(T, Point::torus({0.1, 0.9}), Point::torus({0.9, 0.1})), 0.2828427124746, 1e-12);
  EXPECT_DOUBLE_EQ(T.rinj(), 0.5);
  EXPECT_NEAR(T.diam(), std::sqrt(2.0) / 2.0, 1e-15);
}

TEST(Distance, SphereAntipodal) {
  const auto S = ManifoldModel::sphere(2, 1.0);
  EXPECT_NEAR(distance(S, Point::sphere({0, 0, 1}), Point::sphere({0, 0, -1})), pi, 1e-12);
  EXPECT_NEAR(S.rinj(), pi, 1e-15);
  const auto S4 = ManifoldModel::sphere(2, 4.0);
  EXPECT_NEAR(distance(S4, Point::sphere({0, 0, 1}), Point::sphere({1, 0, 0})), pi / 4.0, 1e-12);
}

TEST(Distance, DimensionMismatchThrows) {
  const auto T = ManifoldModel::flat_torus(2);
  EXPECT_THROW(distance(T, Point::torus({0.1, 0.2}), Point::torus({0.1, 0.2, 0.3})), InvalidInput);
}

TEST(Distance, SymmetricAndTriangleInequality) {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> U(0, 1);
  const auto T = ManifoldModel::flat_torus(3);
  for (int k = 0; k < 2000; ++k) {
    const auto x = Point::torus({U(g), U(g), U(g)});
    const auto y = Point::torus({U(g), U(g), U(g)});
    const auto z = Point::torus({U(g), U(g), U(g)});
    EXPECT_EQ(distance(T, x, y), distance(T, y, x));
    EXPECT_LE(distance(T, x, z), distance(T, x, y) + distance(T, y, z) + 1e-15);
  }
}

TEST(Point, TorusWrapsIntoUnitCube) {
  const auto p = Point::torus({1.25, -0.25});
  EXPECT_NEAR(p.coords[0], 0.25, 1e-15);
  EXPECT_NEAR(p.coords[1], 0.75, 1e-15);
  EXPECT_EQ(Point::torus({0.0, 0.5}), Point::torus({1.0, 0.5}));
  const auto s = Point::sphere({3, 0, 4});
  EXPECT_NEAR(std::hypot(s.coords[0], s.coords[1], s.coords[2]), 1.0, 1e-12);
}

TEST(ExpMap, Examples) {
  const auto T = ManifoldModel::flat_torus(2);
  EXPECT_EQ(exp_map(T, Point::torus({0.5, 0.5}), {0.25, 0.0}), Point::torus({0.75, 0.5}));
  EXPECT_EQ(exp_map(T, Point::torus({0.3, 0.7}), {0.0, 0.0}), Point::torus({0.3, 0.7}));
  const auto S = ManifoldModel::sphere(2, 1.0);
  const auto north = Point::sphere({0, 0, 1});
  const auto q = exp_map(S, north, {pi / 2.0, 0.0, 0.0});
  EXPECT_NEAR(q.coords[2], 0.0, 1e-12);
  EXPECT_NEAR(distance(S, north, q), pi / 2.0, 1e-10);
  EXPECT_EQ(exp_map(S, north, {0.0, 0.0, 0.0}), north);
}

TEST(ExpMap, DistanceEqualsNorm) {
  std::mt19937_64 g(2);
  std::normal_distribution<double> N(0, 1);
  const auto S = ManifoldModel::sphere(2, 1.0);
  for (int k = 0; k < 500; ++k) {
    const auto p = Point::sphere({N(g), N(g), N(g)});
    std::vector<double> v{N(g), N(g), N(g)};
    double dot = 0.0;
    for (int i = 0; i < 3; ++i) dot += v[i] * p.coords[i];
    for (int i = 0; i < 3; ++i) v[i] -= dot * p.coords[i];
    const double len = std::hypot(v[0], v[1], v[2]);
    const double target = 0.1 + 2.5 * (k % 100) / 100.0;
    for (double& t : v) t *= target / len;
    EXPECT_NEAR(distance(S, p, exp_map(S, p, v)), target, 1e-10);
  }
}

TEST(ExpMap, BumpTorusUnsupported) {
  const auto B = ManifoldModel::bump_torus(2, lowerbound::BumpProfile::with_default_alpha(0.01, 1.0), 256);
  EXPECT_THROW(exp_map(B, Point::torus({0.5, 0.5}), {0.01, 0.0}), Unsupported);
}

TEST(OppositeSide, Examples) {
  EXPECT_NEAR(opposite_side(0.0, pi / 2.0, 3.0, 4.0), 5.0, 1e-12);
  // Right spherical triangle with legs pi/2 sits on the a + b = pi boundary,
  // which is rejected; approach it from inside.
  EXPECT_NEAR(opposite_side(1.0, pi / 2.0, pi / 2.0 - 1e-9, pi / 2.0 - 1e-9), pi / 2.0, 1e-8);
  EXPECT_THROW(opposite_side(1.0, pi / 2.0, pi / 2.0, pi / 2.0), DomainError);
  // Direct evaluation of cosh c = cosh a cosh b - sinh a sinh b cos theta.
  EXPECT_NEAR(opposite_side(-1.0, pi / 2.0, 1.0, 1.0), std::acosh(std::cosh(1.0) * std::cosh(1.0)), 1e-12);
  EXPECT_NEAR(opposite_side(-1.0, pi / 2.0, 1.0, 1.0), 1.5133740, 1e-7);
}

TEST(OppositeSide, DomainError) {
  EXPECT_THROW(opposite_side(1.0, 1.0, 2.0, 1.2), DomainError);
  EXPECT_THROW(opposite_side(4.0, 1.0, 0.8, 0.8), DomainError);
}

TEST(OppositeSide, ContinuousAtZeroCurvature) {
  for (double theta : {0.1, 1.0, 2.5})
    for (double k : {1e-8, -1e-8})
      EXPECT_NEAR(opposite_side(k, theta, 0.3, 0.7), opposite_side(0.0, theta, 0.3, 0.7), 1e-8);
}

TEST(OppositeSide, NondecreasingInAngle) {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> U(0.01, 1.4);
  for (double kappa : {-1.0, 0.0, 1.0})
    for (int k = 0; k < 1000; ++k) {
      const double a = U(g), b = U(g);
      double prev = -1.0;
      for (int i = 0; i <= 32; ++i) {
        const double c = opposite_side(kappa, pi * i / 32.0, a, b);
        EXPECT_GE(c, prev - 1e-12);
        prev = c;
      }
    }
}

TEST(ComparisonAngle, Examples) {
  EXPECT_NEAR(comparison_angle(0.0, 3.0, 4.0, 5.0), pi / 2.0, 1e-10);
  for (double kappa : {-1.0, 0.0, 1.0}) {
    EXPECT_NEAR(comparison_angle(kappa, 0.4, 0.3, 0.7 - 1e-12), pi, 1e-4);
    EXPECT_NEAR(comparison_angle(kappa, 0.4, 0.3, 0.1), 0.0, 1e-5);
  }
  EXPECT_THROW(comparison_angle(0.0, 1.0, 1.0, 2.5), DomainError);
}

TEST(ComparisonAngle, InvertsOppositeSideAndIsMonotone) {
  std::mt19937_64 g(4);
  std::uniform_real_distribution<double> U(0.05, 1.2), T(0.01, pi - 0.01);
  for (double kappa : {-1.0, 0.0, 1.0})
    for (int k = 0; k < 300; ++k) {
      const double a = U(g), b = U(g), th = T(g);
      const double c = opposite_side(kappa, th, a, b);
      const double back = comparison_angle(kappa, a, b, c);
      EXPECT_NEAR(opposite_side(kappa, back, a, b), c, 1e-10);
      EXPECT_LE(comparison_angle(kappa, a, b, c * 0.99 + std::fabs(a - b) * 0.01), back + 1e-12);
    }
}

TEST(SamplePoint, AtomsExhaustMass) {
  const auto T = ManifoldModel::flat_torus(2);
  const auto X = Point::torus({0.2, 0.2}), Y = Point::torus({0.7, 0.1});
  const auto mu = SamplingMeasure::with_atoms(T, {{X, 0.5}, {Y, 0.5}});
  CounterStream s(1, StreamTag::Point, 0);
  for (int k = 0; k < 1000; ++k) {
    const auto p = sample_point(mu, T, s);
    EXPECT_TRUE(p == X || p == Y);
  }
}

TEST(SamplePoint, UniformTorusMean) {
  const auto T = ManifoldModel::flat_torus(2);
  const auto mu = SamplingMeasure::uniform(T);
  CounterStream s(9, StreamTag::Point, 0);
  double m0 = 0.0, m1 = 0.0;
  const int N = 100000;
  for (int k = 0; k < N; ++k) {
    const auto p = sample_point(mu, T, s);
    m0 += p.coords[0];
    m1 += p.coords[1];
  }
  EXPECT_NEAR(m0 / N, 0.5, 0.01);
  EXPECT_NEAR(m1 / N, 0.5, 0.01);
}

TEST(SamplePoint, DeterministicPerStream) {
  const auto S = ManifoldModel::sphere(2, 1.0);
  const auto mu = SamplingMeasure::uniform(S);
  CounterStream a(4, StreamTag::Point, 17), b(4, StreamTag::Point, 17);
  const auto p = sample_point(mu, S, a);
  EXPECT_EQ(p, sample_point(mu, S, b));
  EXPECT_NEAR(std::hypot(p.coords[0], p.coords[1], p.coords[2]), 1.0, 1e-12);
}

TEST(Measure, UniformTorusAhlfors) {
  for (int d : {1, 2, 3}) {
    const auto T = ManifoldModel::flat_torus(d);
    const auto mu = SamplingMeasure::uniform(T);
    EXPECT_DOUBLE_EQ(mu.c_mu, unit_ball_volume(d));
    EXPECT_DOUBLE_EQ(mu.r_mu, 0.5);
  }
  EXPECT_NEAR(unit_ball_volume(2), pi, 1e-15);
  EXPECT_NEAR(unit_ball_volume(3), 4.0 * pi / 3.0, 1e-15);
}

TEST(Measure, AtomMassesMustStayBelowOne) {
  const auto T = ManifoldModel::flat_torus(2);
  EXPECT_THROW(SamplingMeasure::with_atoms(T, {{Point::torus({0.1, 0.1}), 0.7}, {Point::torus({0.2, 0.2}), 0.7}}),
               InvalidInput);
}

TEST(Manifold, DescriptorRoundTrip) {
  for (const auto& m : {ManifoldModel::flat_torus(3), ManifoldModel::sphere(2, 2.0),
                        ManifoldModel::bump_torus(2, lowerbound::BumpProfile::with_default_alpha(0.02, 4.0), 256)})
    EXPECT_EQ(ManifoldModel::from_descriptor(m.descriptor()), m);
  EXPECT_THROW(ManifoldModel::from_descriptor("klein:2"), InvalidInput);
}

TEST(Connection, ExpDecayConstants) {
  const auto p = ConnectionFunction::exp_decay(1.0, 0.5, 1.0);
  EXPECT_DOUBLE_EQ(p(0.0), 1.0);
  EXPECT_NEAR(p(0.3), std::exp(-0.3), 1e-15);
  EXPECT_DOUBLE_EQ(p.L_p(), 1.0);
  EXPECT_NEAR(p.ell_p(), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(p.inverse(std::exp(-0.3)).x, 0.3, 1e-12);
  EXPECT_TRUE(p.inverse(1e-9).clamped);
}

TEST(Connection, LipschitzBoundsOnGrid) {
  for (const auto& p : {ConnectionFunction::exp_decay(0.1, 0.5, 0.7071067811865476),
                        ConnectionFunction::linear_clip(2.0, 0.0, 0.5, 0.7071067811865476)}) {
    const int K = 400;
    for (int i = 0; i < K; ++i) {
      const double a = p.diam() * i / K, b = p.diam() * (i + 1) / K;
      EXPECT_GE(p(a), p(b));
      EXPECT_GE(p(a), 0.0);
      EXPECT_LE(p(a), 1.0);
      EXPECT_LE(p(a) - p(b), p.L_p() * (b - a) * (1 + 1e-12));
      if (b <= p.r_p()) {
        EXPECT_GE(p(a) - p(b), p.ell_p() * (b - a) * (1 - 1e-12));
      }
    }
  }
}

TEST(Connection, BisectionMatchesClosedForm) {
  const auto p = ConnectionFunction::exp_decay(0.2, 0.5, 0.7);
  for (double x : {0.01, 0.2, 0.45, 0.69})
    EXPECT_NEAR(bisect_inverse(p, p(x), 0.0, p.diam(), 1e-13), x, 1e-12);
}

TEST(Connection, DescriptorRoundTrip) {
  for (const std::string s : {"exp:0.1:0.5:0.7071067811865476", "linear:2:0:0.5:0.7071067811865476"}) {
    const auto p = ConnectionFunction::from_descriptor(s);
    EXPECT_EQ(ConnectionFunction::from_descriptor(p.descriptor()), p);
  }
  EXPECT_THROW(ConnectionFunction::from_descriptor("gauss:1"), InvalidInput);
}
