#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "rgg/bump.hpp"
#include "rgg/errors.hpp"
#include "rgg/lowerbound.hpp"
#include "rgg/rng.hpp"

using namespace rgg;
using namespace rgg::lowerbound;

TEST(Transition, ValuesAndDerivativeBounds) {
  EXPECT_DOUBLE_EQ(transition(0.5), 0.5);
  EXPECT_EQ(transition(-1.0), 0.0);
  EXPECT_EQ(transition(0.0), 0.0);
  EXPECT_EQ(transition(1.0), 1.0);
  EXPECT_EQ(transition(3.0), 1.0);
  double prev = 0.0;
  for (int i = 1; i < 4000; ++i) {
    const double x = i / 4000.0;
    const double t = transition(x);
    EXPECT_GE(t, prev);
    prev = t;
    EXPECT_LE(std::fabs(transition_d1(x)), 2.0);
    EXPECT_LE(std::fabs(transition_d2(x)), 10.0);
    // Symmetry tau(1 - x) = 1 - tau(x).
    EXPECT_NEAR(transition(1.0 - x), 1.0 - t, 1e-14);
  }
  // Derivatives against central differences.
  for (double x : {0.2, 0.45, 0.7}) {
    const double h = 1e-5;
    EXPECT_NEAR(transition_d1(x), (transition(x + h) - transition(x - h)) / (2 * h), 1e-7);
    EXPECT_NEAR(transition_d2(x), (transition_d1(x + h) - transition_d1(x - h)) / (2 * h), 1e-6);
  }
  EXPECT_DOUBLE_EQ(transition_scaled(1.0, 3.0, 4.0, 2.0), 2.0);
  EXPECT_THROW(transition_scaled(1.0, 1.0, 1.0, 0.0), InvalidInput);
}

TEST(BumpProfile, ShapeAndSupport) {
  const auto b = BumpProfile::with_default_alpha(0.12, 4096.0);
  const double r = b.r_bump, a = b.amplitude();
  EXPECT_EQ(bump_psi(b, 0.0), 0.0);
  EXPECT_EQ(bump_psi(b, 0.49 * r), 0.0);
  EXPECT_NEAR(bump_psi(b, 7.0 * r / 12.0), 0.5 * b.alpha * r * r, 1e-15);
  EXPECT_EQ(bump_psi(b, 0.7 * r), a);
  EXPECT_EQ(bump_psi(b, 0.8 * r), a);
  EXPECT_NEAR(bump_psi(b, 11.0 * r / 12.0), 0.5 * a, 1e-15);
  EXPECT_EQ(bump_psi_any(b, r), 0.0);
  EXPECT_EQ(bump_psi_any(b, 5.0), 0.0);
  EXPECT_THROW(bump_psi(b, 5.0), DomainError);
  for (int i = 0; i < 1000; ++i) {
    const double x = r * i / 1000.0;
    EXPECT_GE(std::exp(2 * bump_psi(b, x)), 1.0);
    EXPECT_LE(bump_psi(b, x), a);
  }
}

TEST(BumpProfile, ContinuouslyDifferentiableAtPieceBoundaries) {
  const auto b = BumpProfile::with_default_alpha(0.1, 4096.0);
  const double r = b.r_bump, h = 1e-9;
  for (double k : {0.5, 2.0 / 3.0, 5.0 / 6.0}) {
    const double x = k * r;
    EXPECT_NEAR(bump_psi(b, x - h), bump_psi(b, x + h), 1e-9 * b.amplitude() + 1e-15);
    EXPECT_NEAR(bump_psi_d1(b, x - h), bump_psi_d1(b, x + h), 1e-6 * b.amplitude() / r);
  }
  EXPECT_NEAR(bump_psi_any(b, r - h), 0.0, 1e-12);
}

TEST(BumpProfile, AmplitudeValidation) {
  EXPECT_NO_THROW(BumpProfile(0.1, 0.0, 1.0));
  EXPECT_NO_THROW(BumpProfile(0.1, 0.9 * std::ldexp(1.0, -12), 1.0));
  EXPECT_THROW(BumpProfile(0.1, std::ldexp(1.0, -12), 1.0), InvalidInput);
  EXPECT_THROW(BumpProfile(0.1, -1e-6, 1.0), InvalidInput);
  EXPECT_THROW(BumpProfile(0.1, 0.0, 0.0), InvalidInput);
  EXPECT_THROW(BumpProfile(-0.1, 0.0, 1.0), InvalidInput);
}

TEST(BumpProfile, CurvatureCertificateBelowBudget) {
  for (double kappa : {1.0, 64.0, 4096.0})
    for (double r : {0.02, 0.05, 0.2}) {
      const auto b = BumpProfile::with_default_alpha(r, kappa);
      EXPECT_LT(curvature_certificate(b), kappa);
    }
  const double big = curvature_certificate(BumpProfile(0.1, 1e-4, 1.0));
  const double small = curvature_certificate(BumpProfile(0.1, 1e-8, 1.0));
  EXPECT_LT(small, big * 1e-3);
  EXPECT_EQ(curvature_certificate(BumpProfile(0.1, 0.0, 1.0)), 0.0);
}

TEST(BumpDistance, FlatLimitIsEuclidean) {
  const BumpProfile flat(0.1, 0.0, 1.0);
  const auto r = bump_distance(flat, {0.48, 0.5}, {0.52, 0.5}, 256);
  EXPECT_NEAR(r.value, 0.04, r.error + 1e-12);
  EXPECT_NEAR(r.flat, 0.04, 1e-15);
}

TEST(BumpDistance, BumpOnlyLengthens) {
  const auto b = BumpProfile::with_default_alpha(0.1, 4096.0);
  CounterStream s(3, StreamTag::Aux, 0);
  for (int i = 0; i < 10; ++i) {
    const std::vector<double> x{0.4 + 0.2 * s.uniform(), 0.4 + 0.2 * s.uniform()};
    const std::vector<double> y{0.4 + 0.2 * s.uniform(), 0.4 + 0.2 * s.uniform()};
    const auto r = bump_distance(b, x, y, 256);
    EXPECT_GE(r.value + r.error, r.flat);
    EXPECT_LE(r.value - r.error, bump_chord_length(b, x, y) + 1e-12);
  }
  // Segment far from the bump: exact flat distance.
  const auto far = bump_distance(b, {0.05, 0.05}, {0.1, 0.05}, 256);
  EXPECT_TRUE(far.exact);
  EXPECT_NEAR(far.value, 0.05, 1e-15);
}

TEST(ChordTable, UpperBoundsTheChordTightly) {
  const auto b = BumpProfile::with_default_alpha(0.05, 4096.0);
  const ChordTable t(b);
  CounterStream s(4, StreamTag::Aux, 0);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const std::vector<double> x{s.uniform(), s.uniform()};
    const std::vector<double> y{0.5 + 0.2 * (s.uniform() - 0.5), 0.5 + 0.2 * (s.uniform() - 0.5)};
    const double exact = bump_chord_length(b, x, y);
    const double up = t.upper(x.data(), y.data(), 2);
    EXPECT_GE(up, exact - 1e-14);
    worst = std::max(worst, up - exact);
  }
  EXPECT_LE(worst, 4.0 * t.slack() + 1e-12);
  EXPECT_LT(t.slack(), 1e-3 * b.amplitude() * b.r_bump);
}

TEST(Coupling, NoBumpMeansIdenticalGraphs) {
  CouplingConfig cc;
  cc.n = 300;
  cc.trials = 3;
  cc.atom_mass = 0.01;
  cc.profile = BumpProfile(0.0, 0.0, 4096.0);
  const auto rep = coupled_graphs(cc);
  EXPECT_EQ(rep.mismatch_count, 0u);
  EXPECT_EQ(rep.mean_removed, 0.0);
  EXPECT_EQ(rep.subset_violations, 0u);
}

TEST(Coupling, BumpGraphIsASubgraph) {
  CouplingConfig cc;
  cc.n = 400;
  cc.trials = 4;
  cc.grid_resolution = 256;
  cc.atom_mass = std::log(400.0) / (8.0 * 400.0);
  cc.profile = BumpProfile::with_default_alpha(2.0 / std::sqrt(400.0), 4096.0);
  const auto rep = coupled_graphs(cc);
  EXPECT_EQ(rep.trials, 4u);
  EXPECT_EQ(rep.subset_violations, 0u);
  for (const auto& t : rep.per_trial) {
    EXPECT_EQ(t.mismatch, t.removed > 0);
    EXPECT_GE(t.expected_removed_bound, 0.0);
    if (!t.atoms_hit) {
      EXPECT_FALSE(t.both_hit);
    }
  }
  std::ostringstream os;
  write_coupling_csv(os, cc, rep);
  const std::string text = os.str();
  EXPECT_NE(text.find("trial,mismatch,removed,atoms_hit,both_hit,subset_violations,expected_removed_bound\n"),
            std::string::npos);
  EXPECT_EQ(text.rfind("# n=400 d=2", 0), 0u);
}

TEST(Coupling, AtomHitProbability) {
  EXPECT_DOUBLE_EQ(atom_hit_probability(1, 0.25), 0.5);
  EXPECT_NEAR(atom_hit_probability(2000, 1e-3), 1.0 - std::pow(0.998, 2000), 1e-12);
  EXPECT_EQ(atom_hit_probability(10, 0.0), 0.0);
  const auto pts = atom_points(3, 0.02);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0], (std::vector<double>{0.48, 0.5, 0.5}));
  EXPECT_EQ(pts[1], (std::vector<double>{0.52, 0.5, 0.5}));
}
