#pragma once

#include <vector>

namespace rgg::lowerbound {

/// Standard smooth transition: 0 below 0, 1 at and above 1.
double transition(double x);
double transition_d1(double x);
double transition_d2(double x);

/// h * transition((x - a) / (b - a)).
double transition_scaled(double a, double b, double h, double x);

/// Radial profile of a conformal bump g2 = exp(2 psi(r)) g1.
struct BumpProfile {
  double r_bump = 0.0;
  double alpha = 0.0;
  double kappa = 1.0;

  BumpProfile() = default;
  /// Requires 0 <= alpha < 2^-12 kappa; alpha = 0 is the flat limit.
  BumpProfile(double r_bump, double alpha, double kappa);
  /// alpha = 3 * 2^-14 * kappa.
  static BumpProfile with_default_alpha(double r_bump, double kappa);

  double amplitude() const { return alpha * r_bump * r_bump; }
  /// Radius of the chart on which psi is evaluated.
  double chart_radius() const;
  bool flat() const { return r_bump <= 0.0 || alpha <= 0.0; }
  bool operator==(const BumpProfile&) const = default;
};

double bump_psi(const BumpProfile& b, double r);
double bump_psi_d1(const BumpProfile& b, double r);
double bump_psi_d2(const BumpProfile& b, double r);
/// psi without the chart check; zero outside the support.
double bump_psi_any(const BumpProfile& b, double r);

/// sup_r 3 e^{-4 psi} max{|psi'|/r, psi'^2, |psi''|}.
double curvature_certificate(const BumpProfile& b);

struct BumpDistance {
  double value = 0.0;
  double error = 0.0;
  double flat = 0.0;
  bool exact = false;  // segment misses the bump, value == flat
  bool coarse = false; // resolution diagnostic
};

/// Distance between torus-chart points x, y (d = 2 or 3) under the bump metric
/// centred at (1/2, ..., 1/2).
BumpDistance bump_distance(const BumpProfile& b, const std::vector<double>& x,
                           const std::vector<double>& y, int grid_resolution);

/// Length of the flat min-image segment from x to y under the bump metric.
/// An upper bound on the bump distance.
double bump_chord_length(const BumpProfile& b, const std::vector<double>& x,
                         const std::vector<double>& y);

/// Upper bound on bump_chord_length that is exact up to a certified
/// interpolation slack. Segments with both endpoints outside the bump disc
/// cross it completely, so their excess length depends only on the distance
/// of the line to the centre and is read from a table; other segments fall
/// back to quadrature.
class ChordTable {
 public:
  explicit ChordTable(const BumpProfile& b, int nodes_per_piece = 2048);
  /// Chord length of the min-image segment x -> y, d = x.size() = y.size().
  double upper(const double* x, const double* y, int d) const;
  /// Added to every tabulated value so the result never undercuts the chord.
  double slack() const { return slack_; }

 private:
  double excess(double s) const;
  BumpProfile b_;
  std::vector<double> knots_;  // piece boundaries in [0, r_bump]
  int nodes_;
  std::vector<double> table_;  // nodes_ + 1 values per piece
  double slack_ = 0.0;
};

}  // namespace rgg::lowerbound
