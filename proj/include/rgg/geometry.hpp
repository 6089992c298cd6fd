#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rgg/bump.hpp"
#include "rgg/rng.hpp"

namespace rgg::geometry {

enum class Chart { Torus, Sphere };

/// A point in the chart of its manifold. Torus coordinates are wrapped into
/// [0,1)^d; sphere points are unit vectors in R^{d+1}.
struct Point {
  Chart chart = Chart::Torus;
  std::vector<double> coords;

  static Point torus(std::vector<double> c);
  static Point sphere(std::vector<double> c);

  std::size_t size() const { return coords.size(); }
  bool operator==(const Point& o) const;
};

enum class ManifoldKind { FlatTorus, Sphere, BumpTorus };

class ManifoldModel {
 public:
  static ManifoldModel flat_torus(int d);
  static ManifoldModel sphere(int d, double kappa0);
  /// Flat torus with a conformal bump centred at (1/2, ..., 1/2).
  static ManifoldModel bump_torus(int d, lowerbound::BumpProfile profile, int grid_resolution,
                                  double rinj_lower = 0.25);

  ManifoldKind kind() const { return kind_; }
  int dim() const { return d_; }
  /// Ambient coordinate count of a point: d for the torus charts, d+1 for the sphere.
  int coord_dim() const { return kind_ == ManifoldKind::Sphere ? d_ + 1 : d_; }
  double kappa() const { return kappa_; }
  double kappa0() const { return kappa0_; }
  double rinj() const { return rinj_; }
  double diam() const { return diam_; }
  const lowerbound::BumpProfile& bump() const { return bump_; }
  int grid_resolution() const { return grid_res_; }
  Chart chart() const { return kind_ == ManifoldKind::Sphere ? Chart::Sphere : Chart::Torus; }

  /// Text descriptor used in graph headers and configs, e.g. "torus:2".
  std::string descriptor() const;
  static ManifoldModel from_descriptor(const std::string& s);

  bool operator==(const ManifoldModel& o) const;

 private:
  ManifoldKind kind_ = ManifoldKind::FlatTorus;
  int d_ = 2;
  double kappa_ = 0.0;
  double kappa0_ = 0.0;
  double rinj_ = 0.5;
  double diam_ = 0.0;
  lowerbound::BumpProfile bump_{};
  int grid_res_ = 0;
};

struct Atom {
  Point point;
  double mass = 0.0;
};

enum class MeasureKind { Uniform, UniformWithAtoms };

struct SamplingMeasure {
  MeasureKind kind = MeasureKind::Uniform;
  std::vector<Atom> atoms;
  /// Lower Ahlfors constant and radius: mu(B_r) >= c_mu r^d for r <= r_mu.
  double c_mu = 0.0;
  double r_mu = 0.0;

  static SamplingMeasure uniform(const ManifoldModel& m);
  static SamplingMeasure with_atoms(const ManifoldModel& m, std::vector<Atom> atoms);

  double atom_mass() const;
  /// mu_min(r) = c_mu r^d, the guaranteed ball mass at radius r <= r_mu.
  double mu_min(double r, int d) const;
};

/// Volume of the Euclidean unit ball in R^d.
double unit_ball_volume(int d);

double distance(const ManifoldModel& m, const Point& x, const Point& y);

/// Raw-coordinate distance for the flat torus and the sphere (hot loops).
double torus_distance(const double* x, const double* y, int d);
double sphere_distance(const double* x, const double* y, int ambient, double kappa0);

/// Exponential map. For the sphere, v is an ambient vector tangent at p whose
/// Euclidean norm is the intrinsic length.
Point exp_map(const ManifoldModel& m, const Point& p, const std::vector<double>& v);

/// Third side of the model-space triangle with sides a, b and included angle theta.
double opposite_side(double kappa, double theta, double a, double b);

/// Angle at the common vertex of sides a, b in the model triangle with opposite side c.
double comparison_angle(double kappa, double a, double b, double c);

Point sample_point(const SamplingMeasure& mu, const ManifoldModel& m, CounterStream& stream);

}  // namespace rgg::geometry
