#include "rgg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "rgg/errors.hpp"

namespace rgg::geometry {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap01(double x) {
  double w = x - std::floor(x);
  if (w >= 1.0) w = 0.0;
  return w;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_same(const ManifoldModel& m, const Point& x, const Point& y) {
  const auto k = static_cast<std::size_t>(m.coord_dim());
  if (x.size() != k || y.size() != k) {
    throw InvalidInput("point dimension does not match manifold");
  }
}

}  // namespace

Point Point::torus(std::vector<double> c) {
  for (double& v : c) v = wrap01(v);
  return Point{Chart::Torus, std::move(c)};
}

Point Point::sphere(std::vector<double> c) {
  double s = 0.0;
  for (double v : c) s += v * v;
  s = std::sqrt(s);
  if (!(s > 0.0)) throw InvalidInput("zero vector is not a sphere point");
  for (double& v : c) v /= s;
  return Point{Chart::Sphere, std::move(c)};
}

bool Point::operator==(const Point& o) const {
  if (chart != o.chart || coords.size() != o.coords.size()) return false;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    double diff = std::abs(coords[i] - o.coords[i]);
    if (chart == Chart::Torus) diff = std::min(diff, 1.0 - diff);
    if (diff > 1e-12) return false;
  }
  return true;
}

double unit_ball_volume(int d) {
  return std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

ManifoldModel ManifoldModel::flat_torus(int d) {
  if (d < 1) throw InvalidInput("dimension must be positive");
  ManifoldModel m;
  m.kind_ = ManifoldKind::FlatTorus;
  m.d_ = d;
  m.kappa_ = 0.0;
  m.rinj_ = 0.5;
  m.diam_ = std::sqrt(static_cast<double>(d)) / 2.0;
  return m;
}

ManifoldModel ManifoldModel::sphere(int d, double kappa0) {
  if (d < 1) throw InvalidInput("dimension must be positive");
  if (!(kappa0 > 0.0)) throw InvalidInput("sphere curvature must be positive");
  ManifoldModel m;
  m.kind_ = ManifoldKind::Sphere;
  m.d_ = d;
  m.kappa_ = kappa0;
  m.kappa0_ = kappa0;
  m.rinj_ = kPi / std::sqrt(kappa0);
  m.diam_ = m.rinj_;
  return m;
}

ManifoldModel ManifoldModel::bump_torus(int d, lowerbound::BumpProfile profile, int grid_resolution,
                                        double rinj_lower) {
  if (d != 2 && d != 3) throw InvalidInput("bump torus supports d = 2 or 3");
  ManifoldModel m = flat_torus(d);
  m.kind_ = ManifoldKind::BumpTorus;
  m.kappa_ = profile.kappa;
  m.bump_ = profile;
  m.grid_res_ = grid_resolution;
  m.rinj_ = rinj_lower;
  m.diam_ = std::sqrt(static_cast<double>(d)) / 2.0 * std::exp(profile.amplitude());
  return m;
}

std::string ManifoldModel::descriptor() const {
  switch (kind_) {
    case ManifoldKind::FlatTorus:
      return "torus:" + std::to_string(d_);
    case ManifoldKind::Sphere:
      return "sphere:" + std::to_string(d_) + ":" + fmt_double(kappa0_);
    case ManifoldKind::BumpTorus:
      return "bump:" + std::to_string(d_) + ":" + fmt_double(bump_.r_bump) + ":" +
             fmt_double(bump_.alpha) + ":" + fmt_double(bump_.kappa) + ":" +
             std::to_string(grid_res_) + ":" + fmt_double(rinj_);
  }
  return {};
}

ManifoldModel ManifoldModel::from_descriptor(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  try {
    if (parts.size() == 2 && parts[0] == "torus") return flat_torus(std::stoi(parts[1]));
    if (parts.size() == 3 && parts[0] == "sphere")
      return sphere(std::stoi(parts[1]), std::stod(parts[2]));
    if (parts.size() == 7 && parts[0] == "bump") {
      lowerbound::BumpProfile b(std::stod(parts[2]), std::stod(parts[3]), std::stod(parts[4]));
      return bump_torus(std::stoi(parts[1]), b, std::stoi(parts[5]), std::stod(parts[6]));
    }
  } catch (const std::logic_error&) {
    throw InvalidInput("bad manifold descriptor: " + s);
  }
  throw InvalidInput("bad manifold descriptor: " + s);
}

bool ManifoldModel::operator==(const ManifoldModel& o) const {
  return kind_ == o.kind_ && d_ == o.d_ && kappa_ == o.kappa_ && kappa0_ == o.kappa0_ &&
         rinj_ == o.rinj_ && diam_ == o.diam_ && bump_ == o.bump_ && grid_res_ == o.grid_res_;
}

SamplingMeasure SamplingMeasure::uniform(const ManifoldModel& m) {
  SamplingMeasure mu;
  const int d = m.dim();
  switch (m.kind()) {
    case ManifoldKind::FlatTorus:
      mu.c_mu = unit_ball_volume(d);
      mu.r_mu = 0.5;
      break;
    case ManifoldKind::BumpTorus:
      // Bump balls contain flat balls shrunk by exp(-amplitude).
      mu.c_mu = unit_ball_volume(d) * std::exp(-d * m.bump().amplitude());
      mu.r_mu = 0.5;
      break;
    case ManifoldKind::Sphere: {
      // Caps up to a hemisphere: mu(B_r) / r^d is decreasing, the hemisphere has mass 1/2.
      mu.r_mu = kPi / (2.0 * std::sqrt(m.kappa0()));
      mu.c_mu = 0.5 / std::pow(mu.r_mu, d);
      break;
    }
  }
  return mu;
}

SamplingMeasure SamplingMeasure::with_atoms(const ManifoldModel& m, std::vector<Atom> atoms) {
  SamplingMeasure mu = uniform(m);
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.mass > 0.0 && a.mass < 1.0)) throw InvalidInput("atom mass must lie in (0,1)");
    if (a.point.size() != static_cast<std::size_t>(m.coord_dim()))
      throw InvalidInput("atom dimension does not match manifold");
    total += a.mass;
  }
  if (total > 1.0 + 1e-15) throw InvalidInput("atom masses exceed 1");
  mu.kind = MeasureKind::UniformWithAtoms;
  mu.atoms = std::move(atoms);
  mu.c_mu *= std::max(0.0, 1.0 - total);
  return mu;
}

double SamplingMeasure::atom_mass() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.mass;
  return s;
}

double SamplingMeasure::mu_min(double r, int d) const { return c_mu * std::pow(r, d); }

double torus_distance(const double* x, const double* y, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    double a = std::abs(x[i] - y[i]);
    a = std::min(a, 1.0 - a);
    s += a * a;
  }
  return std::sqrt(s);
}

double sphere_distance(const double* x, const double* y, int ambient, double kappa0) {
  double s = 0.0;
  for (int i = 0; i < ambient; ++i) {
    const double t = x[i] - y[i];
    s += t * t;
  }
  // Chord form of arccos(<x,y>), accurate for nearby points.
  const double half = std::min(1.0, std::sqrt(s) / 2.0);
  return 2.0 * std::asin(half) / std::sqrt(kappa0);
}

double distance(const ManifoldModel& m, const Point& x, const Point& y) {
  check_same(m, x, y);
  switch (m.kind()) {
    case ManifoldKind::FlatTorus:
      return torus_distance(x.coords.data(), y.coords.data(), m.dim());
    case ManifoldKind::Sphere:
      return sphere_distance(x.coords.data(), y.coords.data(), m.dim() + 1, m.kappa0());
    case ManifoldKind::BumpTorus:
      return lowerbound::bump_distance(m.bump(), x.coords, y.coords, m.grid_resolution()).value;
  }
  return 0.0;
}

Point exp_map(const ManifoldModel& m, const Point& p, const std::vector<double>& v) {
  if (v.size() != p.size() || p.size() != static_cast<std::size_t>(m.coord_dim()))
    throw InvalidInput("tangent vector dimension does not match manifold");
  double norm = 0.0;
  for (double t : v) norm += t * t;
  norm = std::sqrt(norm);
  switch (m.kind()) {
    case ManifoldKind::FlatTorus: {
      if (norm >= m.rinj()) throw InvalidInput("tangent vector beyond injectivity radius");
      std::vector<double> c(p.coords);
      for (std::size_t i = 0; i < c.size(); ++i) c[i] += v[i];
      return Point::torus(std::move(c));
    }
    case ManifoldKind::Sphere: {
      if (norm >= m.rinj()) throw InvalidInput("tangent vector beyond injectivity radius");
      if (norm == 0.0) return p;
      const double t = norm * std::sqrt(m.kappa0());
      std::vector<double> c(p.size());
      for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = std::cos(t) * p.coords[i] + std::sin(t) * v[i] / norm;
      return Point::sphere(std::move(c));
    }
    case ManifoldKind::BumpTorus:
      throw Unsupported("exp_map has no closed form on the bump torus");
  }
  return p;
}

double opposite_side(double kappa, double theta, double a, double b) {
  if (!(a >= 0.0 && b >= 0.0)) throw InvalidInput("side lengths must be nonnegative");
  if (!(theta >= 0.0 && theta <= kPi)) throw InvalidInput("angle must lie in [0, pi]");
  const double s2 = std::sin(theta / 2.0) * std::sin(theta / 2.0);
  const double mx = std::max(a, b);
  if (std::abs(kappa) * mx * mx < 1e-8) {
    const double c2 = (a - b) * (a - b) + 4.0 * a * b * s2;
    return std::sqrt(std::max(0.0, c2));
  }
  const double k = std::sqrt(std::abs(kappa));
  if (kappa > 0.0) {
    if (a + b >= kPi / k) throw DomainError("sides too long for positive curvature");
    // Haversine form of the spherical law of cosines.
    const double h = std::sin((a - b) * k / 2.0);
    const double hav = h * h + std::sin(a * k) * std::sin(b * k) * s2;
    return 2.0 * std::asin(std::min(1.0, std::sqrt(std::max(0.0, hav)))) / k;
  }
  const double h = std::sinh((a - b) * k / 2.0);
  const double hav = h * h + std::sinh(a * k) * std::sinh(b * k) * s2;
  return 2.0 * std::asinh(std::sqrt(std::max(0.0, hav))) / k;
}

double comparison_angle(double kappa, double a, double b, double c) {
  if (!(a > 0.0 && b > 0.0 && c >= 0.0)) throw InvalidInput("sides must be positive");
  if (kappa > 0.0 && a + b >= kPi / std::sqrt(kappa))
    throw DomainError("sides too long for positive curvature");
  const double tol = 1e-12 * std::max({a, b, c, 1.0});
  if (c < std::abs(a - b) - tol || c > a + b + tol)
    throw DomainError("side lengths violate the triangle inequality");
  double lo = 0.0;
  double hi = kPi;
  if (c <= opposite_side(kappa, 0.0, a, b)) return 0.0;
  if (c >= opposite_side(kappa, kPi, a, b)) return kPi;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (opposite_side(kappa, mid, a, b) < c) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Point sample_point(const SamplingMeasure& mu, const ManifoldModel& m, CounterStream& stream) {
  if (mu.kind == MeasureKind::UniformWithAtoms && !mu.atoms.empty()) {
    const double w = stream.uniform();
    double threshold = 1.0 - mu.atom_mass();
    if (w > threshold) {
      for (const auto& a : mu.atoms) {
        threshold += a.mass;
        if (w <= threshold) return a.point;
      }
      return mu.atoms.back().point;
    }
  }
  if (m.kind() == ManifoldKind::Sphere) {
    std::vector<double> c(static_cast<std::size_t>(m.dim() + 1));
    double s = 0.0;
    do {
      s = 0.0;
      for (double& v : c) {
        v = stream.normal();
        s += v * v;
      }
    } while (s == 0.0);
    return Point::sphere(std::move(c));
  }
  std::vector<double> c(static_cast<std::size_t>(m.dim()));
  for (double& v : c) v = stream.uniform();
  return Point::torus(std::move(c));
}

}  // namespace rgg::geometry
