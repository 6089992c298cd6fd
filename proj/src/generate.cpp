#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rgg/errors.hpp"
#include "rgg/latent.hpp"
#include "rgg/parallel.hpp"
#include "rgg/rng.hpp"

namespace rgg {

using geometry::ManifoldKind;
using geometry::ManifoldModel;
using geometry::Point;

LatentPositions::LatentPositions(ManifoldModel model, std::vector<Point> points)
    : model_(std::move(model)), n_(points.size()), k_(model_.coord_dim()) {
  data_.reserve(n_ * static_cast<std::size_t>(k_));
  for (const auto& p : points) {
    if (p.size() != static_cast<std::size_t>(k_)) throw InvalidInput("latent point dimension mismatch");
    data_.insert(data_.end(), p.coords.begin(), p.coords.end());
  }
}

Point LatentPositions::point(std::uint32_t i) const {
  Point p;
  p.chart = model_.chart();
  p.coords.assign(coords(i), coords(i) + k_);
  return p;
}

double LatentPositions::distance(std::uint32_t i, std::uint32_t j) const {
  switch (model_.kind()) {
    case ManifoldKind::FlatTorus:
      return geometry::torus_distance(coords(i), coords(j), k_);
    case ManifoldKind::Sphere:
      return geometry::sphere_distance(coords(i), coords(j), k_, model_.kappa0());
    case ManifoldKind::BumpTorus:
      return geometry::distance(model_, point(i), point(j));
  }
  return 0.0;
}

double LatentPositions::distance_to(std::uint32_t i, const Point& x) const {
  return geometry::distance(model_, point(i), x);
}

std::vector<Point> sample_latent(const ManifoldModel& m, const geometry::SamplingMeasure& mu,
                                 std::uint32_t n, std::uint64_t seed) {
  std::vector<Point> pts(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      CounterStream s(seed, StreamTag::Point, i);
      pts[i] = geometry::sample_point(mu, m, s);
    }
  });
  return pts;
}

bool bump_edge(const ManifoldModel& m, const double* xi, const double* xj, const ConnectionFunction& p,
               double q, double u, double* d_out) {
  const int d = m.dim();
  const double d1 = geometry::torus_distance(xi, xj, d);
  if (u >= q * p(d1)) {
    if (d_out) *d_out = d1;
    return false;
  }
  std::vector<double> a(xi, xi + d), b(xj, xj + d);
  return bump_edge_with_chord(m, xi, xj, p, q, u, lowerbound::bump_chord_length(m.bump(), a, b),
                              d_out);
}

bool bump_edge_with_chord(const ManifoldModel& m, const double* xi, const double* xj,
                          const ConnectionFunction& p, double q, double u, double chord,
                          double* d_out) {
  const int d = m.dim();
  const double d1 = geometry::torus_distance(xi, xj, d);
  if (u >= q * p(d1)) {
    if (d_out) *d_out = d1;
    return false;
  }
  if (u < q * p(chord)) {
    if (d_out) *d_out = chord;
    return true;
  }
  const std::vector<double> a(xi, xi + d), b(xj, xj + d);
  const double d2 = lowerbound::bump_distance(m.bump(), a, b, m.grid_resolution()).value;
  if (d_out) *d_out = d2;
  return u < q * p(d2);
}

Graph graph_from_latent(const LatentPositions& latent, const ConnectionFunction& p, double q,
                        std::uint64_t edge_seed) {
  if (!(q > 0.0 && q <= 1.0)) throw InvalidInput("sparsity must lie in (0,1]");
  const std::uint32_t n = latent.size();
  const ManifoldModel& m = latent.model();
  const int k = latent.coord_dim();
  std::vector<std::vector<Vertex>> upper(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const double* xi = latent.coords(static_cast<std::uint32_t>(i));
      auto& row = upper[i];
      for (std::uint32_t j = static_cast<std::uint32_t>(i) + 1; j < n; ++j) {
        const double u = pair_uniform(edge_seed, static_cast<std::uint32_t>(i), j);
        if (u >= q) continue;
        const double* xj = latent.coords(j);
        bool edge = false;
        switch (m.kind()) {
          case ManifoldKind::FlatTorus:
            edge = u < q * p(geometry::torus_distance(xi, xj, k));
            break;
          case ManifoldKind::Sphere:
            edge = u < q * p(geometry::sphere_distance(xi, xj, k, m.kappa0()));
            break;
          case ManifoldKind::BumpTorus:
            edge = bump_edge(m, xi, xj, p, q, u);
            break;
        }
        if (edge) row.push_back(j);
      }
    }
  });
  return Graph::from_upper_rows(n, upper, q, edge_seed);
}

GeneratedGraph generate_graph(const ManifoldModel& m, const geometry::SamplingMeasure& mu,
                              const ConnectionFunction& p, double q, std::uint32_t n,
                              std::uint64_t seed) {
  if (n < 2) throw InvalidInput("graph needs at least two vertices");
  LatentPositions latent(m, sample_latent(m, mu, n, seed));
  Graph g = graph_from_latent(latent, p, q, seed);
  return {std::move(g), std::move(latent)};
}

void write_latent_csv(const std::string& path, const LatentPositions& latent) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  std::fprintf(f, "vertex");
  for (int c = 0; c < latent.coord_dim(); ++c) std::fprintf(f, ",c%d", c + 1);
  std::fprintf(f, "\n");
  for (std::uint32_t i = 0; i < latent.size(); ++i) {
    std::fprintf(f, "%u", i);
    for (int c = 0; c < latent.coord_dim(); ++c) std::fprintf(f, ",%.17g", latent.coords(i)[c]);
    std::fprintf(f, "\n");
  }
  if (std::fclose(f) != 0) throw std::runtime_error("write failed for " + path);
}

LatentPositions read_latent_csv(const std::string& path, const ManifoldModel& m) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  std::vector<Point> pts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    if (std::stoul(cell) != pts.size()) throw InvalidInput("latent rows out of order");
    Point p;
    p.chart = m.chart();
    while (std::getline(ss, cell, ',')) p.coords.push_back(std::stod(cell));
    if (p.size() != static_cast<std::size_t>(m.coord_dim())) throw InvalidInput("latent row width mismatch");
    pts.push_back(std::move(p));
  }
  return LatentPositions(m, std::move(pts));
}

KernelEstimate kernel_estimate(const ManifoldModel& m, const geometry::SamplingMeasure& mu,
                               const ConnectionFunction& p, const Point& x, const Point& y,
                               std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw InvalidInput("kernel estimate needs at least one sample");
  double sxy = 0, sxy2 = 0, sxx = 0, syy = 0, sg = 0, sg2 = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    CounterStream st(seed, StreamTag::Aux, s);
    const Point z = geometry::sample_point(mu, m, st);
    const double a = p(geometry::distance(m, x, z));
    const double b = p(geometry::distance(m, y, z));
    sxy += a * b;
    sxy2 += a * b * a * b;
    sxx += a * a;
    syy += b * b;
    const double g = 0.5 * (a - b) * (a - b);
    sg += g;
    sg2 += g * g;
  }
  const double N = static_cast<double>(samples);
  KernelEstimate k;
  k.samples = samples;
  k.xy = sxy / N;
  k.xx = sxx / N;
  k.yy = syy / N;
  k.gap = sg / N;
  if (samples > 1) {
    k.se_xy = std::sqrt(std::max(0.0, (sxy2 / N - k.xy * k.xy) / (N - 1)));
    k.se_gap = std::sqrt(std::max(0.0, (sg2 / N - k.gap * k.gap) / (N - 1)));
  }
  return k;
}

}  // namespace rgg
