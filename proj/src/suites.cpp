#include "rgg/suites.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <numbers>

#include "rgg/clustering.hpp"
#include "rgg/errors.hpp"
#include "rgg/geometry.hpp"
#include "rgg/graph.hpp"
#include "rgg/latent.hpp"
#include "rgg/parallel.hpp"
#include "rgg/params.hpp"
#include "rgg/rng.hpp"

namespace rgg::suites {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kPi = std::numbers::pi;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

using Vec3 = std::array<double, 3>;

Vec3 normalized(Vec3 v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / n, v[1] / n, v[2] / n};
}

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double wrap_delta(double t) {
  t = std::fabs(t);
  t -= std::floor(t);
  return std::min(t, 1.0 - t);
}

double torus_r_G(const ConnectionFunction& p) { return accessible_radius(p.r_p(), 0.5, 0.0, 0.5); }

}  // namespace

GeometryReport geometry_suite(const GeometryConfig& cfg) {
  const auto t0 = Clock::now();
  GeometryReport rep;
  const auto sphere = geometry::ManifoldModel::sphere(2, 1.0);
  CounterStream rs(cfg.seed, StreamTag::Aux, 0x47454f4d'00000000ull);
  const double A6_limit = kPi / 8.0;
  const double side_limit = kPi / 4.0;
  std::size_t draw = 0;
  while (rep.triangles < cfg.triangles) {
    const int regime = static_cast<int>(draw++ % 3);
    const Vec3 p = normalized({rs.normal(), rs.normal(), rs.normal()});
    Vec3 r{rs.normal(), rs.normal(), rs.normal()};
    const double dot = r[0] * p[0] + r[1] * p[1] + r[2] * p[2];
    const Vec3 e1 = normalized({r[0] - dot * p[0], r[1] - dot * p[1], r[2] - dot * p[2]});
    const Vec3 e2 = cross(p, e1);
    const double a = cfg.max_side * (1.0 - rs.uniform());
    double b = 0.0, theta = 0.0;
    if (regime == 0) {
      b = cfg.max_side * (1.0 - rs.uniform());
      theta = kPi * rs.uniform();
    } else if (regime == 1) {
      // Near-degenerate thin triangles, where c <= a / 2 is common.
      b = std::min(a * (0.5 + rs.uniform()), cfg.max_side * (1.0 - 1e-12));
      theta = rs.uniform();
    } else {
      b = 0.25 * a * (1.0 - rs.uniform());
      theta = kPi * rs.uniform();
    }
    std::vector<double> va(3), vb(3);
    for (int i = 0; i < 3; ++i) {
      va[i] = a * e1[i];
      vb[i] = b * (std::cos(theta) * e1[i] + std::sin(theta) * e2[i]);
    }
    const auto P = geometry::Point::sphere({p[0], p[1], p[2]});
    const auto X = geometry::exp_map(sphere, P, va);
    const auto Y = geometry::exp_map(sphere, P, vb);
    const double c = geometry::distance(sphere, X, Y);
    if (c >= cfg.max_side) {
      ++rep.rejected;
      continue;
    }
    ++rep.triangles;
    const double os_pos = geometry::opposite_side(1.0, theta, a, b);
    const double os_neg = geometry::opposite_side(-1.0, theta, a, b);
    const double err = std::fabs(c - os_pos);
    rep.max_exact_error = std::max(rep.max_exact_error, err);
    if (err > cfg.exact_tol) ++rep.exact_violations;
    if (os_pos > c + cfg.sandwich_tol || c > os_neg + cfg.sandwich_tol) ++rep.sandwich_violations;

    if (a < A6_limit && b < A6_limit) {
      const double flat2 = a * a + b * b - 2.0 * a * b * std::cos(theta);
      const double bound = 2.0 * std::pow(std::max(a, b), 4);
      for (double side : {c, os_neg}) {
        ++rep.remainder_checked;
        if (std::fabs(side * side - flat2) > bound) ++rep.remainder_violations;
      }
    }
    if (a < side_limit && b < side_limit && c <= a / 2.0) {
      ++rep.angle_checked;
      if (theta > 2.0 * c / a) ++rep.angle_violations;
    }
    if (a < side_limit && b <= a / 4.0) {
      ++rep.expansion_checked;
      const double bc = b * std::fabs(std::cos(theta));
      const double mid = a - c - b * std::cos(theta);
      const double lo = -(7.0 / 6.0) * b * b / a - (b * b / 3.0) * bc;
      const double hi = kPi * (b / a) * bc;
      if (mid < lo - cfg.sandwich_tol || mid > hi + cfg.sandwich_tol) ++rep.expansion_violations;
    }
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

TorusKernelTable::TorusKernelTable(const ConnectionFunction& p, int k) : k_(k) {
  if (k < 4 || k % 2 != 0) throw InvalidInput("kernel grid must be even and at least 4");
  const std::size_t K = static_cast<std::size_t>(k);
  std::vector<double> f(K * K);
  const double h = 1.0 / k;
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < K; ++j) {
      const double x = wrap_delta(i * h);
      const double y = wrap_delta(j * h);
      f[i * K + j] = p(std::hypot(x, y));
    }
  const int half = k / 2 + 1;
  table_.assign(static_cast<std::size_t>(half) * half, 0.0);
  parallel_for(static_cast<std::size_t>(half), [&](std::size_t b, std::size_t e) {
    for (std::size_t di = b; di < e; ++di)
      for (std::size_t dj = 0; dj < static_cast<std::size_t>(half); ++dj) {
        double s = 0.0;
        for (std::size_t i = 0; i < K; ++i) {
          const double* fr = &f[i * K];
          const double* gr = &f[((i + K - di) % K) * K];
          for (std::size_t j = 0; j < dj; ++j) s += fr[j] * gr[j + K - dj];
          for (std::size_t j = dj; j < K; ++j) s += fr[j] * gr[j - dj];
        }
        table_[di * half + dj] = s * h * h;
      }
  });
}

double TorusKernelTable::operator()(double dx, double dy) const {
  const int half = k_ / 2 + 1;
  const double x = wrap_delta(dx) * k_;
  const double y = wrap_delta(dy) * k_;
  const int i = std::min(static_cast<int>(x), half - 2);
  const int j = std::min(static_cast<int>(y), half - 2);
  const double fx = x - i, fy = y - j;
  auto at = [&](int a, int b) { return table_[static_cast<std::size_t>(a) * half + b]; };
  return (1 - fx) * (1 - fy) * at(i, j) + fx * (1 - fy) * at(i + 1, j) +
         (1 - fx) * fy * at(i, j + 1) + fx * fy * at(i + 1, j + 1);
}

ConcentrationReport concentration_suite(const ConcentrationConfig& cfg) {
  const auto t0 = Clock::now();
  const auto p = ConnectionFunction::from_descriptor(cfg.connection);
  const auto torus = geometry::ManifoldModel::flat_torus(2);
  const auto mu = geometry::SamplingMeasure::uniform(torus);
  const std::uint32_t nU = cfg.U, nV = cfg.V;
  const auto pts = sample_latent(torus, mu, nU + nV, cfg.seed);
  const double ln = std::log(cfg.n_log);

  ConcentrationReport rep;
  rep.redraws = cfg.redraws;
  rep.fe = fluctuation_scale(cfg.n_log, cfg.q, nU);
  rep.cn_bound = ln / std::sqrt(cfg.q * cfg.q * nU);
  rep.common_precondition = cfg.q * cfg.q * nU >= 25.0 * ln;

  // Edge probabilities and expectations for the fixed latent points.
  std::vector<double> prob(static_cast<std::size_t>(nV) * nU);
  std::vector<double> mean_deg(nV, 0.0);
  for (std::uint32_t v = 0; v < nV; ++v)
    for (std::uint32_t u = 0; u < nU; ++u) {
      const double d = geometry::torus_distance(pts[nU + v].coords.data(), pts[u].coords.data(), 2);
      prob[static_cast<std::size_t>(v) * nU + u] = p(d);
      mean_deg[v] += p(d);
    }
  for (auto& m : mean_deg) m /= nU;
  const TorusKernelTable K(p, cfg.kernel_grid);
  std::vector<double> kernel(static_cast<std::size_t>(nV) * nV, 0.0);
  for (std::uint32_t a = 0; a < nV; ++a)
    for (std::uint32_t b = a + 1; b < nV; ++b)
      kernel[static_cast<std::size_t>(a) * nV + b] =
          K(pts[nU + a].coords[0] - pts[nU + b].coords[0], pts[nU + a].coords[1] - pts[nU + b].coords[1]);

  const std::size_t words = (nU + 63) / 64;
  std::vector<std::uint64_t> bits(static_cast<std::size_t>(nV) * words);
  std::vector<double> row_fluct(nV), row_common(nV);
  for (std::size_t r = 0; r < cfg.redraws; ++r) {
    const std::uint64_t edge_seed = cfg.seed * 0x9E3779B97F4A7C15ull + 0x434f4e43'00000000ull + r;
    parallel_for(nV, [&](std::size_t b, std::size_t e) {
      for (std::size_t v = b; v < e; ++v) {
        std::uint64_t* row = &bits[v * words];
        std::fill(row, row + words, 0);
        std::uint32_t deg = 0;
        for (std::uint32_t u = 0; u < nU; ++u) {
          const double U = pair_uniform(edge_seed, u, nU + static_cast<std::uint32_t>(v));
          if (U < cfg.q * prob[v * nU + u]) {
            row[u / 64] |= 1ull << (u % 64);
            ++deg;
          }
        }
        row_fluct[v] = std::fabs(deg / (cfg.q * nU) - mean_deg[v]);
      }
    });
    parallel_for(nV, [&](std::size_t b, std::size_t e) {
      for (std::size_t a = b; a < e; ++a) {
        double worst = 0.0;
        const std::uint64_t* ra = &bits[a * words];
        for (std::size_t c = a + 1; c < nV; ++c) {
          const std::uint64_t* rc = &bits[c * words];
          std::uint32_t cnt = 0;
          for (std::size_t w = 0; w < words; ++w) cnt += std::popcount(ra[w] & rc[w]);
          const double N = cnt / (cfg.q * cfg.q * nU);
          worst = std::max(worst, std::fabs(N - kernel[a * nV + c]));
        }
        row_common[a] = worst;
      }
    });
    const double mf = *std::max_element(row_fluct.begin(), row_fluct.end());
    const double mc = *std::max_element(row_common.begin(), row_common.end());
    rep.max_fluctuation = std::max(rep.max_fluctuation, mf);
    rep.max_common = std::max(rep.max_common, mc);
    if (mf > rep.fe) ++rep.fluctuation_violations;
    if (mc > rep.cn_bound) ++rep.common_violations;
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

KernelGapReport kernel_gap_suite(const KernelGapConfig& cfg) {
  const auto t0 = Clock::now();
  const auto p = ConnectionFunction::from_descriptor(cfg.connection);
  const auto torus = geometry::ManifoldModel::flat_torus(2);
  const auto mu = geometry::SamplingMeasure::uniform(torus);
  KernelGapReport rep;
  rep.pairs = cfg.pairs;
  rep.r_G = torus_r_G(p);
  rep.c = mu.mu_min(rep.r_G, 2) * p.ell_p() * p.ell_p() / (2.0 * kPi * kPi);
  rep.min_slack = std::numeric_limits<double>::infinity();
  CounterStream rs(cfg.seed, StreamTag::Aux, 0x4b474150'00000000ull);
  for (std::size_t i = 0; i < cfg.pairs; ++i) {
    const auto x = geometry::Point::torus({rs.uniform(), rs.uniform()});
    const auto y = geometry::Point::torus({rs.uniform(), rs.uniform()});
    const double d = geometry::distance(torus, x, y);
    const auto est = kernel_estimate(torus, mu, p, x, y, cfg.samples, cfg.seed * 1000003ull + i);
    const double bound = rep.c * std::min(rep.r_G * rep.r_G, d * d);
    const double slack = est.gap - bound + cfg.se_multiple * est.se_gap;
    rep.min_slack = std::min(rep.min_slack, slack);
    if (slack < 0.0) ++rep.violations;
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

PlantedReport planted_cluster_suite(const PlantedConfig& cfg) {
  const auto t0 = Clock::now();
  const auto p = ConnectionFunction::from_descriptor(cfg.connection);
  const auto torus = geometry::ManifoldModel::flat_torus(2);
  PlantedReport rep;
  rep.r_G = torus_r_G(p);
  const double ball = cfg.c_gap * cfg.eta * cfg.eta;
  const double far_min = 4.0 * rep.r_G;
  if (!(ball < far_min)) throw ConfigError("planted disc must lie inside the far exclusion radius");
  const std::uint32_t nU = cfg.U, nV = cfg.m + cfg.far, n = nU + nV;
  for (std::size_t s = 0; s < cfg.seeds; ++s) {
    const std::uint64_t seed = cfg.first_seed + s;
    CounterStream rs(seed, StreamTag::Point, 0x504c4e54'00000000ull);
    const double cx = rs.uniform(), cy = rs.uniform();
    std::vector<geometry::Point> pts;
    pts.reserve(n);
    for (std::uint32_t u = 0; u < nU; ++u) pts.push_back(geometry::Point::torus({rs.uniform(), rs.uniform()}));
    for (std::uint32_t i = 0; i < cfg.m; ++i) {
      const double r = ball * std::sqrt(rs.uniform());
      const double t = 2.0 * kPi * rs.uniform();
      pts.push_back(geometry::Point::torus({cx + r * std::cos(t), cy + r * std::sin(t)}));
    }
    for (std::uint32_t i = 0; i < cfg.far;) {
      const double x = rs.uniform(), y = rs.uniform();
      if (std::hypot(wrap_delta(x - cx), wrap_delta(y - cy)) < far_min) continue;
      pts.push_back(geometry::Point::torus({x, y}));
      ++i;
    }
    const LatentPositions lat(torus, std::move(pts));
    std::vector<std::vector<Vertex>> upper(n);
    parallel_for(nU, [&](std::size_t b, std::size_t e) {
      for (std::size_t u = b; u < e; ++u)
        for (std::uint32_t v = nU; v < n; ++v)
          if (pair_uniform(seed, static_cast<std::uint32_t>(u), v) <
              p(lat.distance(static_cast<std::uint32_t>(u), v)))
            upper[u].push_back(v);
    });
    const Graph g = Graph::from_upper_rows(n, upper, 1.0, seed);
    VertexSet U(nU), V(nV);
    for (std::uint32_t u = 0; u < nU; ++u) U[u] = u;
    for (std::uint32_t v = 0; v < nV; ++v) V[v] = nU + v;
    const auto cl = clustering::generate_cluster(g, U, V, cfg.eta, cfg.c_gap);
    PlantedRun run;
    run.seed = seed;
    run.size = cl.members.size();
    for (Vertex v : cl.members) {
      run.radius = std::max(run.radius, lat.distance(cl.center, v));
      if (v < nU + cfg.m) ++run.planted_members;
    }
    run.ok = run.radius <= cfg.eta && run.size >= cfg.m;
    if (run.ok) ++rep.successes;
    rep.runs.push_back(run);
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

}  // namespace rgg::suites
