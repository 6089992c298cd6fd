#include "rgg/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "rgg/errors.hpp"
#include "rgg/geometry.hpp"
#include "rgg/latent.hpp"
#include "rgg/parallel.hpp"
#include "rgg/rng.hpp"

namespace rgg::lowerbound {

namespace {

constexpr std::uint64_t kTrialStream = 0x434f5550'00000000ull;

/// True when the min-image segment from x to y passes within r of some image
/// of the bump centre.
bool segment_hits(const double* x, const double* y, int d, double r) {
  double delta[3], base[3];
  for (int k = 0; k < d; ++k) {
    double t = y[k] - x[k];
    t -= std::round(t);
    delta[k] = t;
    base[k] = x[k];
  }
  const double len2 = [&] {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += delta[k] * delta[k];
    return s;
  }();
  // Every coordinate of the segment stays within 1/4 of its midpoint, so for
  // r < 1/4 only the centre image nearest the midpoint can be within r.
  const bool single = r < 0.25;
  const int images = single ? 1 : (d == 2 ? 9 : 27);
  for (int im = 0; im < images; ++im) {
    int code = im;
    double c[3];
    for (int k = 0; k < d; ++k) {
      c[k] = single ? 0.5 + std::round(base[k] + 0.5 * delta[k] - 0.5) : 0.5 + (code % 3 - 1);
      code /= 3;
    }
    double t = 0.0;
    if (len2 > 0.0) {
      for (int k = 0; k < d; ++k) t += (c[k] - base[k]) * delta[k];
      t = std::clamp(t / len2, 0.0, 1.0);
    }
    double dist2 = 0.0;
    for (int k = 0; k < d; ++k) {
      const double e = base[k] + t * delta[k] - c[k];
      dist2 += e * e;
    }
    if (dist2 < r * r) return true;
  }
  return false;
}

}  // namespace

std::vector<std::vector<double>> atom_points(int d, double offset) {
  std::vector<double> X(d, 0.5), Y(d, 0.5);
  X[0] -= offset;
  Y[0] += offset;
  return {X, Y};
}

double atom_hit_probability(std::uint32_t n, double m) {
  return 1.0 - std::pow(1.0 - 2.0 * m, static_cast<double>(n));
}

TrialOutcome coupled_trial(const CouplingConfig& cfg, std::uint32_t trial) {
  return coupled_trial(cfg, trial, ChordTable(cfg.profile));
}

TrialOutcome coupled_trial(const CouplingConfig& cfg, std::uint32_t trial, const ChordTable& table) {
  if (cfg.d != 2 && cfg.d != 3) throw InvalidInput("coupling supports d = 2 or 3");
  if (!(cfg.atom_mass >= 0.0 && 2.0 * cfg.atom_mass < 1.0)) throw InvalidInput("atom mass out of range");
  const auto flat = geometry::ManifoldModel::flat_torus(cfg.d);
  const auto bump = geometry::ManifoldModel::bump_torus(cfg.d, cfg.profile, cfg.grid_resolution);
  const auto atoms = atom_points(cfg.d, cfg.atom_offset);
  auto mu = geometry::SamplingMeasure::with_atoms(
      flat, {{geometry::Point::torus(atoms[0]), cfg.atom_mass},
             {geometry::Point::torus(atoms[1]), cfg.atom_mass}});
  const auto p = ConnectionFunction::exp_decay(cfg.p_scale, flat.diam(), flat.diam());

  CounterStream ts(cfg.seed, StreamTag::Aux, kTrialStream + trial);
  const std::uint64_t tseed = ts.bits();
  const auto pts = sample_latent(flat, mu, cfg.n, tseed);
  std::vector<double> X(static_cast<std::size_t>(cfg.n) * cfg.d);
  TrialOutcome out;
  bool hitX = false, hitY = false;
  for (std::uint32_t i = 0; i < cfg.n; ++i) {
    std::copy(pts[i].coords.begin(), pts[i].coords.end(), X.begin() + std::size_t{i} * cfg.d);
    hitX = hitX || pts[i] == geometry::Point::torus(atoms[0]);
    hitY = hitY || pts[i] == geometry::Point::torus(atoms[1]);
  }
  out.atoms_hit = hitX || hitY;
  out.both_hit = hitX && hitY;
  if (cfg.profile.flat()) return out;

  const double r = cfg.profile.r_bump;
  std::vector<std::size_t> removed(cfg.n, 0), violations(cfg.n, 0);
  std::vector<double> bound(cfg.n, 0.0);
  parallel_for(cfg.n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const double* xi = X.data() + i * cfg.d;
      for (std::uint32_t j = static_cast<std::uint32_t>(i) + 1; j < cfg.n; ++j) {
        const double* xj = X.data() + std::size_t{j} * cfg.d;
        if (!segment_hits(xi, xj, cfg.d, r)) continue;
        const double u = pair_uniform(tseed, static_cast<std::uint32_t>(i), j);
        const double d1 = geometry::torus_distance(xi, xj, cfg.d);
        const bool e1 = u < cfg.q * p(d1);
        const double ch = table.upper(xi, xj, cfg.d);
        const bool e2 = bump_edge_with_chord(bump, xi, xj, p, cfg.q, u, ch);
        removed[i] += e1 && !e2;
        violations[i] += e2 && !e1;
        bound[i] += cfg.q * (p(d1) - p(ch));
      }
    }
  });
  for (std::uint32_t i = 0; i < cfg.n; ++i) {
    out.removed += removed[i];
    out.subset_violations += violations[i];
    out.expected_removed_bound += bound[i];
  }
  out.mismatch = out.removed > 0 || out.subset_violations > 0;
  return out;
}

CouplingReport coupled_graphs(const CouplingConfig& cfg) {
  CouplingReport rep;
  rep.trials = cfg.trials;
  const ChordTable table(cfg.profile);
  for (std::uint32_t t = 0; t < cfg.trials; ++t) {
    TrialOutcome o = coupled_trial(cfg, t, table);
    rep.mismatch_count += o.mismatch;
    rep.subset_violations += o.subset_violations;
    rep.mean_removed += static_cast<double>(o.removed);
    rep.atoms_hit += o.atoms_hit;
    rep.both_hit += o.both_hit;
    rep.mean_expected_removed_bound += o.expected_removed_bound;
    rep.per_trial.push_back(o);
  }
  if (cfg.trials > 0) {
    rep.mean_removed /= cfg.trials;
    rep.mean_expected_removed_bound /= cfg.trials;
  }
  return rep;
}

void write_coupling_csv(std::ostream& os, const CouplingConfig& cfg, const CouplingReport& rep) {
  os.precision(17);
  os << "# n=" << cfg.n << " d=" << cfg.d << " r_bump=" << cfg.profile.r_bump
     << " alpha=" << cfg.profile.alpha << " kappa=" << cfg.profile.kappa << '\n';
  os << "# atom_mass=" << cfg.atom_mass << " atom_offset=" << cfg.atom_offset
     << " p_scale=" << cfg.p_scale << " q=" << cfg.q << " grid_resolution=" << cfg.grid_resolution
     << " seed=" << cfg.seed << '\n';
  os << "trial,mismatch,removed,atoms_hit,both_hit,subset_violations,expected_removed_bound\n";
  for (std::size_t t = 0; t < rep.per_trial.size(); ++t) {
    const auto& o = rep.per_trial[t];
    os << t << ',' << o.mismatch << ',' << o.removed << ',' << o.atoms_hit << ',' << o.both_hit
       << ',' << o.subset_violations << ',' << o.expected_removed_bound << '\n';
  }
}

SeparationCheck separation_check(const BumpProfile& b, int d, int grid_resolution, double offset) {
  const auto pts = atom_points(d, offset);
  const BumpDistance bd = bump_distance(b, pts[0], pts[1], grid_resolution);
  SeparationCheck c;
  c.value = bd.value;
  c.error = bd.error;
  c.excess = bd.value - bd.error - 2.0 * offset;
  c.bound = std::ldexp(1.0, -14) * std::min(b.kappa, 1.0) * std::pow(b.r_bump, 3);
  c.holds = c.excess >= c.bound;
  return c;
}

UpperCheck upper_check(const BumpProfile& b, const std::vector<double>& x,
                       const std::vector<double>& y, int grid_resolution) {
  const BumpDistance bd = bump_distance(b, x, y, grid_resolution);
  UpperCheck c;
  c.d1 = geometry::torus_distance(x.data(), y.data(), static_cast<int>(x.size()));
  c.d2 = bd.value;
  c.error = bd.error;
  c.bound = std::ldexp(1.0, -11) * b.kappa * std::pow(b.r_bump, 3);
  const double diff = c.d2 - c.d1;
  c.holds = diff >= -c.error && diff < c.bound + c.error;
  return c;
}

}  // namespace rgg::lowerbound
