#include "rgg/bump.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rgg/errors.hpp"

namespace rgg::lowerbound {

namespace {

// Logistic pieces of the transition, written to avoid overflow near 0 and 1.
// tau(x) = 1 / (1 + exp(g)), g = 1/x - 1/(1-x).
double g_of(double x) { return 1.0 / x - 1.0 / (1.0 - x); }

double tau_core(double x) {
  const double g = g_of(x);
  if (g > 0) {
    const double e = std::exp(-g);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(g));
}

// tau (1 - tau), evaluated without cancellation.
double tau_var(double x) {
  const double g = g_of(x);
  const double e = std::exp(-std::abs(g));
  return e / ((1.0 + e) * (1.0 + e));
}

double h_of(double x) { return 1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x)); }
double hprime_of(double x) { return -2.0 / (x * x * x) + 2.0 / ((1.0 - x) * (1.0 - x) * (1.0 - x)); }

constexpr double kCenter = 0.5;

}  // namespace

double transition(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return tau_core(x);
}

double transition_d1(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return tau_var(x) * h_of(x);
}

double transition_d2(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double v = tau_var(x);
  if (v == 0.0) return 0.0;
  const double t = tau_core(x);
  const double h = h_of(x);
  return v * h * h * (1.0 - 2.0 * t) + v * hprime_of(x);
}

double transition_scaled(double a, double b, double h, double x) {
  if (!(a < b)) throw InvalidInput("transition requires a < b");
  return h * transition((x - a) / (b - a));
}

BumpProfile::BumpProfile(double r_bump_, double alpha_, double kappa_)
    : r_bump(r_bump_), alpha(alpha_), kappa(kappa_) {
  if (!(kappa > 0.0)) throw InvalidInput("curvature budget must be positive");
  if (!(r_bump >= 0.0)) throw InvalidInput("bump radius must be nonnegative");
  if (!(alpha >= 0.0 && alpha < std::ldexp(kappa, -12)))
    throw InvalidInput("bump amplitude must satisfy 0 <= alpha < 2^-12 kappa");
}

BumpProfile BumpProfile::with_default_alpha(double r_bump, double kappa) {
  return BumpProfile(r_bump, 3.0 * std::ldexp(kappa, -14), kappa);
}

double BumpProfile::chart_radius() const { return std::max(0.03, r_bump); }

namespace {

// Piece index and local coordinate of r. 0: flat, 1: rising, 2: plateau, 3: falling.
struct Piece {
  int kind;
  double s;
};

Piece piece_of(const BumpProfile& b, double r) {
  const double rb = b.r_bump;
  if (b.flat() || r < rb / 2.0 || r >= rb) return {0, 0.0};
  if (r < 2.0 * rb / 3.0) return {1, (r - rb / 2.0) / (rb / 6.0)};
  if (r < 5.0 * rb / 6.0) return {2, 0.0};
  return {3, (r - 5.0 * rb / 6.0) / (rb / 6.0)};
}

void check_chart(const BumpProfile& b, double r) {
  if (!(r >= 0.0 && r < b.chart_radius())) throw DomainError("radius outside the bump chart");
}

}  // namespace

double bump_psi_any(const BumpProfile& b, double r) {
  const Piece p = piece_of(b, r);
  const double a = b.amplitude();
  switch (p.kind) {
    case 1:
      return a * transition(p.s);
    case 2:
      return a;
    case 3:
      return a * (1.0 - transition(p.s));
    default:
      return 0.0;
  }
}

double bump_psi(const BumpProfile& b, double r) {
  check_chart(b, r);
  return bump_psi_any(b, r);
}

double bump_psi_d1(const BumpProfile& b, double r) {
  check_chart(b, r);
  const Piece p = piece_of(b, r);
  const double k = b.amplitude() * 6.0 / b.r_bump;
  if (p.kind == 1) return k * transition_d1(p.s);
  if (p.kind == 3) return -k * transition_d1(p.s);
  return 0.0;
}

double bump_psi_d2(const BumpProfile& b, double r) {
  check_chart(b, r);
  const Piece p = piece_of(b, r);
  const double k = b.amplitude() * 36.0 / (b.r_bump * b.r_bump);
  if (p.kind == 1) return k * transition_d2(p.s);
  if (p.kind == 3) return -k * transition_d2(p.s);
  return 0.0;
}

double curvature_certificate(const BumpProfile& b) {
  if (b.flat()) return 0.0;
  const double rb = b.r_bump;
  const int samples = 200000;
  double sup = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double r = rb / 2.0 + (rb / 2.0) * i / samples;
    if (r >= rb) break;
    const double p = bump_psi(b, r);
    const double d1 = bump_psi_d1(b, r);
    const double d2 = bump_psi_d2(b, r);
    const double v = 3.0 * std::exp(-4.0 * p) * std::max({std::abs(d1) / r, d1 * d1, std::abs(d2)});
    sup = std::max(sup, v);
  }
  return sup;
}

namespace {

using Vec = std::vector<double>;

double norm(const Vec& v) {
  double s = 0.0;
  for (double t : v) s += t * t;
  return std::sqrt(s);
}

// Distance from c to the segment P + t (Q - P), t in [0,1].
double segment_distance(const Vec& P, const Vec& Q, const Vec& c) {
  const std::size_t d = P.size();
  double dd = 0.0, dc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double di = Q[i] - P[i];
    dd += di * di;
    dc += di * (c[i] - P[i]);
  }
  const double t = dd > 0.0 ? std::clamp(dc / dd, 0.0, 1.0) : 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double e = P[i] + t * (Q[i] - P[i]) - c[i];
    s += e * e;
  }
  return std::sqrt(s);
}

// Bump length of the straight segment P -> Q for the bump centred at c.
double chord(const BumpProfile& b, const Vec& P, const Vec& Q, const Vec& c) {
  const std::size_t d = P.size();
  Vec D(d);
  double L2 = 0.0, dc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    D[i] = Q[i] - P[i];
    L2 += D[i] * D[i];
    dc += D[i] * (c[i] - P[i]);
  }
  const double L = std::sqrt(L2);
  if (L == 0.0 || b.flat()) return L;
  const double tstar = dc / L2;
  double rmin2 = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double e = P[i] + tstar * D[i] - c[i];
    rmin2 += e * e;
  }
  const double rb = b.r_bump;
  if (rmin2 >= rb * rb) return L;
  std::vector<double> cuts{0.0, 1.0, std::clamp(tstar, 0.0, 1.0)};
  for (double R : {rb, 5.0 * rb / 6.0, 2.0 * rb / 3.0, rb / 2.0}) {
    if (R * R <= rmin2) continue;
    const double w = std::sqrt(R * R - rmin2) / L;
    cuts.push_back(std::clamp(tstar - w, 0.0, 1.0));
    cuts.push_back(std::clamp(tstar + w, 0.0, 1.0));
  }
  std::sort(cuts.begin(), cuts.end());
  const double sq_off = rmin2;
  auto f = [&](double t) {
    const double u = (t - tstar) * L;
    return std::expm1(bump_psi_any(b, std::sqrt(sq_off + u * u)));
  };
  double excess = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] - cuts[k] <= 0.0) continue;
    excess += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[k], cuts[k + 1],
                                                                           3, 1e-12);
  }
  return L * (1.0 + excess);
}

// Image of the bump centre nearest to the segment P -> Q.
Vec nearest_center(const Vec& P, const Vec& Q) {
  const std::size_t d = P.size();
  Vec best(d, kCenter);
  double bd = std::numeric_limits<double>::infinity();
  const int combos = static_cast<int>(std::pow(3, d));
  for (int code = 0; code < combos; ++code) {
    Vec c(d);
    int k = code;
    for (std::size_t i = 0; i < d; ++i) {
      c[i] = kCenter + static_cast<double>(k % 3 - 1);
      k /= 3;
    }
    const double s = segment_distance(P, Q, c);
    if (s < bd) {
      bd = s;
      best = c;
    }
  }
  return best;
}

std::vector<std::array<int, 3>> stencil(int d) {
  std::vector<std::array<int, 3>> out;
  if (d == 2) {
    for (int i = -2; i <= 2; ++i)
      for (int j = -2; j <= 2; ++j) {
        if (i == 0 && j == 0) continue;
        const int ai = std::abs(i), aj = std::abs(j);
        if (std::max(ai, aj) == 1 || (ai + aj == 3)) out.push_back({i, j, 0});
      }
  } else {
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j)
        for (int k = -1; k <= 1; ++k)
          if (i || j || k) out.push_back({i, j, k});
  }
  return out;
}

// Lattice estimate of the bump length from P to Q on a box around the bump at c.
double lattice_length(const BumpProfile& b, const Vec& P, const Vec& Q, const Vec& c, double h) {
  const int d = static_cast<int>(P.size());
  const double half = b.r_bump + 4.0 * h;
  const int N = static_cast<int>(std::ceil(2.0 * half / h)) + 1;
  Vec base(d);
  for (int i = 0; i < d; ++i) base[i] = c[i] - half;
  const std::size_t total = d == 2 ? static_cast<std::size_t>(N) * N
                                   : static_cast<std::size_t>(N) * N * N;
  auto coords = [&](std::size_t id, Vec& z) {
    std::size_t r = id;
    for (int i = 0; i < d; ++i) {
      z[i] = base[i] + static_cast<double>(r % N) * h;
      r /= N;
    }
  };
  auto inside_box = [&](const Vec& z) {
    for (int i = 0; i < d; ++i)
      if (z[i] <= base[i] || z[i] >= base[i] + (N - 1) * h) return false;
    return true;
  };
  auto on_boundary = [&](std::size_t id) {
    std::size_t r = id;
    for (int i = 0; i < d; ++i) {
      const std::size_t k = r % N;
      if (k == 0 || k == static_cast<std::size_t>(N - 1)) return true;
      r /= N;
    }
    return false;
  };

  // Straight entry/exit legs: boundary nodes seen from an outside endpoint
  // without crossing the bump, or nearby nodes for an endpoint inside the box.
  auto legs = [&](const Vec& E) {
    std::vector<std::pair<std::size_t, double>> out;
    Vec z(d);
    if (inside_box(E)) {
      std::vector<long> idx(d);
      for (int i = 0; i < d; ++i) idx[i] = std::lround((E[i] - base[i]) / h);
      const int w = 3;
      const int span = 2 * w + 1;
      const int cnt = d == 2 ? span * span : span * span * span;
      for (int code = 0; code < cnt; ++code) {
        int k = code;
        std::size_t id = 0, mul = 1;
        bool ok = true;
        for (int i = 0; i < d; ++i) {
          const long v = idx[i] + (k % span) - w;
          k /= span;
          if (v < 0 || v >= N) ok = false;
          id += static_cast<std::size_t>(std::max(0L, v)) * mul;
          mul *= N;
        }
        if (!ok) continue;
        coords(id, z);
        out.emplace_back(id, chord(b, E, z, c));
      }
    } else {
      for (std::size_t id = 0; id < total; ++id) {
        if (!on_boundary(id)) continue;
        coords(id, z);
        if (segment_distance(E, z, c) >= b.r_bump) {
          double s = 0.0;
          for (int i = 0; i < d; ++i) s += (z[i] - E[i]) * (z[i] - E[i]);
          out.emplace_back(id, std::sqrt(s));
        }
      }
    }
    return out;
  };

  const auto src = legs(P);
  const auto dst = legs(Q);
  const auto st = stencil(d);
  std::vector<double> lens(st.size());
  for (std::size_t k = 0; k < st.size(); ++k)
    lens[k] = h * std::sqrt(double(st[k][0] * st[k][0] + st[k][1] * st[k][1] + st[k][2] * st[k][2]));

  std::vector<double> dist(total, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (auto [id, w] : src) {
    if (w < dist[id]) {
      dist[id] = w;
      pq.emplace(w, id);
    }
  }
  Vec z(d), mid(d);
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (du > dist[u]) continue;
    std::array<long, 3> iu{0, 0, 0};
    std::size_t r = u;
    for (int i = 0; i < d; ++i) {
      iu[i] = static_cast<long>(r % N);
      r /= N;
    }
    for (std::size_t k = 0; k < st.size(); ++k) {
      std::size_t id = 0, mul = 1;
      bool ok = true;
      double rr = 0.0;
      for (int i = 0; i < d; ++i) {
        const long v = iu[i] + st[k][i];
        if (v < 0 || v >= N) {
          ok = false;
          break;
        }
        id += static_cast<std::size_t>(v) * mul;
        mul *= N;
        const double m = base[i] + (static_cast<double>(iu[i]) + 0.5 * st[k][i]) * h - c[i];
        rr += m * m;
      }
      if (!ok) continue;
      const double w = lens[k] * std::exp(bump_psi_any(b, std::sqrt(rr)));
      const double nd = du + w;
      if (nd < dist[id]) {
        dist[id] = nd;
        pq.emplace(nd, id);
      }
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (auto [id, w] : dst) best = std::min(best, dist[id] + w);
  return best;
}

}  // namespace

double bump_chord_length(const BumpProfile& b, const std::vector<double>& x,
                         const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidInput("point dimension mismatch");
  const std::size_t d = x.size();
  Vec Q(d);
  for (std::size_t i = 0; i < d; ++i) {
    double t = y[i] - x[i];
    t -= std::round(t);
    Q[i] = x[i] + t;
  }
  return chord(b, x, Q, nearest_center(x, Q));
}

namespace {

// Integral over the whole line at distance s from the centre of expm1(psi).
double line_excess(const BumpProfile& b, double s) {
  const double rb = b.r_bump;
  if (s >= rb) return 0.0;
  std::vector<double> cuts{0.0};
  for (double R : {rb / 2.0, 2.0 * rb / 3.0, 5.0 * rb / 6.0, rb})
    if (R > s) cuts.push_back(std::sqrt(R * R - s * s));
  auto f = [&](double u) { return std::expm1(bump_psi_any(b, std::sqrt(s * s + u * u))); };
  double out = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    out += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[k], cuts[k + 1], 3,
                                                                         1e-12);
  return 2.0 * out;
}

}  // namespace

ChordTable::ChordTable(const BumpProfile& b, int nodes_per_piece) : b_(b), nodes_(nodes_per_piece) {
  if (nodes_ < 2) throw InvalidInput("chord table needs at least two nodes per piece");
  const double rb = b.r_bump;
  knots_ = {0.0, rb / 2.0, 2.0 * rb / 3.0, 5.0 * rb / 6.0, rb};
  if (b.flat()) return;
  table_.resize(4 * static_cast<std::size_t>(nodes_ + 1));
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i <= nodes_; ++i)
      table_[k * (nodes_ + 1) + i] =
          line_excess(b, knots_[k] + (knots_[k + 1] - knots_[k]) * i / nodes_);
  // Twice the worst midpoint and quarter-point deviation of the interpolant.
  double dev = 0.0;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < nodes_; ++i)
      for (double f : {0.25, 0.5, 0.75}) {
        const double s = knots_[k] + (knots_[k + 1] - knots_[k]) * (i + f) / nodes_;
        dev = std::max(dev, line_excess(b, s) - excess(s));
      }
  slack_ = 2.0 * dev + 1e-15;
}

double ChordTable::excess(double s) const {
  if (s >= knots_[4]) return 0.0;
  int k = 0;
  while (k < 3 && s >= knots_[k + 1]) ++k;
  const double t = (s - knots_[k]) / (knots_[k + 1] - knots_[k]) * nodes_;
  const int i = std::min(static_cast<int>(t), nodes_ - 1);
  const double w = t - i;
  const double* row = table_.data() + k * (nodes_ + 1);
  return (1.0 - w) * row[i] + w * row[i + 1];
}

double ChordTable::upper(const double* x, const double* y, int d) const {
  Vec P(x, x + d), Q(d);
  for (int i = 0; i < d; ++i) {
    double t = y[i] - x[i];
    t -= std::round(t);
    Q[i] = x[i] + t;
  }
  Vec D(d);
  for (int i = 0; i < d; ++i) D[i] = Q[i] - P[i];
  const double L = norm(D);
  if (b_.flat()) return L;
  const Vec c = nearest_center(P, Q);
  const double rb = b_.r_bump;
  if (segment_distance(P, Q, c) >= rb) return L;
  double ep = 0.0, eq = 0.0, dc = 0.0, L2 = L * L;
  for (int i = 0; i < d; ++i) {
    ep += (P[i] - c[i]) * (P[i] - c[i]);
    eq += (Q[i] - c[i]) * (Q[i] - c[i]);
    dc += D[i] * (c[i] - P[i]);
  }
  if (ep < rb * rb || eq < rb * rb) return chord(b_, P, Q, c);
  const double t = dc / L2;
  double s2 = 0.0;
  for (int i = 0; i < d; ++i) {
    const double e = P[i] + t * D[i] - c[i];
    s2 += e * e;
  }
  return L + excess(std::sqrt(s2)) + slack_;
}

BumpDistance bump_distance(const BumpProfile& b, const std::vector<double>& x,
                           const std::vector<double>& y, int grid_resolution) {
  if (x.size() != y.size()) throw InvalidInput("point dimension mismatch");
  const std::size_t d = x.size();
  if (d != 2 && d != 3) throw InvalidInput("bump distance supports d = 2 or 3");
  BumpDistance out;
  out.coarse = grid_resolution < 256;
  Vec P(x.begin(), x.end());
  Vec Q(d);
  for (std::size_t i = 0; i < d; ++i) {
    double t = y[i] - x[i];
    t -= std::round(t);
    Q[i] = x[i] + t;
  }
  out.flat = norm([&] {
    Vec D(d);
    for (std::size_t i = 0; i < d; ++i) D[i] = Q[i] - P[i];
    return D;
  }());
  const Vec c = nearest_center(P, Q);
  if (b.flat() || segment_distance(P, Q, c) >= b.r_bump) {
    out.value = out.flat;
    out.exact = true;
    return out;
  }
  const double ch = chord(b, P, Q, c);
  const double per_rb = d == 2 ? 64.0 : 16.0;
  const double h = std::min(1.0 / std::max(grid_resolution, 1), b.r_bump / per_rb);

  // Other images of y that could still be shorter than the chord.
  std::vector<std::pair<Vec, Vec>> targets{{Q, c}};
  const int combos = static_cast<int>(std::pow(3, d));
  for (int code = 0; code < combos; ++code) {
    int k = code;
    Vec Qk(d);
    bool zero = true;
    for (std::size_t i = 0; i < d; ++i) {
      const int off = k % 3 - 1;
      k /= 3;
      if (off != 0) zero = false;
      Qk[i] = Q[i] + off;
    }
    if (zero) continue;
    Vec D(d);
    for (std::size_t i = 0; i < d; ++i) D[i] = Qk[i] - P[i];
    if (norm(D) <= ch) targets.emplace_back(Qk, nearest_center(P, Qk));
  }

  auto estimate = [&](double step) {
    double best = ch;
    for (const auto& [T, cc] : targets) {
      if (segment_distance(P, T, cc) >= b.r_bump) {
        Vec D(d);
        for (std::size_t i = 0; i < d; ++i) D[i] = T[i] - P[i];
        best = std::min(best, norm(D));
        continue;
      }
      best = std::min({best, chord(b, P, T, cc), lattice_length(b, P, T, cc, step)});
    }
    return best;
  };
  const double coarse = estimate(h);
  const double fine = estimate(h / 2.0);
  out.value = std::max(out.flat, fine);
  out.error = std::abs(coarse - fine);
  return out;
}

}  // namespace rgg::lowerbound
