#include "rgg/assembly.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>
#include <queue>
#include <unordered_map>

#include "rgg/errors.hpp"
#include "rgg/parallel.hpp"
#include "rgg/rng.hpp"

namespace rgg::assembly {

namespace {

constexpr std::uint64_t kPartitionStream = 0x50415254'00000000ull;
constexpr std::uint64_t kSplitStream = 0x53504c54'00000000ull;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void shuffle(VertexSet& v, std::uint64_t seed, std::uint64_t stream) {
  CounterStream rs(seed, StreamTag::Aux, stream);
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rs.bits() % i;
    std::swap(v[i - 1], v[j]);
  }
}

/// Directed graph in CSR form.
struct Csr {
  std::vector<std::size_t> row;
  std::vector<std::uint32_t> col;
  std::vector<double> w;
};

struct EdgeList {
  std::vector<std::uint32_t> src, dst;
  std::vector<double> w;
  void add(std::uint32_t a, std::uint32_t b, double x) {
    src.push_back(a);
    dst.push_back(b);
    w.push_back(x);
  }
};

Csr to_csr(std::size_t nodes, const EdgeList& el) {
  Csr c;
  c.row.assign(nodes + 1, 0);
  for (auto s : el.src) ++c.row[s + 1];
  for (std::size_t i = 0; i < nodes; ++i) c.row[i + 1] += c.row[i];
  std::vector<std::size_t> pos(c.row.begin(), c.row.end() - 1);
  c.col.resize(el.src.size());
  c.w.resize(el.src.size());
  for (std::size_t e = 0; e < el.src.size(); ++e) {
    const std::size_t k = pos[el.src[e]]++;
    c.col[k] = el.dst[e];
    c.w[k] = el.w[e];
  }
  return c;
}

void dijkstra(const Csr& g, std::uint32_t src, std::vector<double>& dist) {
  using Item = std::pair<double, std::uint32_t>;
  std::fill(dist.begin(), dist.end(), kInf);
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0.0;
  pq.push({0.0, src});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (std::size_t k = g.row[u]; k < g.row[u + 1]; ++k) {
      const double nd = d + g.w[k];
      const std::uint32_t v = g.col[k];
      if (nd < dist[v]) {
        dist[v] = nd;
        pq.push({nd, v});
      }
    }
  }
}

}  // namespace

WeightGraph::WeightGraph(std::size_t n) : n_(n), w_(n * n, kInf), tag_(n * n, -1) {
  for (std::size_t i = 0; i < n; ++i) w_[i * n + i] = 0.0;
}

void WeightGraph::set(std::size_t i, std::size_t j, double w, int tag) {
  if (!(w >= 0.0)) throw InvalidInput("weights must be nonnegative");
  w_[i * n_ + j] = w_[j * n_ + i] = w;
  tag_[i * n_ + j] = tag_[j * n_ + i] = std::isfinite(w) ? tag : -1;
}

bool WeightGraph::lower(std::size_t i, std::size_t j, double w, int tag) {
  if (!(w < w_[i * n_ + j])) return false;
  set(i, j, w, tag);
  return true;
}

std::size_t WeightGraph::finite_entries() const {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) c += std::isfinite(w_[i * n_ + j]);
  return c;
}

DistanceMatrix::DistanceMatrix(std::size_t n, double fill)
    : n_(n), d_(n > 1 ? n * (n - 1) / 2 : 0, fill) {}

std::size_t DistanceMatrix::index(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
}

double DistanceMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw InvalidInput("distance index out of range");
  return i == j ? 0.0 : d_[index(i, j)];
}

void DistanceMatrix::set(std::size_t i, std::size_t j, double v) {
  if (i == j) {
    if (v != 0.0) throw InvalidInput("diagonal must be zero");
    return;
  }
  d_[index(i, j)] = v;
}

void DistanceMatrix::row(std::size_t i, std::vector<double>& out) const {
  out.resize(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = (*this)(i, j);
}

DistanceMatrix shortest_paths(const WeightGraph& wg) {
  const std::size_t n = wg.n();
  EdgeList el;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && std::isfinite(wg.weight(i, j))) {
        if (wg.weight(i, j) < 0.0) throw InvalidInput("negative weight");
        el.add(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), wg.weight(i, j));
      }
  const Csr g = to_csr(n, el);
  DistanceMatrix dm(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    std::vector<double> dist(n);
    for (std::size_t s = b; s < e; ++s) {
      dijkstra(g, static_cast<std::uint32_t>(s), dist);
      for (std::size_t t = s + 1; t < n; ++t) dm.set(s, t, dist[t]);
    }
  });
  return dm;
}

std::vector<VertexSet> partition8(std::uint32_t N, std::uint64_t seed) {
  if (N % 8 != 0 || N == 0) throw InvalidInput("vertex count must be a positive multiple of 8");
  VertexSet all(N);
  for (std::uint32_t i = 0; i < N; ++i) all[i] = i;
  shuffle(all, seed, kPartitionStream);
  std::vector<VertexSet> parts(8);
  const std::size_t size = N / 8;
  for (int a = 0; a < 8; ++a) {
    parts[a].assign(all.begin() + a * size, all.begin() + (a + 1) * size);
    std::sort(parts[a].begin(), parts[a].end());
  }
  return parts;
}

RunWeights run_weights(const Graph& g, const refinement::RefineResult& fine,
                       const refinement::FineNet& fn, const Scales& s, const ModelInputs& in,
                       const ParameterConfig& cfg) {
  RunWeights rw;
  rw.cover = fn.cover;
  rw.same_cover = cfg.C_fine_net * s.xi;
  rw.out.resize(fn.S.size());
  std::unordered_map<Vertex, const refinement::FineCluster*> by_owner;
  for (const auto& c : fine.clusters) by_owner[c.owner] = &c;
  VertexSet V_fine;
  for (const auto& c : fn.cover) V_fine.insert(V_fine.end(), c.begin(), c.end());
  std::sort(V_fine.begin(), V_fine.end());
  std::vector<std::uint32_t> owner_of(g.n(), UINT32_MAX);
  for (std::size_t c = 0; c < fn.cover.size(); ++c)
    for (Vertex v : fn.cover[c]) owner_of[v] = static_cast<std::uint32_t>(c);
  const double threshold = in.p(s.r_G);
  const double pad = 2.0 * s.xi + 2.0 * cfg.C_fine_net * s.xi;
  parallel_for(fn.S.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      auto it = by_owner.find(fn.S[c]);
      if (it == by_owner.end()) continue;
      const VertexSet& W = it->second->members;
      const auto cnt = counts_into(g, W);
      for (Vertex v : V_fine) {
        if (owner_of[v] == c) continue;
        const bool inside = std::binary_search(W.begin(), W.end(), v);
        const double size = static_cast<double>(W.size()) - (inside ? 1.0 : 0.0);
        if (size <= 0.0) continue;
        const double N = cnt[v] / (g.q() * size);
        if (N >= threshold) rw.out[c].push_back({v, in.p.inverse(N).x + pad});
      }
    }
  });
  return rw;
}

RunResult run_pair(const Graph& g, const std::vector<VertexSet>& parts, int alpha, int beta,
                   const Scales& s, const ModelInputs& in, const ParameterConfig& cfg,
                   std::uint64_t seed) {
  RunResult rr;
  rr.alpha = alpha;
  rr.beta = beta;
  VertexSet ocn;
  for (int a = 0; a < 8; ++a) {
    auto& dst = (a == alpha || a == beta) ? rr.V_fine : ocn;
    dst.insert(dst.end(), parts[a].begin(), parts[a].end());
  }
  std::sort(rr.V_fine.begin(), rr.V_fine.end());
  shuffle(ocn, seed, kSplitStream + static_cast<std::uint64_t>(alpha * 8 + beta));
  const std::size_t third = ocn.size() / 3;
  const std::size_t n_cn = std::min<std::size_t>(third, static_cast<std::size_t>(std::max(1.0, s.n_cn)));
  rr.V_cn.assign(ocn.begin(), ocn.begin() + n_cn);
  rr.V_net.assign(ocn.begin() + third, ocn.begin() + 2 * third);
  rr.V_ortho.assign(ocn.begin() + 2 * third, ocn.begin() + 3 * third);
  for (auto* v : {&rr.V_cn, &rr.V_net, &rr.V_ortho}) std::sort(v->begin(), v->end());
  try {
    rr.net = netframe::cluster_net(g, rr.V_cn, rr.V_net, rr.V_ortho, s, in, cfg);
    const auto ctx = refinement::prepare_fine(g, rr.net, rr.V_fine, s, in);
    rr.fine = refinement::refine_fine(g, rr.net, ctx, s, in);
    rr.fine_net = refinement::refine_fine_net(rr.net, ctx, s.xi, s, in, cfg);
    rr.weights = run_weights(g, rr.fine, rr.fine_net, s, in, cfg);
  } catch (const StageFailure& e) {
    rr.failed = true;
    rr.failure = e.what();
  }
  return rr;
}

WeightGraph combined_weights(std::uint32_t N, const std::vector<RunResult>& runs) {
  WeightGraph wg(N);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& rw = runs[r].weights;
    const int tag = static_cast<int>(r);
    for (std::size_t c = 0; c < rw.cover.size(); ++c) {
      for (Vertex x : rw.cover[c]) {
        for (Vertex y : rw.cover[c])
          if (x != y) wg.lower(x, y, rw.same_cover, tag);
        for (const auto& [y, w] : rw.out[c]) wg.lower(x, y, w, tag);
      }
    }
  }
  return wg;
}

DistanceMatrix hub_shortest_paths(std::uint32_t N, const std::vector<RunResult>& runs,
                                  std::size_t row_budget) {
  // Each centre c gets an out-hub H (cover -> H at 0, H -> v at the weight) and an
  // in-hub G (v -> G at the weight, G -> cover at 0); a path through a hub is
  // exactly one weighted edge in one orientation.
  std::size_t K = 0;
  for (const auto& r : runs) K += r.weights.cover.size();
  const std::size_t nodes = N + 2 * K;
  if (nodes > UINT32_MAX) throw Unsupported("hub graph too large");
  EdgeList el;
  std::size_t h = 0;
  for (const auto& r : runs) {
    const auto& rw = r.weights;
    for (std::size_t c = 0; c < rw.cover.size(); ++c, ++h) {
      const auto H = static_cast<std::uint32_t>(N + 2 * h);
      const auto G = H + 1;
      for (Vertex x : rw.cover[c]) {
        el.add(x, H, 0.0);
        el.add(G, x, 0.0);
        el.add(H, x, rw.same_cover);
        el.add(x, G, rw.same_cover);
      }
      for (const auto& [y, w] : rw.out[c]) {
        el.add(H, y, w);
        el.add(y, G, w);
      }
    }
  }
  const Csr g = to_csr(nodes, el);
  DistanceMatrix dm(N);
  if (N < 2) return dm;
  // Hub rows are computed in blocks and folded into the upper triangle:
  // d(x, z) = min over hub edges x -> h of w + D_h(z).
  const std::size_t block = std::max<std::size_t>(1, std::min(2 * K, row_budget / N));
  std::vector<double> rows(block * static_cast<std::size_t>(N));
  for (std::size_t h0 = 0; h0 < 2 * K; h0 += block) {
    const std::size_t h1 = std::min(2 * K, h0 + block);
    parallel_for(h1 - h0, [&](std::size_t b, std::size_t e) {
      std::vector<double> dist(nodes);
      for (std::size_t k = b; k < e; ++k) {
        dijkstra(g, static_cast<std::uint32_t>(N + h0 + k), dist);
        std::copy(dist.begin(), dist.begin() + N, rows.begin() + k * N);
      }
    });
    parallel_for(N - 1, [&](std::size_t b, std::size_t e) {
      for (std::size_t x = b; x < e; ++x) {
        double* out = dm.upper(x);
        const std::size_t len = N - x - 1;
        for (std::size_t k = g.row[x]; k < g.row[x + 1]; ++k) {
          const std::size_t hub = g.col[k] - N;
          if (hub < h0 || hub >= h1) continue;
          const double w = g.w[k];
          const double* D = rows.data() + (hub - h0) * static_cast<std::size_t>(N) + x + 1;
          for (std::size_t z = 0; z < len; ++z) out[z] = std::min(out[z], w + D[z]);
        }
      }
    });
  }
  return dm;
}

FineDistanceResult fine_distance(const Graph& g, const ModelInputs& in, const ParameterConfig& cfg,
                                 std::uint64_t seed, const FineDistanceOptions& opt) {
  const std::uint32_t N = g.n();
  const auto parts = partition8(N, seed);
  FineDistanceResult res;
  res.scales = resolve_scales(cfg, in, N / 4.0);
  for (const auto& w : res.scales.warnings) res.diagnostics.push_back("relaxed: " + w);
  for (int a = 0; a < 8; ++a) {
    for (int b = a + 1; b < 8; ++b) {
      auto t0 = std::chrono::steady_clock::now();
      RunResult rr = run_pair(g, parts, a, b, res.scales, in, cfg, seed);
      res.seconds_stage1 += seconds_since(t0);
      if (rr.failed) {
        ++res.failed_runs;
        res.diagnostics.push_back("run (" + std::to_string(a) + "," + std::to_string(b) +
                                  ") failed: " + rr.failure);
      }
      res.failed_vertices += rr.fine.failures.size();
      if (!rr.net.complete)
        res.diagnostics.push_back("run (" + std::to_string(a) + "," + std::to_string(b) +
                                  ") net incomplete");
      if (!opt.keep_runs) {
        rr.net = {};
        rr.fine.clusters.clear();
      }
      res.runs.push_back(std::move(rr));
    }
  }
  auto t0 = std::chrono::steady_clock::now();
  res.dm = hub_shortest_paths(N, res.runs);
  res.seconds_paths = seconds_since(t0);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) res.infinite_pairs += !std::isfinite(res.dm(i, j));
  if (res.infinite_pairs > 0)
    res.diagnostics.push_back(std::to_string(res.infinite_pairs) + " pairs left at infinite distance");
  if (!opt.keep_runs)
    for (auto& r : res.runs) r.weights = {};
  return res;
}

void write_dmat(const std::string& path, const DistanceMatrix& dm) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  char header[16] = {'D', 'M', 'A', 'T', 0, 0, 0, 0};
  const std::uint64_t n = dm.n();
  std::memcpy(header + 8, &n, 8);
  os.write(header, 16);
  std::vector<double> row;
  for (std::size_t i = 0; i < dm.n(); ++i) {
    dm.row(i, row);
    os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * 8));
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

DistanceMatrix read_dmat(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char header[16];
  if (!is.read(header, 16) || std::memcmp(header, "DMAT", 4) != 0)
    throw InvalidInput("not a DMAT file: " + path);
  std::uint64_t n = 0;
  std::memcpy(&n, header + 8, 8);
  DistanceMatrix dm(n);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!is.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(n * 8)))
      throw InvalidInput("truncated DMAT file: " + path);
    for (std::size_t j = i + 1; j < n; ++j) dm.set(i, j, row[j]);
  }
  return dm;
}

void write_dmat_csv(const std::string& path, const DistanceMatrix& dm) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.precision(17);
  std::vector<double> row;
  for (std::size_t i = 0; i < dm.n(); ++i) {
    dm.row(i, row);
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << row[j];
    os << '\n';
  }
}

void write_weight_provenance(std::ostream& os, const WeightGraph& wg,
                             const std::vector<RunResult>& runs) {
  os << "w,v,weight,alpha,beta\n";
  os.precision(17);
  for (std::size_t i = 0; i < wg.n(); ++i)
    for (std::size_t j = i + 1; j < wg.n(); ++j) {
      if (!std::isfinite(wg.weight(i, j))) continue;
      const auto& r = runs.at(wg.tag(i, j));
      os << i << ',' << j << ',' << wg.weight(i, j) << ',' << r.alpha << ',' << r.beta << '\n';
    }
}

}  // namespace rgg::assembly
