#include "rgg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rgg/errors.hpp"
#include "rgg/parallel.hpp"

namespace rgg {

Graph Graph::from_upper_rows(std::uint32_t n, const std::vector<std::vector<Vertex>>& upper,
                             double q, std::uint64_t seed) {
  if (upper.size() != n) throw InvalidInput("row count does not match n");
  Graph g;
  g.n_ = n;
  g.q_ = q;
  g.seed_ = seed;
  std::vector<std::uint64_t> deg(n, 0);
  for (std::uint32_t i = 0; i < n; ++i) {
    deg[i] += upper[i].size();
    for (Vertex j : upper[i]) {
      if (j <= i || j >= n) throw InvalidInput("upper row entries must satisfy i < j < n");
      ++deg[j];
    }
  }
  g.row_.assign(n + 1, 0);
  for (std::uint32_t i = 0; i < n; ++i) g.row_[i + 1] = g.row_[i] + deg[i];
  g.cols_.resize(g.row_[n]);
  std::vector<std::uint64_t> fill(g.row_.begin(), g.row_.end() - 1);
  // Lower neighbours first (increasing i), then the sorted upper row: rows end up sorted.
  for (std::uint32_t i = 0; i < n; ++i) {
    for (Vertex j : upper[i]) g.cols_[fill[j]++] = i;
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    for (Vertex j : upper[i]) g.cols_[fill[i]++] = j;
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    auto b = g.cols_.begin() + static_cast<std::ptrdiff_t>(g.row_[i]);
    auto e = g.cols_.begin() + static_cast<std::ptrdiff_t>(g.row_[i + 1]);
    if (!std::is_sorted(b, e) || std::adjacent_find(b, e) != e)
      throw InvalidInput("upper rows must be sorted without duplicates");
  }
  return g;
}

Graph Graph::from_edges(std::uint32_t n, std::vector<std::pair<Vertex, Vertex>> edges, double q,
                        std::uint64_t seed) {
  std::vector<std::vector<Vertex>> upper(n);
  for (auto [a, b] : edges) {
    if (a == b) throw InvalidInput("self-loops are not allowed");
    if (a >= n || b >= n) throw InvalidInput("edge endpoint out of range");
    upper[std::min(a, b)].push_back(std::max(a, b));
  }
  for (auto& r : upper) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
  return from_upper_rows(n, upper, q, seed);
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

void write_rgg1(const std::string& path, const Graph& g, int d, const std::string& manifold) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  std::fprintf(f, "RGG1 n=%u d=%d q=%.17g seed=%llu manifold=%s\n", g.n(), d, g.q(),
               static_cast<unsigned long long>(g.seed()), manifold.c_str());
  for (Vertex i = 0; i < g.n(); ++i) {
    for (Vertex j : g.neighbors(i)) {
      if (j > i) std::fprintf(f, "%u %u\n", i, j);
    }
  }
  if (std::fclose(f) != 0) throw std::runtime_error("write failed for " + path);
}

Graph read_rgg1(const std::string& path, GraphHeader* header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("empty graph file");
  std::istringstream hs(line);
  std::string tag;
  hs >> tag;
  if (tag != "RGG1") throw InvalidInput("not an RGG1 file: " + path);
  GraphHeader h;
  std::string kv;
  bool have_n = false;
  while (hs >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidInput("bad header field: " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    if (key == "n") {
      h.n = static_cast<std::uint32_t>(std::stoul(val));
      have_n = true;
    } else if (key == "d") {
      h.d = std::stoi(val);
    } else if (key == "q") {
      h.q = std::stod(val);
    } else if (key == "seed") {
      h.seed = std::stoull(val);
    } else if (key == "manifold") {
      h.manifold = val;
    }
  }
  if (!have_n) throw InvalidInput("graph header lacks n");
  std::vector<std::vector<Vertex>> upper(h.n);
  unsigned long long a = 0, b = 0;
  std::pair<unsigned long long, unsigned long long> prev{0, 0};
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (std::sscanf(line.c_str(), "%llu %llu", &a, &b) != 2) throw InvalidInput("bad edge line: " + line);
    if (!(a < b && b < h.n)) throw InvalidInput("edge line must satisfy i < j < n: " + line);
    if (!first && std::make_pair(a, b) <= prev) throw InvalidInput("edge lines not sorted");
    prev = {a, b};
    first = false;
    upper[a].push_back(static_cast<Vertex>(b));
  }
  if (header) *header = h;
  return Graph::from_upper_rows(h.n, upper, h.q, h.seed);
}

std::vector<std::uint32_t> counts_into(const Graph& g, const VertexSet& U) {
  std::vector<std::uint32_t> cnt(g.n(), 0);
  for (Vertex u : U) {
    for (Vertex w : g.neighbors(u)) ++cnt[w];
  }
  return cnt;
}

double normalized_count(const Graph& g, const VertexSet& U, Vertex v) {
  if (U.empty()) throw InvalidInput("normalized count over an empty set");
  std::uint64_t c = 0;
  for (Vertex u : U) {
    if (u == v) throw InvalidInput("vertex must not belong to the counting set");
    if (g.has_edge(u, v)) ++c;
  }
  return static_cast<double>(c) / (g.q() * static_cast<double>(U.size()));
}

void require_disjoint(std::uint32_t n, const VertexSet& A, const VertexSet& B, const char* what) {
  std::vector<char> mark(n, 0);
  for (Vertex a : A) {
    if (a >= n) throw InvalidInput("vertex out of range");
    mark[a] = 1;
  }
  for (Vertex b : B) {
    if (b >= n) throw InvalidInput("vertex out of range");
    if (mark[b]) throw InvalidInput(std::string(what) + ": sets overlap");
  }
}

CommonNeighborMatrix common_neighbor_matrix(const Graph& g, const VertexSet& U, const VertexSet& V) {
  if (U.empty()) throw InvalidInput("common-neighbour matrix over an empty set");
  require_disjoint(g.n(), U, V, "common_neighbor_matrix");
  const double scale = 1.0 / (g.q() * g.q() * static_cast<double>(U.size()));
  CommonNeighborMatrix M(V.size(), scale);
  std::vector<std::int32_t> local(g.n(), -1);
  for (std::size_t a = 0; a < V.size(); ++a) local[V[a]] = static_cast<std::int32_t>(a);
  // Neighbour lists of each u restricted to V, as sorted local indices.
  std::vector<std::vector<std::uint32_t>> lists(U.size());
  parallel_for(U.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      auto& L = lists[k];
      for (Vertex w : g.neighbors(U[k])) {
        if (local[w] >= 0) L.push_back(static_cast<std::uint32_t>(local[w]));
      }
      std::sort(L.begin(), L.end());
    }
  });
  // Each worker owns a contiguous block of rows; increments are integer so the
  // result does not depend on the split.
  parallel_for(V.size(), [&](std::size_t rb, std::size_t re) {
    for (const auto& L : lists) {
      auto it = std::lower_bound(L.begin(), L.end(), static_cast<std::uint32_t>(rb));
      for (; it != L.end() && *it < re; ++it) {
        std::uint32_t* row = M.row(*it);
        for (auto jt = it; jt != L.end(); ++jt) ++row[*jt];
      }
    }
  });
  // Mirror the upper triangle.
  for (std::size_t a = 0; a < V.size(); ++a) {
    for (std::size_t b = a + 1; b < V.size(); ++b) M.row(b)[a] = M.row(a)[b];
  }
  return M;
}

double fluctuation_scale(double n, double q, double m) {
  if (!(m >= 1.0)) throw InvalidInput("fluctuation scale needs m >= 1");
  if (!(q > 0.0 && q <= 1.0)) throw InvalidInput("sparsity must lie in (0,1]");
  return std::log(n) / std::sqrt(q * m);
}

}  // namespace rgg
