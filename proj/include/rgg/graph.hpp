#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rgg {

using Vertex = std::uint32_t;
using VertexSet = std::vector<Vertex>;

/// Undirected simple graph in compressed sparse row form. Carries no latent
/// information; positions live in a separate LatentPositions object.
class Graph {
 public:
  Graph() = default;
  /// Builds from upper-triangular rows: upper[i] holds sorted j > i.
  static Graph from_upper_rows(std::uint32_t n, const std::vector<std::vector<Vertex>>& upper,
                               double q, std::uint64_t seed);
  static Graph from_edges(std::uint32_t n, std::vector<std::pair<Vertex, Vertex>> edges, double q,
                          std::uint64_t seed);

  std::uint32_t n() const { return n_; }
  double q() const { return q_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t edge_count() const { return cols_.size() / 2; }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {cols_.data() + row_[v], cols_.data() + row_[v + 1]};
  }
  std::uint32_t degree(Vertex v) const { return static_cast<std::uint32_t>(row_[v + 1] - row_[v]); }
  bool has_edge(Vertex u, Vertex v) const;

  const std::vector<std::uint64_t>& row_offsets() const { return row_; }
  const std::vector<Vertex>& columns() const { return cols_; }

  bool operator==(const Graph&) const = default;

 private:
  std::uint32_t n_ = 0;
  double q_ = 1.0;
  std::uint64_t seed_ = 0;
  std::vector<std::uint64_t> row_{0};
  std::vector<Vertex> cols_;
};

/// Graph header metadata carried by the RGG1 text format.
struct GraphHeader {
  std::uint32_t n = 0;
  int d = 0;
  double q = 1.0;
  std::uint64_t seed = 0;
  std::string manifold;
};

void write_rgg1(const std::string& path, const Graph& g, int d, const std::string& manifold);
Graph read_rgg1(const std::string& path, GraphHeader* header = nullptr);

/// Number of neighbours of every vertex inside U (indexed by vertex id).
std::vector<std::uint32_t> counts_into(const Graph& g, const VertexSet& U);

/// N_U(v) = |N(v) ∩ U| / (q |U|).
double normalized_count(const Graph& g, const VertexSet& U, Vertex v);

/// Common-neighbour counts inside U for all pairs of V, stored densely.
class CommonNeighborMatrix {
 public:
  CommonNeighborMatrix(std::size_t size, double scale) : size_(size), scale_(scale), counts_(size * size, 0) {}

  std::size_t size() const { return size_; }
  std::uint32_t count(std::size_t a, std::size_t b) const { return counts_[a * size_ + b]; }
  /// N_U(v_a, v_b) = count / (q^2 |U|).
  double value(std::size_t a, std::size_t b) const { return count(a, b) * scale_; }
  double scale() const { return scale_; }
  std::uint32_t* row(std::size_t a) { return counts_.data() + a * size_; }

 private:
  std::size_t size_;
  double scale_;
  std::vector<std::uint32_t> counts_;
};

/// Matrix over V x V; rows/columns follow the order of V. The diagonal holds
/// deg_U(v) and is not a common-neighbour count.
CommonNeighborMatrix common_neighbor_matrix(const Graph& g, const VertexSet& U, const VertexSet& V);

/// fe = log n / sqrt(q m).
double fluctuation_scale(double n, double q, double m);

/// Throws InvalidInput when the sets intersect.
void require_disjoint(std::uint32_t n, const VertexSet& A, const VertexSet& B, const char* what);

}  // namespace rgg
