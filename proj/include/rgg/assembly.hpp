#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "rgg/graph.hpp"
#include "rgg/netframe.hpp"
#include "rgg/params.hpp"
#include "rgg/refinement.hpp"

namespace rgg::assembly {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Symmetric n x n weights in [0, inf] with the index of the run that set each
/// finite entry (-1 for inf).
class WeightGraph {
 public:
  explicit WeightGraph(std::size_t n);
  std::size_t n() const { return n_; }
  double weight(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }
  int tag(std::size_t i, std::size_t j) const { return tag_[i * n_ + j]; }
  /// Sets both orientations.
  void set(std::size_t i, std::size_t j, double w, int tag = -1);
  /// Lowers both orientations to w when w is smaller; returns true on change.
  bool lower(std::size_t i, std::size_t j, double w, int tag);
  std::size_t finite_entries() const;

 private:
  std::size_t n_;
  std::vector<double> w_;
  std::vector<int> tag_;
};

/// Symmetric matrix with zero diagonal, stored as the strict upper triangle.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n, double fill = kInf);
  std::size_t n() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, double v);
  void row(std::size_t i, std::vector<double>& out) const;
  /// Contiguous entries (i, i+1) .. (i, n-1); requires i + 1 < n.
  double* upper(std::size_t i) { return d_.data() + index(i, i + 1); }
  bool operator==(const DistanceMatrix& o) const { return n_ == o.n_ && d_ == o.d_; }

 private:
  std::size_t index(std::size_t i, std::size_t j) const;
  std::size_t n_ = 0;
  std::vector<double> d_;
};

/// All-pairs shortest paths by Dijkstra from every source over finite weights.
DistanceMatrix shortest_paths(const WeightGraph& wg);

/// Weight rule of one (alpha, beta) run, factored through the fine-net centres:
/// from any w in cover[c] to v the weight is C xi when v is in cover[c] and
/// out[c][v] otherwise.
struct RunWeights {
  std::vector<VertexSet> cover;
  std::vector<std::vector<std::pair<Vertex, double>>> out;  // v outside cover[c], finite only
  double same_cover = 0.0;
};

struct RunResult {
  int alpha = 0;
  int beta = 0;
  VertexSet V_fine, V_cn, V_net, V_ortho;
  netframe::NetOutput net;
  refinement::RefineResult fine;
  refinement::FineNet fine_net;
  RunWeights weights;
  bool failed = false;
  std::string failure;
};

struct FineDistanceOptions {
  bool keep_runs = true;  // keep per-run stage outputs (clusters, nets) for oracles
};

struct FineDistanceResult {
  DistanceMatrix dm;
  Scales scales;
  std::vector<RunResult> runs;  // 28 runs; stage outputs dropped unless keep_runs
  std::size_t failed_runs = 0;
  std::size_t failed_vertices = 0;
  std::size_t infinite_pairs = 0;
  std::vector<std::string> diagnostics;
  double seconds_stage1 = 0.0;
  double seconds_stage2 = 0.0;
  double seconds_paths = 0.0;
};

/// Deterministic split of [0, N) into 8 equal parts from the seed.
std::vector<VertexSet> partition8(std::uint32_t N, std::uint64_t seed);

/// Stage 1 and Stage 2 for one pair of parts; StageFailure is recorded in the result.
RunResult run_pair(const Graph& g, const std::vector<VertexSet>& parts, int alpha, int beta,
                   const Scales& s, const ModelInputs& in, const ParameterConfig& cfg,
                   std::uint64_t seed);

/// Weights of one run: C xi inside a cover, p^{-1}(N_{W_c}(v)) + 2 xi + 2 C xi for
/// v with N_{W_c}(v) >= p(r_G), inf otherwise.
RunWeights run_weights(const Graph& g, const refinement::RefineResult& fine,
                       const refinement::FineNet& fn, const Scales& s, const ModelInputs& in,
                       const ParameterConfig& cfg);

/// Minimum over runs and orientations as a dense weight graph.
WeightGraph combined_weights(std::uint32_t N, const std::vector<RunResult>& runs);

/// Exact shortest-path closure of the combined weights through per-centre hub nodes.
/// Hub distance rows are held in blocks of at most row_budget doubles.
DistanceMatrix hub_shortest_paths(std::uint32_t N, const std::vector<RunResult>& runs,
                                  std::size_t row_budget = std::size_t{1} << 25);

/// Full fine-distance estimate on g; |V| must be divisible by 8.
FineDistanceResult fine_distance(const Graph& g, const ModelInputs& in, const ParameterConfig& cfg,
                                 std::uint64_t seed, const FineDistanceOptions& opt = {});

void write_dmat(const std::string& path, const DistanceMatrix& dm);
DistanceMatrix read_dmat(const std::string& path);
void write_dmat_csv(const std::string& path, const DistanceMatrix& dm);
void write_weight_provenance(std::ostream& os, const WeightGraph& wg,
                             const std::vector<RunResult>& runs);

}  // namespace rgg::assembly
