#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rgg/clustering.hpp"
#include "rgg/graph.hpp"
#include "rgg/params.hpp"

namespace rgg::netframe {

using clustering::ClusterPair;

struct Frame {
  ClusterPair center;
  std::vector<ClusterPair> axes;        // axes[s] = ortho cluster axis_map[s]
  std::vector<std::size_t> axis_map;    // indices into NetOutput::ortho_pool
  bool complete(int d) const { return static_cast<int>(axis_map.size()) == d; }
};

enum class ClusterKind { Net, Ortho };

/// One extraction step: the new cluster's edges to every not-yet-extracted
/// vertex of V_net and V_ortho are consumed at this step.
struct RevealEntry {
  std::size_t step = 0;
  ClusterKind kind = ClusterKind::Net;
  std::size_t index = 0;  // frame index (net) or pool index (ortho)
  Vertex center = 0;
  std::size_t size = 0;
  std::size_t revealed = 0;
  double relax = 1.0;
};

struct NetOutput {
  std::vector<Frame> net;
  std::vector<ClusterPair> ortho_pool;
  std::vector<RevealEntry> reveal_log;
  bool complete = true;  // every frame complete and the loop ended on an empty candidate set
  std::size_t iterations = 0;
  std::vector<std::string> diagnostics;
};

/// Stage 1: extracts a net of frame-equipped clusters from V_net with
/// orthogonal clusters from V_ortho, counting common neighbours through V_cn.
NetOutput cluster_net(const Graph& g, const VertexSet& V_cn, const VertexSet& V_net,
                      const VertexSet& V_ortho, const Scales& s, const ModelInputs& in,
                      const ParameterConfig& cfg);

/// psi_F(w1, w2) = sqrt(sum_s (N_{V_s}(w2) - N_{V_s}(w1))^2) over the frame axes.
double psi_frame(const Graph& g, const Frame& F, Vertex w1, Vertex w2);

/// Same functional from per-axis normalized counts.
double psi_from_counts(const std::vector<double>& a, const std::vector<double>& b);

void write_report(std::ostream& os, const NetOutput& net);
NetOutput read_report(std::istream& is);

}  // namespace rgg::netframe
