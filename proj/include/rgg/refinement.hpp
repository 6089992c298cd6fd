#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rgg/graph.hpp"
#include "rgg/netframe.hpp"
#include "rgg/params.hpp"

namespace rgg::refinement {

/// Normalized counts from every net and orthogonal cluster into V_fine, and
/// the reference net cluster i(w) of each fine vertex.
struct FineContext {
  VertexSet V_fine;                        // sorted
  std::vector<std::vector<double>> net_N;  // net_N[i][k] = N_{U_i}(V_fine[k])
  std::vector<std::vector<double>> ortho_N;
  std::vector<int> ref;                    // -1 when no usable reference
  std::vector<std::string> ref_failure;    // reason when ref < 0

  std::size_t local(Vertex v) const;  // index of v in V_fine; InvalidInput if absent
  /// psi_w(v) through the axes of w's reference frame; both given as local indices.
  double psi(const netframe::NetOutput& net, std::size_t w, std::size_t v) const;
};

/// Requires V_fine disjoint from every cluster of the net.
FineContext prepare_fine(const Graph& g, const netframe::NetOutput& net, const VertexSet& V_fine,
                         const Scales& s, const ModelInputs& in);

struct FineCluster {
  Vertex owner = 0;
  VertexSet members;  // sorted, contains owner
  double lambda_used = 0.0;
};

struct VertexFailure {
  Vertex w = 0;
  std::string reason;
};

struct RefineResult {
  std::vector<FineCluster> clusters;  // one per non-failed vertex, in V_fine order
  std::vector<VertexFailure> failures;
};

/// W_w = {v in V_fine: N_{U^w}(v) >= p(9 delta) and psi_w(v) <= lambda} for every w.
/// Vertices without a reference cluster are reported as failures; StageFailure
/// when every vertex fails.
RefineResult refine_fine(const Graph& g, const netframe::NetOutput& net, const FineContext& ctx,
                         const Scales& s, const ModelInputs& in);

struct FineNet {
  VertexSet S;                  // centres in selection order
  std::vector<VertexSet> cover; // cover[i] belongs to S[i]
  double zeta = 0.0;
  std::vector<std::string> diagnostics;
};

/// Greedy zeta-net: the smallest uncovered w becomes a centre and covers every
/// uncovered v with N_{U^w}(v) >= p(9 delta) and psi_w(v) < 10 L_p zeta.
/// ConfigError (strict mode) unless C fe(m) <= zeta <= eta.
FineNet refine_fine_net(const netframe::NetOutput& net, const FineContext& ctx, double zeta,
                        const Scales& s, const ModelInputs& in, const ParameterConfig& cfg);

void write_fine_report(std::ostream& os, const RefineResult& rr, const FineNet& fn);

}  // namespace rgg::refinement
