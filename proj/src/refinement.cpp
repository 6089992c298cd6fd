#include "rgg/refinement.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "rgg/errors.hpp"
#include "rgg/parallel.hpp"

namespace rgg::refinement {

namespace {

constexpr double kRef = 3.0;
constexpr double kCoarse = 9.0;

std::vector<double> normalized_into(const Graph& g, const VertexSet& U, const VertexSet& V_fine) {
  const auto cnt = counts_into(g, U);
  const double scale = 1.0 / (g.q() * static_cast<double>(U.size()));
  std::vector<double> out(V_fine.size());
  for (std::size_t k = 0; k < V_fine.size(); ++k) out[k] = cnt[V_fine[k]] * scale;
  return out;
}

}  // namespace

std::size_t FineContext::local(Vertex v) const {
  auto it = std::lower_bound(V_fine.begin(), V_fine.end(), v);
  if (it == V_fine.end() || *it != v) throw InvalidInput("vertex not in V_fine");
  return static_cast<std::size_t>(it - V_fine.begin());
}

double FineContext::psi(const netframe::NetOutput& net, std::size_t w, std::size_t v) const {
  if (ref[w] < 0) throw InvalidInput("psi: vertex has no reference frame");
  const auto& F = net.net[ref[w]];
  double sum = 0.0;
  for (std::size_t j : F.axis_map) {
    const double diff = ortho_N[j][v] - ortho_N[j][w];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

FineContext prepare_fine(const Graph& g, const netframe::NetOutput& net, const VertexSet& V_fine,
                         const Scales& s, const ModelInputs& in) {
  FineContext ctx;
  ctx.V_fine = V_fine;
  std::sort(ctx.V_fine.begin(), ctx.V_fine.end());
  if (std::adjacent_find(ctx.V_fine.begin(), ctx.V_fine.end()) != ctx.V_fine.end())
    throw InvalidInput("V_fine has duplicates");
  for (const auto& F : net.net) require_disjoint(g.n(), ctx.V_fine, F.center.members, "V_fine/net");
  for (const auto& V : net.ortho_pool) require_disjoint(g.n(), ctx.V_fine, V.members, "V_fine/ortho");

  ctx.net_N.resize(net.net.size());
  ctx.ortho_N.resize(net.ortho_pool.size());
  parallel_for(net.net.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) ctx.net_N[i] = normalized_into(g, net.net[i].center.members, ctx.V_fine);
  });
  parallel_for(net.ortho_pool.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j) ctx.ortho_N[j] = normalized_into(g, net.ortho_pool[j].members, ctx.V_fine);
  });

  const double thr = in.p(kRef * s.delta);
  ctx.ref.assign(ctx.V_fine.size(), -1);
  ctx.ref_failure.assign(ctx.V_fine.size(), std::string());
  for (std::size_t k = 0; k < ctx.V_fine.size(); ++k) {
    int found = -1;
    for (std::size_t i = 0; i < net.net.size() && found < 0; ++i)
      if (ctx.net_N[i][k] >= thr) found = static_cast<int>(i);
    if (found < 0) {
      ctx.ref_failure[k] = "no cluster found around w";
    } else if (!net.net[found].complete(in.d)) {
      ctx.ref_failure[k] = "reference frame incomplete";
    } else {
      ctx.ref[k] = found;
    }
  }
  return ctx;
}

RefineResult refine_fine(const Graph& g, const netframe::NetOutput& net, const FineContext& ctx,
                         const Scales& s, const ModelInputs& in) {
  (void)g;
  const std::size_t nf = ctx.V_fine.size();
  const double coarse = in.p(kCoarse * s.delta);
  std::vector<VertexSet> members(nf);
  parallel_for(nf, [&](std::size_t b, std::size_t e) {
    for (std::size_t w = b; w < e; ++w) {
      if (ctx.ref[w] < 0) continue;
      const auto& UN = ctx.net_N[ctx.ref[w]];
      for (std::size_t v = 0; v < nf; ++v)
        if (UN[v] >= coarse && ctx.psi(net, w, v) <= s.lambda) members[w].push_back(ctx.V_fine[v]);
    }
  });
  RefineResult rr;
  for (std::size_t w = 0; w < nf; ++w) {
    if (ctx.ref[w] < 0) {
      rr.failures.push_back({ctx.V_fine[w], ctx.ref_failure[w]});
      continue;
    }
    rr.clusters.push_back({ctx.V_fine[w], std::move(members[w]), s.lambda});
  }
  if (rr.clusters.empty() && nf > 0)
    throw StageFailure("refine-fine: no cluster found around any fine vertex");
  return rr;
}

FineNet refine_fine_net(const netframe::NetOutput& net, const FineContext& ctx, double zeta,
                        const Scales& s, const ModelInputs& in, const ParameterConfig& cfg) {
  FineNet fn;
  fn.zeta = zeta;
  const bool ok = cfg.C_fine_net * s.fe_m <= zeta && zeta <= s.eta;
  if (!ok) {
    const std::string msg = "fine-net scale zeta outside [C fe(m), eta]";
    if (cfg.strict) throw ConfigError(msg);
    fn.diagnostics.push_back(msg);
  }
  const std::size_t nf = ctx.V_fine.size();
  const double coarse = in.p(kCoarse * s.delta);
  const double tau = 10.0 * in.p.L_p() * zeta;
  std::vector<char> covered(nf, 0);
  for (std::size_t w = 0; w < nf; ++w) {
    if (covered[w]) continue;
    VertexSet cover;
    if (ctx.ref[w] < 0) {
      covered[w] = 1;
      cover.push_back(ctx.V_fine[w]);
      fn.diagnostics.push_back("centre " + std::to_string(ctx.V_fine[w]) +
                               " has no reference frame; covers itself only");
    } else {
      const auto& UN = ctx.net_N[ctx.ref[w]];
      for (std::size_t v = w; v < nf; ++v) {
        if (covered[v]) continue;
        if (UN[v] >= coarse && ctx.psi(net, w, v) < tau) {
          covered[v] = 1;
          cover.push_back(ctx.V_fine[v]);
        }
      }
      if (!covered[w]) {
        covered[w] = 1;
        cover.insert(cover.begin(), ctx.V_fine[w]);
      }
    }
    fn.S.push_back(ctx.V_fine[w]);
    fn.cover.push_back(std::move(cover));
  }
  return fn;
}

void write_fine_report(std::ostream& os, const RefineResult& rr, const FineNet& fn) {
  os << "FINE clusters=" << rr.clusters.size() << " failures=" << rr.failures.size()
     << " centres=" << fn.S.size() << " zeta=" << fn.zeta << '\n';
  for (const auto& c : rr.clusters) {
    os << "CLUSTER owner=" << c.owner << " lambda=" << c.lambda_used << " size=" << c.members.size();
    for (Vertex v : c.members) os << ' ' << v;
    os << '\n';
  }
  for (const auto& f : rr.failures) os << "FAILED " << f.w << ' ' << f.reason << '\n';
  for (std::size_t i = 0; i < fn.S.size(); ++i) {
    os << "COVER centre=" << fn.S[i] << " size=" << fn.cover[i].size();
    for (Vertex v : fn.cover[i]) os << ' ' << v;
    os << '\n';
  }
  for (const auto& dmsg : fn.diagnostics) os << "NOTE " << dmsg << '\n';
}

}  // namespace rgg::refinement
