#include "rgg/netframe.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rgg/errors.hpp"

namespace rgg::netframe {

namespace {

// Window half-widths and radii of the Stage 1 loop.
constexpr double kJ = 0.93;
constexpr double kW = 0.91;
constexpr double kNear = 1.1;
constexpr double kFar = 1.9;
constexpr double kCoarse = 3.0;

constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

enum Role : std::uint8_t { None = 0, Cn = 1, Net = 2, Ortho = 3 };

// A cluster together with its edge counts to every vertex and its reveal step.
struct Counted {
  VertexSet members;
  std::vector<std::uint32_t> cnt;
  std::size_t step = 0;
};

class Run {
 public:
  Run(const Graph& g, const VertexSet& V_cn, const VertexSet& V_net, const VertexSet& V_ortho,
      const Scales& s, const ModelInputs& in, const ParameterConfig& cfg)
      : g_(g), V_cn_(V_cn), V_net_(V_net), V_ortho_(V_ortho), s_(s), in_(in), cfg_(cfg),
        role_(g.n(), None), extracted_(g.n(), kNever) {
    std::sort(V_net_.begin(), V_net_.end());
    std::sort(V_ortho_.begin(), V_ortho_.end());
    for (Vertex v : V_cn_) role_[v] = Cn;
    for (Vertex v : V_net_) {
      if (role_[v] != None) throw InvalidInput("cluster_net: vertex sets overlap");
      role_[v] = Net;
    }
    for (Vertex v : V_ortho_) {
      if (role_[v] != None) throw InvalidInput("cluster_net: vertex sets overlap");
      role_[v] = Ortho;
    }
  }

  NetOutput run();

 private:
  double p(double x) const { return in_.p(x); }

  // N_C(v), refusing edge blocks that were not revealed at the cluster's step.
  double N(const Counted& c, Vertex v) const {
    if (role_[v] != Net && role_[v] != Ortho)
      throw std::logic_error("count requested outside V_net and V_ortho");
    if (extracted_[v] < c.step) throw std::logic_error("edge block read before its reveal step");
    return c.cnt[v] / (g_.q() * static_cast<double>(c.members.size()));
  }

  // n(.,.): always measured through the earlier of the two clusters.
  double n_between(const Counted& a, const Counted& b) const {
    return a.step < b.step ? N(a, centers_of_(b)) : N(b, centers_of_(a));
  }
  Vertex centers_of_(const Counted& c) const { return center_[&c - clusters_.data()]; }

  bool window(double N, double center, double half) const {
    return p(center + half) <= N && N <= p(center - half);
  }

  std::size_t add_cluster(const ClusterPair& cp, ClusterKind kind, std::size_t index, double relax);

  const Graph& g_;
  VertexSet V_cn_, V_net_, V_ortho_;
  const Scales& s_;
  const ModelInputs& in_;
  const ParameterConfig& cfg_;
  std::vector<std::uint8_t> role_;
  std::vector<std::size_t> extracted_;
  std::vector<Counted> clusters_;
  std::vector<Vertex> center_;
  std::size_t t_ = 1;
  NetOutput out_;
};

std::size_t Run::add_cluster(const ClusterPair& cp, ClusterKind kind, std::size_t index,
                             double relax) {
  Counted c;
  c.members = cp.members;
  c.step = t_;
  c.cnt = counts_into(g_, cp.members);
  std::size_t revealed = 0;
  for (Vertex v : V_net_) revealed += extracted_[v] == kNever;
  for (Vertex v : V_ortho_) revealed += extracted_[v] == kNever;
  for (Vertex v : cp.members) extracted_[v] = t_;
  clusters_.push_back(std::move(c));
  center_.push_back(cp.center);
  out_.reveal_log.push_back({t_, kind, index, cp.center, cp.members.size(), revealed, relax});
  return clusters_.size() - 1;
}

NetOutput Run::run() {
  const int d = in_.d;
  const double r = s_.r, delta = s_.delta, eta = s_.eta;
  const double r2 = std::sqrt(2.0) * r;
  if (V_net_.size() < 2) throw ConfigError("cluster_net needs |V_net| >= 2");
  if (V_cn_.empty()) throw ConfigError("cluster_net needs a nonempty V_cn");

  std::vector<std::size_t> net_ids;    // cluster id of each frame centre
  std::vector<std::size_t> ortho_ids;  // cluster id of each pool entry

  ClusterPair first = clustering::generate_cluster(g_, V_cn_, V_net_, eta, s_.c_kernel);
  out_.net.push_back({first, {}, {}});
  net_ids.push_back(add_cluster(first, ClusterKind::Net, 0, cfg_.relax));

  // max_i N_{U_i}(v) over net clusters, for the candidate test.
  std::vector<double> maxN(g_.n(), 0.0);
  auto update_max = [&](std::size_t cid) {
    for (Vertex v : V_net_)
      if (extracted_[v] == kNever) maxN[v] = std::max(maxN[v], N(clusters_[cid], v));
  };
  update_max(net_ids.back());

  const std::size_t cap = static_cast<std::size_t>(d + 1) * V_net_.size();
  double rho = cfg_.relax;
  bool finished = false;
  while (!finished) {
    ++t_;
    ++out_.iterations;
    if (out_.iterations > cap) {
      out_.complete = false;
      out_.diagnostics.push_back("iteration cap reached");
      break;
    }
    const std::size_t k = out_.net.size() - 1;
    Frame& F = out_.net[k];
    const Counted& Uk = clusters_[net_ids[k]];
    if (!F.complete(d)) {
      const std::size_t s = F.axis_map.size();
      std::size_t pick = kNever;
      for (std::size_t j = 0; j < out_.ortho_pool.size() && pick == kNever; ++j) {
        if (std::find(F.axis_map.begin(), F.axis_map.end(), j) != F.axis_map.end()) continue;
        const Counted& Vj = clusters_[ortho_ids[j]];
        if (!window(n_between(Uk, Vj), r, kJ * delta * rho)) continue;
        bool ok = true;
        for (std::size_t a = 0; a < s && ok; ++a)
          ok = window(n_between(clusters_[ortho_ids[F.axis_map[a]]], Vj), r2, kJ * delta * rho);
        if (ok) pick = j;
      }
      if (pick != kNever) {
        F.axis_map.push_back(pick);
        F.axes.push_back(out_.ortho_pool[pick]);
        continue;
      }
      // Fresh orthogonal cluster from the filtered set W'.
      bool extracted = false;
      for (int attempt = 0; attempt <= cfg_.relax_retries && !extracted; ++attempt) {
        if (attempt > 0) rho *= 1.25;
        VertexSet W;
        for (Vertex w : V_ortho_) {
          if (extracted_[w] != kNever) continue;
          if (!window(N(Uk, w), r, kW * delta * rho)) continue;
          bool ok = true;
          for (std::size_t a = 0; a < s && ok; ++a)
            ok = window(N(clusters_[ortho_ids[F.axis_map[a]]], w), r2, kW * delta * rho);
          if (ok) W.push_back(w);
        }
        if (W.size() < 2) {
          std::ostringstream msg;
          msg << "frame " << k << " axis " << s << ": W' has " << W.size()
              << " vertices at relax " << rho;
          out_.diagnostics.push_back(msg.str());
          continue;
        }
        ClusterPair vc = clustering::generate_cluster(g_, V_cn_, W, eta, s_.c_kernel);
        out_.ortho_pool.push_back(vc);
        ortho_ids.push_back(add_cluster(vc, ClusterKind::Ortho, out_.ortho_pool.size() - 1, rho));
        extracted = true;
      }
      if (!extracted) {
        out_.complete = false;
        out_.diagnostics.push_back("orthogonal cluster search exhausted; stopping");
        finished = true;
      }
      continue;
    }
    rho = cfg_.relax;
    // Frame complete: look for the next net centre.
    Vertex ustar = 0;
    bool found = false;
    for (Vertex v : V_net_) {
      if (extracted_[v] != kNever) continue;
      if (maxN[v] <= p(kNear * delta) && maxN[v] >= p(kFar * delta)) {
        ustar = v;
        found = true;
        break;
      }
    }
    if (!found) {
      finished = true;
      break;
    }
    std::size_t istar = 0;
    for (std::size_t i = 0; i < out_.net.size(); ++i) {
      if (N(clusters_[net_ids[i]], ustar) >= p(kFar * delta)) {
        istar = i;
        break;
      }
    }
    const Frame& Fi = out_.net[istar];
    const Counted& Ui = clusters_[net_ids[istar]];
    std::vector<double> base(d);
    for (int a = 0; a < d; ++a) base[a] = N(clusters_[ortho_ids[Fi.axis_map[a]]], ustar);
    const double radius = rho * in_.p.ell_p() * eta / 6.0;
    ClusterPair U;
    U.center = ustar;
    std::vector<double> cur(d);
    for (Vertex v : V_net_) {
      if (extracted_[v] != kNever) continue;
      for (int a = 0; a < d; ++a) cur[a] = N(clusters_[ortho_ids[Fi.axis_map[a]]], v);
      if (psi_from_counts(base, cur) <= radius && N(Ui, v) >= p(kCoarse * delta))
        U.members.push_back(v);
    }
    out_.net.push_back({U, {}, {}});
    net_ids.push_back(add_cluster(U, ClusterKind::Net, out_.net.size() - 1, rho));
    update_max(net_ids.back());
  }
  for (const auto& F : out_.net)
    if (!F.complete(d)) out_.complete = false;
  return out_;
}

}  // namespace

NetOutput cluster_net(const Graph& g, const VertexSet& V_cn, const VertexSet& V_net,
                      const VertexSet& V_ortho, const Scales& s, const ModelInputs& in,
                      const ParameterConfig& cfg) {
  Run run(g, V_cn, V_net, V_ortho, s, in, cfg);
  return run.run();
}

double psi_from_counts(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InvalidInput("psi: axis count mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (b[i] - a[i]) * (b[i] - a[i]);
  return std::sqrt(sum);
}

double psi_frame(const Graph& g, const Frame& F, Vertex w1, Vertex w2) {
  std::vector<double> a, b;
  for (const auto& ax : F.axes) {
    a.push_back(normalized_count(g, ax.members, w1));
    b.push_back(normalized_count(g, ax.members, w2));
  }
  return psi_from_counts(a, b);
}

namespace {

void write_members(std::ostream& os, const VertexSet& m) {
  os << "MEMBERS";
  for (Vertex v : m) os << ' ' << v;
  os << '\n';
}

VertexSet read_members(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("report truncated");
  std::istringstream ls(line);
  std::string tag;
  ls >> tag;
  if (tag != "MEMBERS") throw InvalidInput("expected MEMBERS line");
  VertexSet m;
  Vertex v;
  while (ls >> v) m.push_back(v);
  return m;
}

}  // namespace

void write_report(std::ostream& os, const NetOutput& net) {
  os << "NET frames=" << net.net.size() << " ortho=" << net.ortho_pool.size()
     << " complete=" << (net.complete ? 1 : 0) << " iterations=" << net.iterations << '\n';
  for (std::size_t j = 0; j < net.ortho_pool.size(); ++j) {
    os << "ORTHO " << j << " center=" << net.ortho_pool[j].center
       << " size=" << net.ortho_pool[j].members.size() << '\n';
    write_members(os, net.ortho_pool[j].members);
  }
  for (std::size_t i = 0; i < net.net.size(); ++i) {
    const Frame& F = net.net[i];
    os << "FRAME " << i << " center=" << F.center.center << " size=" << F.center.members.size()
       << " axes=";
    for (std::size_t a = 0; a < F.axis_map.size(); ++a) os << (a ? "," : "") << F.axis_map[a];
    os << '\n';
    write_members(os, F.center.members);
  }
  for (const auto& e : net.reveal_log) {
    os << "REVEAL step=" << e.step << " kind=" << (e.kind == ClusterKind::Net ? "net" : "ortho")
       << " index=" << e.index << " center=" << e.center << " size=" << e.size
       << " revealed=" << e.revealed << " relax=" << e.relax << '\n';
  }
  for (const auto& dmsg : net.diagnostics) os << "NOTE " << dmsg << '\n';
}

namespace {

std::string field(const std::string& tok, const std::string& key) {
  if (tok.rfind(key + "=", 0) != 0) throw InvalidInput("expected field " + key);
  return tok.substr(key.size() + 1);
}

}  // namespace

NetOutput read_report(std::istream& is) {
  NetOutput net;
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("empty report");
  {
    std::istringstream ls(line);
    std::string tag, a, b, c, dd;
    ls >> tag >> a >> b >> c >> dd;
    if (tag != "NET") throw InvalidInput("expected NET header");
    net.complete = field(c, "complete") == "1";
    net.iterations = std::stoul(field(dd, "iterations"));
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "ORTHO") {
      std::string idx, ctr, sz;
      ls >> idx >> ctr >> sz;
      ClusterPair cp;
      cp.center = static_cast<Vertex>(std::stoul(field(ctr, "center")));
      cp.members = read_members(is);
      net.ortho_pool.push_back(std::move(cp));
    } else if (tag == "FRAME") {
      std::string idx, ctr, sz, ax;
      ls >> idx >> ctr >> sz >> ax;
      Frame F;
      F.center.center = static_cast<Vertex>(std::stoul(field(ctr, "center")));
      std::stringstream as(field(ax, "axes"));
      std::string item;
      while (std::getline(as, item, ',')) {
        if (item.empty()) continue;
        const std::size_t j = std::stoul(item);
        if (j >= net.ortho_pool.size()) throw InvalidInput("axis refers to unknown cluster");
        F.axis_map.push_back(j);
        F.axes.push_back(net.ortho_pool[j]);
      }
      F.center.members = read_members(is);
      net.net.push_back(std::move(F));
    } else if (tag == "REVEAL") {
      std::string st, kind, idx, ctr, sz, rev, rel;
      ls >> st >> kind >> idx >> ctr >> sz >> rev >> rel;
      RevealEntry e;
      e.step = std::stoul(field(st, "step"));
      e.kind = field(kind, "kind") == "net" ? ClusterKind::Net : ClusterKind::Ortho;
      e.index = std::stoul(field(idx, "index"));
      e.center = static_cast<Vertex>(std::stoul(field(ctr, "center")));
      e.size = std::stoul(field(sz, "size"));
      e.revealed = std::stoul(field(rev, "revealed"));
      e.relax = std::stod(field(rel, "relax"));
      net.reveal_log.push_back(e);
    } else if (tag == "NOTE") {
      std::string rest;
      std::getline(ls, rest);
      if (!rest.empty() && rest[0] == ' ') rest.erase(0, 1);
      net.diagnostics.push_back(rest);
    } else {
      throw InvalidInput("unknown report line: " + tag);
    }
  }
  return net;
}

}  // namespace rgg::netframe
