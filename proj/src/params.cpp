#include "rgg/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rgg/errors.hpp"
#include "rgg/graph.hpp"

namespace rgg {

double accessible_radius(double r_p, double rinj, double kappa, double r_mu) {
  const double curv = kappa > 0.0 ? 1.0 / std::sqrt(kappa) : std::numeric_limits<double>::infinity();
  return std::min({r_p, rinj, curv, r_mu}) / 16.0;
}

double balanced_lambda(double n, double q, int d, double L_p, double c_mu) {
  if (!(q * n > 1.0)) throw InvalidInput("balanced lambda needs q n > 1");
  const double pre = std::sqrt(2.0) * std::pow(18.0 * L_p, d / 2.0) / (6.0 * std::sqrt(c_mu));
  return std::pow(pre * std::log(n) / std::sqrt(q * n), 2.0 / (d + 2.0));
}

double balanced_xi(double n, double q, int d, double c_fine) {
  return c_fine * std::pow(std::log(n) / (q * n), 1.0 / (d + 2.0));
}

Scales resolve_scales(const ParameterConfig& cfg, const ModelInputs& in, double n) {
  if (!(cfg.c > 0.0 && cfg.c < 1.0)) throw ConfigError("gap constant c must lie in (0,1)");
  if (!(cfg.r_scale > 0.0 && cfg.r_scale <= 1.0)) throw ConfigError("r_scale must lie in (0,1]");
  if (!(cfg.relax >= 1.0)) throw ConfigError("relaxation multiplier must be >= 1");
  if (!(n >= 3.0)) throw ConfigError("problem size too small");
  Scales s;
  s.n = n;
  s.r_G = cfg.r_G > 0.0 ? cfg.r_G : in.r_G;
  if (!(s.r_G > 0.0)) throw ConfigError("accessible radius must be positive");
  s.r = cfg.r_scale * cfg.c * s.r_G;
  s.delta = cfg.c * s.r;
  s.eta = cfg.c * s.delta;
  if (s.eta > s.r_G) throw ConfigError("eta exceeds the accessible radius");
  const double ell = in.p.ell_p();
  const double c_mu = in.c_mu;
  if (!(c_mu > 0.0)) throw ConfigError("Ahlfors constant must be positive");
  const double mu_min_rG = c_mu * std::pow(s.r_G, in.d);
  s.c_kernel = cfg.c_kernel > 0.0
                   ? cfg.c_kernel
                   : mu_min_rG * ell * ell / (2.0 * std::numbers::pi * std::numbers::pi);
  s.c_cluster_small = 0.25 * s.c_kernel / std::max(in.p.L_p(), 1.0);
  if (cfg.m > 0.0) {
    s.m = cfg.m;
  } else {
    const double rad = cfg.c_ortho_prime * s.c_cluster_small * s.eta * s.eta / 3.0;
    s.m = c_mu * std::pow(rad, in.d) * n / 2.0;
  }
  const double m_eff = std::max(1.0, s.m);
  s.fe_m = fluctuation_scale(n, in.q, m_eff);
  const double ln = std::log(n);
  s.n_cn = cfg.n_cn > 0.0
               ? cfg.n_cn
               : std::ceil(std::pow(cfg.C_cluster, 4) * ln * ln /
                           (in.q * in.q * std::pow(s.eta, 4)));
  auto require = [&](bool ok, const std::string& what) {
    if (ok) return;
    if (cfg.strict) throw ConfigError(what);
    s.warnings.push_back(what);
  };
  require(s.fe_m <= cfg.c * s.eta * s.eta, "fluctuation of m exceeds c eta^2");
  s.lambda_bal = balanced_lambda(n, in.q, in.d, in.p.L_p(), c_mu);
  if (cfg.lambda > 0.0) {
    s.lambda = cfg.lambda;
  } else {
    const double floor = 4.0 * std::sqrt(static_cast<double>(in.d)) * s.fe_m;
    if (floor > s.eta) {
      require(false, "lambda floor 4 sqrt(d) fe(m) exceeds eta");
      s.lambda = s.eta;
    } else {
      s.lambda = std::clamp(s.lambda_bal, floor, s.eta);
    }
  }
  s.xi = balanced_xi(n, in.q, in.d, cfg.c_fine);
  return s;
}

}  // namespace rgg
