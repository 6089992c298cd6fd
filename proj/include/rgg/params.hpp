#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rgg/connection.hpp"

namespace rgg {

/// What the reconstruction is told about the model: dimension, sparsity, the
/// connection function, and lower bounds on the accessible radius and the
/// Ahlfors constant.
struct ModelInputs {
  int d = 2;
  double q = 1.0;
  ConnectionFunction p;
  double r_G = 0.0;
  double c_mu = 0.0;
};

/// Accessible radius (1/16) min{r_p, rinj, 1/sqrt(kappa), r_mu}; kappa = 0
/// contributes no bound.
double accessible_radius(double r_p, double rinj, double kappa, double r_mu);

/// Coupled scales and the constants that the theory leaves symbolic. Zero
/// means "use the formula".
struct ParameterConfig {
  double c = 0.5;             // gap constant: r = r_scale * c * r_G, delta = c r, eta = c delta
  double r_scale = 1.0;       // r as a fraction of c * r_G (<= 1)
  double r_G = 0.0;           // override of the accessible radius
  double m = 0.0;             // minimum cluster size
  double n_cn = 0.0;          // |V_cn|; capped by the available vertices
  double c_kernel = 0.0;      // kernel-gap constant used by GenerateCluster
  double C_cluster = 8.0;     // GenerateCluster size constant
  double c_ortho = 1.0;       // orthogonal-cluster existence constant
  double c_ortho_prime = 1.0; // orthogonal-cluster density constant
  double c_nav = 1.0;         // frame navigation constant
  double C_fine_net = 20.0;   // fine-net cover radius constant
  double c_fine = 1.0;        // balanced-radius constant for xi
  double lambda = 0.0;        // override of the refine-fine threshold
  double relax = 1.0;         // desk-scale window multiplier
  int relax_retries = 3;
  bool strict = true;         // asymptotic preconditions raise ConfigError when true

  bool operator==(const ParameterConfig&) const = default;
};

/// Scales resolved for one problem size.
struct Scales {
  double n = 0.0;  // theory-level n (= |V_fine|)
  double r_G = 0.0;
  double r = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  double m = 0.0;
  double n_cn = 0.0;
  double c_kernel = 0.0;
  double c_cluster_small = 0.0;  // density radius constant: c_kernel / (4 max(L_p, 1))
  double fe_m = 0.0;
  double lambda_bal = 0.0;
  double lambda = 0.0;
  double xi = 0.0;
  std::vector<std::string> warnings;  // relaxed preconditions (non-strict mode)
};

/// (sqrt2 (18 L)^{d/2} / (6 sqrt c_mu) * log n / sqrt(q n))^{2/(d+2)}.
double balanced_lambda(double n, double q, int d, double L_p, double c_mu);

/// xi = c_fine (log n / (q n))^{1/(d+2)}.
double balanced_xi(double n, double q, int d, double c_fine);

Scales resolve_scales(const ParameterConfig& cfg, const ModelInputs& in, double n);

}  // namespace rgg
