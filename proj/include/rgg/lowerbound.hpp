#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rgg/bump.hpp"
#include "rgg/connection.hpp"

namespace rgg::lowerbound {

struct CouplingConfig {
  std::uint32_t n = 2000;
  int d = 2;
  BumpProfile profile;
  double atom_mass = 0.0;  // mass of each of the two atoms
  double atom_offset = 0.02;
  double p_scale = 1.0;    // p(x) = exp(-x / p_scale)
  double q = 1.0;
  int grid_resolution = 512;
  std::uint32_t trials = 200;
  std::uint64_t seed = 1;
};

struct TrialOutcome {
  bool mismatch = false;
  std::size_t removed = 0;          // |E(G1) \ E(G2)|
  std::size_t subset_violations = 0;
  bool atoms_hit = false;           // some latent point sits on an atom
  bool both_hit = false;            // both atoms appear
  double expected_removed_bound = 0.0;  // sum over pairs of q (p(d1) - p(chord)) >= E|E1 \ E2|
};

struct CouplingReport {
  std::uint32_t trials = 0;
  std::size_t mismatch_count = 0;
  std::size_t subset_violations = 0;
  double mean_removed = 0.0;
  std::size_t atoms_hit = 0;
  std::size_t both_hit = 0;
  double mean_expected_removed_bound = 0.0;
  std::vector<TrialOutcome> per_trial;

  double mismatch_frequency() const { return trials ? double(mismatch_count) / trials : 0.0; }
  double atom_hit_frequency() const { return trials ? double(atoms_hit) / trials : 0.0; }
};

/// Atoms at centre -/+ (offset, 0, ...) around the bump centre (1/2, ..., 1/2).
std::vector<std::vector<double>> atom_points(int d, double offset);

/// One coupled trial: shared latent points and pair uniforms, flat and bump edge rules.
TrialOutcome coupled_trial(const CouplingConfig& cfg, std::uint32_t trial);
/// As above with a chord table built once for cfg.profile.
TrialOutcome coupled_trial(const CouplingConfig& cfg, std::uint32_t trial, const ChordTable& table);

CouplingReport coupled_graphs(const CouplingConfig& cfg);

/// P(some atom is hit) = 1 - (1 - 2m)^n.
double atom_hit_probability(std::uint32_t n, double m);

/// CSV with the profile echoed in '#' header lines:
/// trial,mismatch,removed,atoms_hit,both_hit,subset_violations,expected_removed_bound
void write_coupling_csv(std::ostream& os, const CouplingConfig& cfg, const CouplingReport& rep);

struct SeparationCheck {
  double value = 0.0;   // lattice |XY|_{M2}
  double error = 0.0;
  double excess = 0.0;  // value - error - 2 offset
  double bound = 0.0;   // 2^-14 min{kappa, 1} r_bump^3
  bool holds = false;
};

/// Lower bound on |XY|_{M2} - |XY|_{M1} for the atom pair.
SeparationCheck separation_check(const BumpProfile& b, int d, int grid_resolution,
                                 double offset = 0.02);

struct UpperCheck {
  double d1 = 0.0;
  double d2 = 0.0;
  double error = 0.0;
  double bound = 0.0;  // 2^-11 kappa r_bump^3
  bool holds = false;  // 0 <= d2 - d1 < bound + error
};

UpperCheck upper_check(const BumpProfile& b, const std::vector<double>& x,
                       const std::vector<double>& y, int grid_resolution);

}  // namespace rgg::lowerbound
