#pragma once

#include "rgg/assembly.hpp"
#include "rgg/harness.hpp"
#include "rgg/latent.hpp"
#include "rgg/params.hpp"

namespace rgg::testing {

/// Desk-preset graph with |V| = 2000 and its (0, 1) run, built once per process.
struct DeskRun {
  harness::ExperimentConfig cfg;
  ModelInputs in;
  GeneratedGraph gen;
  Scales s;
  std::vector<VertexSet> parts;
  assembly::RunResult run;
};

inline const DeskRun& desk_run() {
  static const DeskRun r = [] {
    DeskRun d;
    d.cfg = harness::desk_preset();
    d.cfg.n = 2000;
    d.cfg.seed = 3;
    d.in = harness::model_inputs(d.cfg);
    d.gen = generate_graph(harness::manifold_of(d.cfg), harness::measure_of(d.cfg), d.in.p, d.cfg.q,
                           d.cfg.n, d.cfg.seed);
    d.s = resolve_scales(d.cfg.params, d.in, d.cfg.n / 4.0);
    d.parts = assembly::partition8(d.cfg.n, d.cfg.seed);
    d.run = assembly::run_pair(d.gen.graph, d.parts, 0, 1, d.s, d.in, d.cfg.params, d.cfg.seed);
    return d;
  }();
  return r;
}

}  // namespace rgg::testing
