#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rgg/assembly.hpp"
#include "rgg/errors.hpp"
#include "rgg/harness.hpp"
#include "rgg/latent.hpp"
#include "rgg/lowerbound.hpp"
#include "rgg/parallel.hpp"
#include "rgg/suites.hpp"

namespace {

using namespace rgg;

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned threads = 1;
  std::string out;
  double relax = 0.0;
  bool dump_errors = false;
};

harness::ExperimentConfig resolve(const Common& c) {
  harness::ExperimentConfig cfg;
  if (!c.config.empty()) cfg = harness::load_config(c.config);
  if (c.seed_set) cfg.seed = c.seed;
  if (!c.out.empty()) cfg.out_dir = c.out;
  if (c.relax > 0.0) cfg.params.relax = c.relax;
  if (c.dump_errors) cfg.dump_errors = true;
  return cfg;
}

void print_report(const harness::ErrorReport& r) {
  std::cout << harness::report_header() << '\n' << harness::report_row(r) << '\n';
}

int cmd_generate(const Common& c) {
  const auto cfg = resolve(c);
  const auto m = harness::manifold_of(cfg);
  const auto in = harness::model_inputs(cfg);
  const std::uint32_t N = cfg.n - cfg.n % 8;
  const auto gen = generate_graph(m, harness::measure_of(cfg), in.p, cfg.q, N, cfg.seed);
  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path dir(cfg.out_dir);
  write_rgg1((dir / "graph.rgg1").string(), gen.graph, m.dim(), m.descriptor());
  write_latent_csv((dir / "latent.csv").string(), gen.latent);
  std::cout << "vertices " << N << " edges " << gen.graph.edge_count() << '\n';
  return 0;
}

int cmd_reconstruct(const Common& c, const std::string& graph_path, bool csv) {
  const auto cfg = resolve(c);
  const auto in = harness::model_inputs(cfg);
  GraphHeader hdr;
  const Graph g = read_rgg1(graph_path, &hdr);
  if (hdr.n % 8 != 0) throw ConfigError("graph size must be a multiple of 8");
  const auto fd = assembly::fine_distance(g, in, cfg.params, cfg.seed);
  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path dir(cfg.out_dir);
  assembly::write_dmat((dir / "distances.dmat").string(), fd.dm);
  if (csv) assembly::write_dmat_csv((dir / "distances.csv").string(), fd.dm);
  std::ofstream ds(dir / "diagnostics.txt");
  for (const auto& d : fd.diagnostics) ds << d << '\n';
  std::cout << "failed_runs " << fd.failed_runs << " failed_vertices " << fd.failed_vertices
            << " infinite_pairs " << fd.infinite_pairs << '\n';
  return fd.failed_runs > 0 ? 2 : 0;
}

int cmd_evaluate(const Common& c, const std::string& dmat, const std::string& latent) {
  const auto cfg = resolve(c);
  print_report(harness::evaluate_files(dmat, latent, harness::manifold_of(cfg), cfg.q));
  return 0;
}

int cmd_pipeline(const Common& c) {
  const auto out = harness::run_experiment(resolve(c));
  print_report(out.report);
  for (const auto& d : out.diagnostics) std::cerr << d << '\n';
  return out.exit_code;
}

int cmd_lowerbound(const Common& c, std::uint32_t n, std::uint32_t trials, double kappa,
                   int res) {
  lowerbound::CouplingConfig base;
  base.n = n;
  base.trials = trials;
  base.grid_resolution = res;
  base.seed = c.seed_set ? c.seed : 1;
  const double rho = 1.0 / std::sqrt(static_cast<double>(n));
  base.atom_mass = std::log(static_cast<double>(n)) / (8.0 * n);
  std::filesystem::path dir(c.out.empty() ? "out" : c.out);
  std::filesystem::create_directories(dir);
  bool ok = true;
  for (double f : {2.0, 1.0, 0.5}) {
    auto cfg = base;
    cfg.profile = lowerbound::BumpProfile::with_default_alpha(f * rho, kappa);
    const double cert = lowerbound::curvature_certificate(cfg.profile);
    const auto sep = lowerbound::separation_check(cfg.profile, cfg.d, res, cfg.atom_offset);
    const auto rep = lowerbound::coupled_graphs(cfg);
    std::ofstream os(dir / ("coupling_rb" + std::to_string(f) + ".csv"));
    lowerbound::write_coupling_csv(os, cfg, rep);
    std::cout << "r_bump " << cfg.profile.r_bump << " certificate " << cert << " separation "
              << sep.excess << " >= " << sep.bound << (sep.holds ? " ok" : " FAIL")
              << " mismatch " << rep.mismatch_frequency() << " atom_hit " << rep.atom_hit_frequency()
              << " subset_violations " << rep.subset_violations << '\n';
    ok = ok && sep.holds && cert < kappa && rep.subset_violations == 0;
  }
  return ok ? 0 : 2;
}

int cmd_geomcheck(std::size_t triangles, std::uint64_t seed) {
  suites::GeometryConfig g;
  g.triangles = triangles;
  g.seed = seed;
  const auto r = suites::geometry_suite(g);
  std::cout << "triangles " << r.triangles << " rejected " << r.rejected << '\n'
            << "max_exact_error " << r.max_exact_error << " violations " << r.exact_violations << '\n'
            << "sandwich_violations " << r.sandwich_violations << '\n'
            << "remainder " << r.remainder_violations << "/" << r.remainder_checked << '\n'
            << "angle " << r.angle_violations << "/" << r.angle_checked << '\n'
            << "expansion " << r.expansion_violations << "/" << r.expansion_checked << '\n'
            << "seconds " << r.seconds << '\n';
  return r.pass() ? 0 : 2;
}

int cmd_calibrate(const Common& c, const std::vector<std::uint64_t>& seeds, std::uint32_t n) {
  const auto cfg = resolve(c);
  harness::CalibrationSuite suite;
  if (!seeds.empty()) suite.seeds = seeds;
  suite.n = n;
  suite.c = {cfg.params.c};
  suite.c_kernel = {cfg.params.c_kernel};
  suite.relax = {1.0, 1.25, 1.5, 2.0};
  const auto out = harness::calibrate_constants(cfg, suite);
  for (const auto& l : out.log) std::cout << l << '\n';
  auto sel = cfg;
  sel.params = out.selected;
  std::filesystem::create_directories(sel.out_dir);
  harness::save_config((std::filesystem::path(sel.out_dir) / "calibrated.json").string(), sel);
  return 0;
}

int cmd_bench(const Common& c, const std::vector<std::uint32_t>& ns) {
  const auto cfg = resolve(c);
  const auto sw = harness::scaling_sweep(cfg, ns);
  std::cout << harness::report_header() << '\n';
  for (const auto& r : sw.reports) std::cout << harness::report_row(r) << '\n';
  std::cout << "error_slope " << sw.error_slope << " time_slope " << sw.time_slope << '\n';
  for (int e : sw.exit_codes)
    if (e != 0) return e;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random geometric graph simulation and distance reconstruction"};
  app.require_subcommand(1);
  Common c;
  app.add_option("--config", c.config, "JSON experiment config");
  app.add_option("--seed", c.seed, "seed override")->each([&](const std::string&) { c.seed_set = true; });
  app.add_option("--threads", c.threads, "worker threads");
  app.add_option("--out", c.out, "output directory");
  app.add_option("--relax", c.relax, "window relaxation multiplier (>= 1)");
  app.add_flag("--dump-errors", c.dump_errors, "write the raw per-pair error dump");

  auto* gen = app.add_subcommand("generate", "sample a graph and its latent positions");
  std::string graph_path;
  bool csv = false;
  auto* rec = app.add_subcommand("reconstruct", "estimate all pairwise distances from a graph");
  rec->add_option("--graph", graph_path, "RGG1 graph file")->required();
  rec->add_flag("--csv", csv, "also write distances.csv");
  std::string dmat, latent;
  auto* ev = app.add_subcommand("evaluate", "compare a distance matrix with latent positions");
  ev->add_option("--dmat", dmat, "DMAT file")->required();
  ev->add_option("--latent", latent, "latent CSV")->required();
  auto* pipe = app.add_subcommand("pipeline", "generate, reconstruct and evaluate");
  std::uint32_t lb_n = 2000, lb_trials = 200;
  double lb_kappa = 4096.0;
  int lb_res = 512;
  auto* lb = app.add_subcommand("lowerbound", "conformal bump coupling experiment");
  lb->add_option("--n", lb_n);
  lb->add_option("--trials", lb_trials);
  lb->add_option("--kappa", lb_kappa);
  lb->add_option("--grid", lb_res);
  std::size_t triangles = 10000;
  auto* geo = app.add_subcommand("geomcheck", "comparison-geometry property suite");
  geo->add_option("--triangles", triangles);
  std::vector<std::uint64_t> cal_seeds;
  std::uint32_t cal_n = 4000;
  auto* cal = app.add_subcommand("calibrate", "search constants that pass the stage oracles");
  cal->add_option("--seeds", cal_seeds);
  cal->add_option("--n", cal_n);
  std::vector<std::uint32_t> ns{2000, 4000, 8000};
  auto* bench = app.add_subcommand("bench", "error and runtime scaling sweep");
  bench->add_option("--ns", ns);

  CLI11_PARSE(app, argc, argv);
  set_threads(c.threads);
  try {
    if (*gen) return cmd_generate(c);
    if (*rec) return cmd_reconstruct(c, graph_path, csv);
    if (*ev) return cmd_evaluate(c, dmat, latent);
    if (*pipe) return cmd_pipeline(c);
    if (*lb) return cmd_lowerbound(c, lb_n, lb_trials, lb_kappa, lb_res);
    if (*geo) return cmd_geomcheck(triangles, c.seed_set ? c.seed : 1);
    if (*cal) return cmd_calibrate(c, cal_seeds, cal_n);
    if (*bench) return cmd_bench(c, ns);
  } catch (const StageFailure& e) {
    std::cerr << "stage failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
