#include "rgg/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string_view>

#include "json.hpp"

#include "rgg/errors.hpp"
#include "rgg/oracle.hpp"
#include "rgg/parallel.hpp"

namespace rgg::harness {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json params_json(const ParameterConfig& p) {
  return json{{"c", p.c},
              {"r_scale", p.r_scale},
              {"r_G", p.r_G},
              {"m", p.m},
              {"n_cn", p.n_cn},
              {"c_kernel", p.c_kernel},
              {"C_cluster", p.C_cluster},
              {"c_ortho", p.c_ortho},
              {"c_ortho_prime", p.c_ortho_prime},
              {"c_nav", p.c_nav},
              {"C_fine_net", p.C_fine_net},
              {"c_fine", p.c_fine},
              {"lambda", p.lambda},
              {"relax", p.relax},
              {"relax_retries", p.relax_retries},
              {"strict", p.strict}};
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + "s must be given as a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError(std::string("unknown ") + what + ": " + it.key());
}

ParameterConfig params_from(const json& j) {
  ParameterConfig p;
  reject_unknown(j,
                 {"c", "r_scale", "r_G", "m", "n_cn", "c_kernel", "C_cluster", "c_ortho", "c_ortho_prime",
                  "c_nav", "C_fine_net", "c_fine", "lambda", "relax", "relax_retries", "strict"},
                 "parameter");
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("c", p.c);
  get("r_scale", p.r_scale);
  get("r_G", p.r_G);
  get("m", p.m);
  get("n_cn", p.n_cn);
  get("c_kernel", p.c_kernel);
  get("C_cluster", p.C_cluster);
  get("c_ortho", p.c_ortho);
  get("c_ortho_prime", p.c_ortho_prime);
  get("c_nav", p.c_nav);
  get("C_fine_net", p.C_fine_net);
  get("c_fine", p.c_fine);
  get("lambda", p.lambda);
  get("relax", p.relax);
  get("relax_retries", p.relax_retries);
  get("strict", p.strict);
  return p;
}

}  // namespace

ExperimentConfig desk_preset() {
  ExperimentConfig cfg;
  cfg.manifold = "torus:2";
  cfg.connection = "linear:2:0:0.5:0.7071067811865476";
  cfg.params.strict = false;
  cfg.params.r_G = 0.45;
  cfg.params.c = 0.45;
  cfg.params.c_kernel = 10.0;
  cfg.params.relax = 2.0;
  cfg.params.lambda = 0.25;
  cfg.params.c_fine = 0.02;
  cfg.params.C_fine_net = 15.0;
  return cfg;
}

std::string to_json(const ExperimentConfig& cfg) {
  json atoms = json::array();
  for (const auto& a : cfg.atoms) atoms.push_back({{"point", a.point}, {"mass", a.mass}});
  json j{{"manifold", cfg.manifold},
         {"atoms", atoms},
         {"connection", cfg.connection},
         {"n", cfg.n},
         {"q", cfg.q},
         {"seed", cfg.seed},
         {"params", params_json(cfg.params)},
         {"stages",
          {{"reconstruct", cfg.reconstruct},
           {"evaluate", cfg.evaluate},
           {"dump_errors", cfg.dump_errors},
           {"provenance", cfg.provenance}}},
         {"out_dir", cfg.out_dir}};
  return j.dump(2);
}

ExperimentConfig from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  reject_unknown(j, {"manifold", "atoms", "connection", "n", "q", "seed", "params", "stages", "out_dir"},
                 "config key");
  if (j.contains("stages"))
    reject_unknown(j.at("stages"), {"reconstruct", "evaluate", "dump_errors", "provenance"}, "stage flag");
  try {
    if (j.contains("manifold")) j.at("manifold").get_to(cfg.manifold);
    if (j.contains("atoms"))
      for (const auto& a : j.at("atoms")) cfg.atoms.push_back({a.at("point").get<std::vector<double>>(), a.at("mass").get<double>()});
    if (j.contains("connection")) j.at("connection").get_to(cfg.connection);
    if (j.contains("n")) j.at("n").get_to(cfg.n);
    if (j.contains("q")) j.at("q").get_to(cfg.q);
    if (j.contains("seed")) j.at("seed").get_to(cfg.seed);
    if (j.contains("params")) cfg.params = params_from(j.at("params"));
    if (j.contains("stages")) {
      const auto& s = j.at("stages");
      if (s.contains("reconstruct")) s.at("reconstruct").get_to(cfg.reconstruct);
      if (s.contains("evaluate")) s.at("evaluate").get_to(cfg.evaluate);
      if (s.contains("dump_errors")) s.at("dump_errors").get_to(cfg.dump_errors);
      if (s.contains("provenance")) s.at("provenance").get_to(cfg.provenance);
    }
    if (j.contains("out_dir")) j.at("out_dir").get_to(cfg.out_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config field: ") + e.what());
  }
  // Validate the descriptors eagerly so errors point at the config.
  try {
    (void)manifold_of(cfg);
    (void)ConnectionFunction::from_descriptor(cfg.connection);
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  if (!(cfg.q > 0.0 && cfg.q <= 1.0)) throw ConfigError("q must lie in (0,1]");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_json(ss.str());
}

void save_config(const std::string& path, const ExperimentConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << to_json(cfg) << '\n';
}

geometry::ManifoldModel manifold_of(const ExperimentConfig& cfg) {
  return geometry::ManifoldModel::from_descriptor(cfg.manifold);
}

geometry::SamplingMeasure measure_of(const ExperimentConfig& cfg) {
  const auto m = manifold_of(cfg);
  if (cfg.atoms.empty()) return geometry::SamplingMeasure::uniform(m);
  std::vector<geometry::Atom> atoms;
  for (const auto& a : cfg.atoms) {
    const auto pt = m.chart() == geometry::Chart::Sphere ? geometry::Point::sphere(a.point)
                                                         : geometry::Point::torus(a.point);
    atoms.push_back({pt, a.mass});
  }
  return geometry::SamplingMeasure::with_atoms(m, std::move(atoms));
}

ModelInputs model_inputs(const ExperimentConfig& cfg) {
  const auto m = manifold_of(cfg);
  const auto mu = measure_of(cfg);
  ModelInputs in;
  in.d = m.dim();
  in.q = cfg.q;
  in.p = ConnectionFunction::from_descriptor(cfg.connection);
  in.r_G = accessible_radius(in.p.r_p(), m.rinj(), m.kappa(), mu.r_mu);
  in.c_mu = mu.c_mu;
  return in;
}

std::string report_header() {
  return "n,q,seed,pairs,max_abs_error,mean_abs_error,p50,p90,p99,theory_scale,fitted_constant,"
         "below_latent,t_generate,t_stage1,t_paths,t_evaluate,t_total,failed_runs,failed_vertices,"
         "infinite_pairs";
}

std::string report_row(const ErrorReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.n << ',' << r.q << ',' << r.seed << ',' << r.pairs << ',' << r.max_abs_error << ','
     << r.mean_abs_error << ',' << r.p50 << ',' << r.p90 << ',' << r.p99 << ',' << r.theory_scale
     << ',' << r.fitted_constant << ',' << r.below_latent << ',' << r.t_generate << ','
     << r.t_stage1 << ',' << r.t_paths << ',' << r.t_evaluate << ',' << r.t_total << ','
     << r.failed_runs << ',' << r.failed_vertices << ',' << r.infinite_pairs;
  return os.str();
}

double nearest_rank(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw InvalidInput("quantile of an empty sample");
  if (!(p > 0.0 && p <= 1.0)) throw InvalidInput("quantile level must lie in (0,1]");
  const auto N = static_cast<double>(sorted.size());
  std::size_t rank = static_cast<std::size_t>(std::ceil(p * N - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

double theory_scale(std::uint32_t N, double q, int d) {
  const double n = N / 4.0;
  const double ln = std::log(n);
  return std::pow(ln * ln / (q * n), 1.0 / (d + 2.0));
}

ErrorReport evaluate(const assembly::DistanceMatrix& dm, const LatentPositions& latent, double q,
                     const std::string& dump_path) {
  const std::size_t n = dm.n();
  if (latent.size() != n) throw InvalidInput("distance matrix and latent sizes differ");
  ErrorReport r;
  r.n = static_cast<std::uint32_t>(n);
  r.q = q;
  r.pairs = n * (n - 1) / 2;
  std::vector<double> err(r.pairs);
  std::vector<std::size_t> below(n, 0);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      std::size_t k = i * (2 * n - i - 1) / 2;
      for (std::size_t j = i + 1; j < n; ++j, ++k) {
        const double lt = latent.distance(static_cast<Vertex>(i), static_cast<Vertex>(j));
        const double d = dm(i, j);
        err[k] = std::abs(d - lt);
        below[i] += d < lt - 1e-12;
      }
    }
  });
  r.below_latent = std::accumulate(below.begin(), below.end(), std::size_t{0});
  r.infinite_pairs = static_cast<std::size_t>(
      std::count_if(err.begin(), err.end(), [](double x) { return std::isinf(x); }));
  if (!dump_path.empty()) {
    std::ofstream os(dump_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + dump_path);
    char header[16] = {'E', 'R', 'R', 'S', 0, 0, 0, 0};
    const std::uint64_t nn = n;
    std::memcpy(header + 8, &nn, 8);
    os.write(header, 16);
    os.write(reinterpret_cast<const char*>(err.data()), static_cast<std::streamsize>(err.size() * 8));
  }
  if (!err.empty()) {
    double sum = 0.0;
    for (double x : err) sum += x;
    r.mean_abs_error = sum / static_cast<double>(err.size());
    std::sort(err.begin(), err.end());
    r.max_abs_error = err.back();
    r.p50 = nearest_rank(err, 0.50);
    r.p90 = nearest_rank(err, 0.90);
    r.p99 = nearest_rank(err, 0.99);
  }
  r.theory_scale = theory_scale(r.n, q, latent.model().dim());
  r.fitted_constant = r.max_abs_error / r.theory_scale;
  return r;
}

std::vector<double> read_error_dump(const std::string& path, std::uint32_t* n) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char header[16];
  if (!is.read(header, 16) || std::memcmp(header, "ERRS", 4) != 0) throw InvalidInput("not an error dump");
  std::uint64_t nn = 0;
  std::memcpy(&nn, header + 8, 8);
  if (n) *n = static_cast<std::uint32_t>(nn);
  std::vector<double> err(nn * (nn - 1) / 2);
  if (!is.read(reinterpret_cast<char*>(err.data()), static_cast<std::streamsize>(err.size() * 8)))
    throw InvalidInput("truncated error dump");
  return err;
}

ErrorReport evaluate_files(const std::string& dmat_path, const std::string& latent_path,
                           const geometry::ManifoldModel& m, double q) {
  if (latent_path.empty() || !std::filesystem::exists(latent_path))
    throw ConfigError("latent positions unavailable; evaluation refused");
  const auto dm = assembly::read_dmat(dmat_path);
  const auto lat = read_latent_csv(latent_path, m);
  return evaluate(dm, lat, q);
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  ExperimentOutcome out;
  const auto t_all = std::chrono::steady_clock::now();
  const auto m = manifold_of(cfg);
  const auto mu = measure_of(cfg);
  const auto in = model_inputs(cfg);
  const std::uint32_t N = cfg.n - cfg.n % 8;
  if (N < 16) throw ConfigError("n must be at least 16");
  if (N != cfg.n) out.diagnostics.push_back("n truncated to " + std::to_string(N));
  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path dir(cfg.out_dir);

  auto t0 = std::chrono::steady_clock::now();
  const auto gen = generate_graph(m, mu, in.p, cfg.q, N, cfg.seed);
  out.report.t_generate = seconds_since(t0);
  write_rgg1((dir / "graph.rgg1").string(), gen.graph, m.dim(), m.descriptor());
  write_latent_csv((dir / "latent.csv").string(), gen.latent);
  out.report.n = N;
  out.report.q = cfg.q;
  out.report.seed = cfg.seed;

  if (cfg.reconstruct) {
    assembly::FineDistanceOptions opt;
    opt.keep_runs = cfg.provenance;
    auto fd = assembly::fine_distance(gen.graph, in, cfg.params, cfg.seed, opt);
    out.report.t_stage1 = fd.seconds_stage1;
    out.report.t_paths = fd.seconds_paths;
    out.report.failed_runs = fd.failed_runs;
    out.report.failed_vertices = fd.failed_vertices;
    out.report.infinite_pairs = fd.infinite_pairs;
    out.diagnostics.insert(out.diagnostics.end(), fd.diagnostics.begin(), fd.diagnostics.end());
    assembly::write_dmat((dir / "distances.dmat").string(), fd.dm);
    if (cfg.provenance) {
      std::ofstream os(dir / "weights.csv");
      assembly::write_weight_provenance(os, assembly::combined_weights(N, fd.runs), fd.runs);
    }
    if (cfg.evaluate) {
      t0 = std::chrono::steady_clock::now();
      const ErrorReport ev = evaluate(fd.dm, gen.latent, cfg.q,
                                      cfg.dump_errors ? (dir / "errors.bin").string() : "");
      const ErrorReport keep = out.report;
      out.report = ev;
      out.report.seed = cfg.seed;
      out.report.t_generate = keep.t_generate;
      out.report.t_stage1 = keep.t_stage1;
      out.report.t_paths = keep.t_paths;
      out.report.failed_runs = keep.failed_runs;
      out.report.failed_vertices = keep.failed_vertices;
      out.report.infinite_pairs = keep.infinite_pairs;
      out.report.t_evaluate = seconds_since(t0);
    }
    if (fd.failed_runs > 0) out.exit_code = 2;
  }
  out.report.t_total = seconds_since(t_all);
  std::ofstream os(dir / "report.csv");
  os << report_header() << '\n' << report_row(out.report) << '\n';
  std::ofstream ds(dir / "diagnostics.txt");
  for (const auto& dmsg : out.diagnostics) ds << dmsg << '\n';
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("slope needs two or more points");
  double mx = 0, my = 0;
  const double k = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / k;
    my += std::log(y[i]) / k;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

SweepResult scaling_sweep(const ExperimentConfig& base, const std::vector<std::uint32_t>& ns) {
  SweepResult sr;
  std::vector<double> xs, es, ts;
  for (std::uint32_t n : ns) {
    ExperimentConfig cfg = base;
    cfg.n = n;
    cfg.out_dir = (std::filesystem::path(base.out_dir) / ("n" + std::to_string(n))).string();
    auto o = run_experiment(cfg);
    sr.reports.push_back(o.report);
    sr.exit_codes.push_back(o.exit_code);
    xs.push_back(n);
    es.push_back(o.report.max_abs_error);
    ts.push_back(o.report.t_stage1 + o.report.t_paths);
  }
  if (ns.size() >= 2) {
    sr.error_slope = loglog_slope(xs, es);
    sr.time_slope = loglog_slope(xs, ts);
  }
  std::filesystem::create_directories(base.out_dir);
  std::ofstream os(std::filesystem::path(base.out_dir) / "sweep.csv");
  os << report_header() << '\n';
  for (const auto& r : sr.reports) os << report_row(r) << '\n';
  os << "# error_slope=" << sr.error_slope << " time_slope=" << sr.time_slope << '\n';
  return sr;
}

CalibrationOutcome calibrate_constants(const ExperimentConfig& base, const CalibrationSuite& suite) {
  CalibrationOutcome out;
  auto grid = [](std::vector<double> v, double fallback) {
    if (v.empty()) v.push_back(fallback);
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto cs = grid(suite.c, base.params.c);
  const auto ks = grid(suite.c_kernel, base.params.c_kernel);
  const auto rs = grid(suite.relax, base.params.relax);
  ExperimentConfig cfg = base;
  cfg.n = suite.n - suite.n % 8;
  const auto m = manifold_of(cfg);
  const auto mu = measure_of(cfg);
  const auto in = model_inputs(cfg);
  std::vector<GeneratedGraph> graphs;
  for (auto seed : suite.seeds) graphs.push_back(generate_graph(m, mu, in.p, cfg.q, cfg.n, seed));
  for (double c : cs)
    for (double k : ks)
      for (double rho : rs) {
        ParameterConfig p = base.params;
        p.c = c;
        p.c_kernel = k;
        p.relax = rho;
        std::ostringstream line;
        line << "c=" << c << " c_kernel=" << k << " relax=" << rho;
        bool all = true;
        try {
          const Scales s = resolve_scales(p, in, cfg.n / 4.0);
          for (std::size_t i = 0; i < graphs.size() && all; ++i) {
            const auto parts = assembly::partition8(cfg.n, suite.seeds[i]);
            const auto run = assembly::run_pair(graphs[i].graph, parts, 0, 1, s, in, p, suite.seeds[i]);
            if (run.failed) {
              line << " seed " << suite.seeds[i] << ": " << run.failure;
              all = false;
              break;
            }
            const auto c1 = oracle::stage1_check(run.net, graphs[i].latent, s, suite.probes_per_side);
            const auto c2 = oracle::stage2_check(graphs[i].graph, run, graphs[i].latent, s, in, p);
            line << " seed " << suite.seeds[i] << ": frames=" << c1.frames
                 << " sep=" << c1.separation_violations << " uncovered=" << c1.uncovered_probes
                 << " window=" << c1.window_violations << " radius=" << c2.radius_violations
                 << " fe=" << c2.fe_violations << " netsep=" << c2.separation_violations
                 << " cover=" << c2.cover_violations << " failed=" << c2.failed_vertices;
            all = c1.pass() && c2.pass();
          }
        } catch (const ConfigError& e) {
          line << " config error: " << e.what();
          all = false;
        }
        line << (all ? " PASS" : " FAIL");
        out.log.push_back(line.str());
        if (all) {
          out.selected = p;
          return out;
        }
      }
  std::string frontier = "calibration failed; frontier:";
  for (const auto& l : out.log) frontier += "\n  " + l;
  throw StageFailure(frontier);
}

}  // namespace rgg::harness
