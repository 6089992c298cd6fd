#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rgg/errors.hpp"
#include "rgg/harness.hpp"
#include "rgg/parallel.hpp"
#include "rgg/rng.hpp"
#include "rgg/suites.hpp"

using namespace rgg;
using namespace rgg::harness;
using geometry::ManifoldModel;
using geometry::Point;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("rgg_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

LatentPositions torus_points(std::uint32_t n, std::uint64_t seed) {
  CounterStream s(seed, StreamTag::Aux, 0);
  std::vector<Point> pts;
  for (std::uint32_t i = 0; i < n; ++i) pts.push_back(Point::torus({s.uniform(), s.uniform()}));
  return LatentPositions(ManifoldModel::flat_torus(2), pts);
}

assembly::DistanceMatrix shifted(const LatentPositions& lat, double shift) {
  assembly::DistanceMatrix dm(lat.size());
  for (std::uint32_t i = 0; i < lat.size(); ++i)
    for (std::uint32_t j = i + 1; j < lat.size(); ++j) dm.set(i, j, lat.distance(i, j) + shift);
  return dm;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, JsonRoundTrip) {
  auto cfg = desk_preset();
  cfg.atoms.push_back({{0.25, 0.75}, 0.01});
  cfg.seed = 99;
  cfg.params.C_fine_net = 13.5;
  EXPECT_EQ(from_json(to_json(cfg)), cfg);
  const auto path = scratch("config.json");
  save_config(path.string(), cfg);
  EXPECT_EQ(load_config(path.string()), cfg);
  std::filesystem::remove(path);
}

TEST(Config, RejectsUnknownAndInvalid) {
  EXPECT_THROW(from_json(R"({"params": {"gamma": 1}})"), ConfigError);
  EXPECT_THROW(from_json(R"({"bogus": 1})"), ConfigError);
  EXPECT_THROW(from_json(R"({"stages": {"plot": true}})"), ConfigError);
  EXPECT_THROW(from_json(R"({"params": 3})"), ConfigError);
  EXPECT_THROW(from_json("{"), ConfigError);
  EXPECT_THROW(from_json(R"({"q": 0})"), ConfigError);
  EXPECT_THROW(from_json(R"({"connection": "nope"})"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Evaluate, ExactAndShiftedEstimates) {
  const auto lat = torus_points(30, 4);
  const auto exact = evaluate(shifted(lat, 0.0), lat, 1.0);
  EXPECT_EQ(exact.pairs, 435u);
  EXPECT_EQ(exact.max_abs_error, 0.0);
  EXPECT_EQ(exact.mean_abs_error, 0.0);
  const auto up = evaluate(shifted(lat, 0.01), lat, 1.0);
  EXPECT_NEAR(up.max_abs_error, 0.01, 1e-15);
  EXPECT_NEAR(up.mean_abs_error, 0.01, 1e-15);
  EXPECT_NEAR(up.p50, 0.01, 1e-15);
  EXPECT_EQ(up.below_latent, 0u);
  const auto down = evaluate(shifted(lat, -0.001), lat, 1.0);
  EXPECT_EQ(down.below_latent, 435u);
  EXPECT_NEAR(down.fitted_constant, down.max_abs_error / down.theory_scale, 1e-15);
}

TEST(Evaluate, InfinitePairsCountedAndDumpRecomputes) {
  const auto lat = torus_points(20, 5);
  auto dm = shifted(lat, 0.0);
  for (std::uint32_t i = 0; i < 20; ++i)
    for (std::uint32_t j = i + 1; j < 20; ++j) dm.set(i, j, lat.distance(i, j) + 0.001 * (i + j));
  dm.set(2, 7, assembly::kInf);
  const auto path = scratch("errors.bin");
  const auto rep = evaluate(dm, lat, 1.0, path.string());
  EXPECT_EQ(rep.infinite_pairs, 1u);
  std::uint32_t n = 0;
  const auto errs = read_error_dump(path.string(), &n);
  EXPECT_EQ(n, 20u);
  ASSERT_EQ(errs.size(), 190u);
  std::size_t k = 0;
  for (std::uint32_t i = 0; i < 20; ++i)
    for (std::uint32_t j = i + 1; j < 20; ++j, ++k) EXPECT_EQ(errs[k], std::fabs(dm(i, j) - lat.distance(i, j)));
  std::filesystem::remove(path);
}

TEST(Evaluate, FilesRefuseWithoutLatent) {
  EXPECT_THROW(evaluate_files("/nonexistent.dmat", "/nonexistent.csv", ManifoldModel::flat_torus(2), 1.0),
               ConfigError);
}

TEST(NearestRank, Examples) {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(nearest_rank(v, 0.5), 5.0);
  EXPECT_EQ(nearest_rank(v, 0.9), 9.0);
  EXPECT_EQ(nearest_rank(v, 0.99), 10.0);
  EXPECT_EQ(nearest_rank(v, 0.01), 1.0);
  EXPECT_EQ(nearest_rank({3.5}, 0.5), 3.5);
}

TEST(Report, ColumnOrder) {
  EXPECT_EQ(report_header(),
            "n,q,seed,pairs,max_abs_error,mean_abs_error,p50,p90,p99,theory_scale,fitted_constant,"
            "below_latent,t_generate,t_stage1,t_paths,t_evaluate,t_total,failed_runs,failed_vertices,"
            "infinite_pairs");
  ErrorReport r;
  r.n = 400;
  r.seed = 7;
  const auto row = report_row(r);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 19);
  EXPECT_EQ(row.rfind("400,1,7,", 0), 0u);
}

TEST(TheoryScale, Formula) {
  const double n = 1000.0 / 4.0;
  EXPECT_NEAR(theory_scale(1000, 0.5, 2), std::pow(std::log(n) * std::log(n) / (0.5 * n), 0.25), 1e-14);
}

TEST(LogLogSlope, Examples) {
  EXPECT_NEAR(loglog_slope({1, 10, 100}, {2, 20, 200}), 1.0, 1e-12);
  EXPECT_NEAR(loglog_slope({1, 4, 16, 64}, {1, 0.5, 0.25, 0.125}), -0.5, 1e-12);
}

TEST(RunExperiment, ToyRunWritesArtifactsAndIsThreadIndependent) {
  auto cfg = desk_preset();
  cfg.n = 403;  // truncated to 400
  cfg.seed = 11;
  cfg.dump_errors = true;
  const auto d1 = scratch("run1"), d3 = scratch("run3");
  cfg.out_dir = d1.string();
  const unsigned saved = threads();
  set_threads(1);
  const auto o1 = run_experiment(cfg);
  cfg.out_dir = d3.string();
  set_threads(3);
  const auto o3 = run_experiment(cfg);
  set_threads(saved);
  EXPECT_TRUE(o1.exit_code == 0 || o1.exit_code == 2);
  EXPECT_EQ(o1.exit_code, o3.exit_code);
  EXPECT_EQ(o1.report.n, 400u);
  EXPECT_EQ(o1.report.pairs, 400u * 399u / 2u);
  for (const char* f : {"graph.rgg1", "latent.csv", "distances.dmat", "errors.bin"}) {
    ASSERT_TRUE(std::filesystem::exists(d1 / f)) << f;
    EXPECT_EQ(slurp(d1 / f), slurp(d3 / f)) << f;
  }
  ASSERT_TRUE(std::filesystem::exists(d1 / "report.csv"));
  EXPECT_EQ(o1.report.max_abs_error, o3.report.max_abs_error);
  EXPECT_EQ(o1.report.p99, o3.report.p99);
  EXPECT_EQ(o1.report.failed_vertices, o3.report.failed_vertices);
  const auto again = evaluate_files((d1 / "distances.dmat").string(), (d1 / "latent.csv").string(),
                                    ManifoldModel::flat_torus(2), cfg.q);
  EXPECT_EQ(again.max_abs_error, o1.report.max_abs_error);
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d3);
}

TEST(Calibration, InfeasibleGridReportsFrontier) {
  auto base = desk_preset();
  base.params.strict = true;  // desk scale violates the asymptotic preconditions
  CalibrationSuite suite;
  suite.seeds = {1};
  suite.n = 400;
  suite.c = {0.3, 0.5};
  try {
    calibrate_constants(base, suite);
    FAIL() << "expected StageFailure";
  } catch (const StageFailure& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("frontier"), std::string::npos);
    EXPECT_NE(what.find("c=0.3"), std::string::npos);
    EXPECT_NE(what.find("c=0.5"), std::string::npos);
  }
}

TEST(Suites, GeometrySmall) {
  suites::GeometryConfig cfg;
  cfg.triangles = 500;
  const auto rep = suites::geometry_suite(cfg);
  EXPECT_TRUE(rep.pass());
  EXPECT_LE(rep.max_exact_error, cfg.exact_tol);
  EXPECT_GT(rep.remainder_checked, 0u);
}

TEST(Suites, ConcentrationSmall) {
  suites::ConcentrationConfig cfg;
  cfg.U = 300;
  cfg.V = 100;
  cfg.redraws = 30;
  const auto rep = suites::concentration_suite(cfg);
  EXPECT_EQ(rep.redraws, 30u);
  EXPECT_LE(rep.max_fluctuation, 3.0 * rep.fe);
  EXPECT_LE(rep.fluctuation_rate(), 0.1);
}

TEST(Suites, KernelGapSmall) {
  suites::KernelGapConfig cfg;
  cfg.pairs = 10;
  cfg.samples = 20000;
  const auto rep = suites::kernel_gap_suite(cfg);
  EXPECT_EQ(rep.pairs, 10u);
  EXPECT_EQ(rep.violations, 0u);
  EXPECT_GT(rep.c, 0.0);
}

TEST(Suites, TorusKernelTableMatchesConstantConnection) {
  // p == 1 everywhere: <x, y> = 1 for every displacement.
  const auto one = ConnectionFunction::linear_clip(0.0, 1.0, 0.5, 0.7071067811865476);
  const suites::TorusKernelTable t(one, 32);
  for (double dx : {0.0, 0.1, 0.37, 0.5})
    for (double dy : {0.0, 0.2, 0.45}) EXPECT_NEAR(t(dx, dy), 1.0, 1e-12);
}
