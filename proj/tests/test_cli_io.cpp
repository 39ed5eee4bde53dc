#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <gtest/gtest.h>
#include <json.hpp>

#include "spiralflow/io.hpp"
#include "spiralflow/runner.hpp"

using namespace spiralflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("spiralflow_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int code;
  std::string out;
};

CliResult cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt";
  const std::string cmd = std::string(SPIRALFLOW_CLI_PATH) + " " + args + " > " + out.string() + " 2> " +
                          (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Values of one SCALARS block of a legacy VTK file.
std::vector<double> vtk_field(const std::string& text, const std::string& name, std::size_t n) {
  std::istringstream in(text);
  std::string tok;
  while (in >> tok)
    if (tok == "SCALARS" && (in >> tok) && tok == name) break;
  std::string type, comps, lookup, table;
  in >> type >> comps >> lookup >> table;
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    in >> tok;
    v[k] = tok == "nan" ? NAN : std::stod(tok);
  }
  return v;
}

}  // namespace

TEST(Io, FormatNumberRoundTrips) {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 6.02214076e23, 2.2250738585072014e-308}) EXPECT_EQ(std::stod(format_number(v)), v);
  EXPECT_EQ(format_number(NAN), "nan");
}

TEST(Io, DiagnosticsCsvLayout) {
  Diagnostics d;
  d.samples.push_back({0.0, 1.0, -1.0, 0.5, 2.0, 0.0, 0.0});
  d.samples.push_back({2.0, 5.0, -1.0, 0.5, 2.0, 0.0, 0.0});
  const auto l = lines(diagnostics_csv(d));
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0], "t,S,min_u,sup_grad,sup_ut,S_over_t");
  EXPECT_EQ(l[1], "0,1,-1,0.5,2,nan");
  EXPECT_EQ(l[2], "2,5,-1,0.5,2,2.5");
}

TEST(Io, VtkSnapshotLayout) {
  const DomainSpec d = detail::annulus(2.0, 0.5);
  const Grid g = build_grid(d, 0.1);
  const ThetaField tf(g, centers_of(d));
  ScalarField u = g.make_field<double>();
  for (int k = 0; k < static_cast<int>(g.size()); ++k)
    if (g.has_value(k)) u[k] = 0.25 * g.position(k).x + 7.0;
  const std::string text = vtk_snapshot(g, u, tf, 1.5);
  const auto l = lines(text);
  EXPECT_EQ(l[0], "# vtk DataFile Version 3.0");
  EXPECT_EQ(l[2], "ASCII");
  EXPECT_EQ(l[3], "DATASET STRUCTURED_POINTS");
  EXPECT_EQ(l[4], "DIMENSIONS " + std::to_string(g.nx) + " " + std::to_string(g.ny) + " 1");
  EXPECT_EQ(l[5], "SPACING 0.10000000000000001 0.10000000000000001 1");
  EXPECT_EQ(l[6], "ORIGIN " + format_number(g.position(0).x) + " " + format_number(g.position(0).y) + " 0");
  EXPECT_EQ(l[7], "POINT_DATA " + std::to_string(g.size()));
  const auto uu = vtk_field(text, "u", g.size());
  const auto res = vtk_field(text, "u_minus_theta_mod2pi", g.size());
  const auto mask = vtk_field(text, "mask", g.size());
  for (int k = 0; k < static_cast<int>(g.size()); ++k) {
    EXPECT_EQ(static_cast<int>(mask[k]), static_cast<int>(g.kind[k]));
    if (!g.has_value(k)) continue;
    EXPECT_EQ(uu[k], u[k]);
    EXPECT_GE(res[k], 0.0);
    EXPECT_LT(res[k], 2 * std::numbers::pi);
    EXPECT_NEAR(std::remainder(res[k] - (u[k] - tf.principal()[k]), 2 * std::numbers::pi), 0.0, 1e-12);
  }
}

TEST(Io, VtkHeightsAndSpiralsCsv) {
  const DomainSpec d = detail::annulus(2.0, 0.5);
  const Grid g = build_grid(d, 0.1);
  const ThetaField tf(g, centers_of(d));
  const ScalarField u = g.make_field<double>(9.0);
  const HeightMap hm = height(g, u, tf, 1.0, 3.0);
  const std::string text = vtk_heights(g, hm);
  const auto k = vtk_field(text, "k", g.size());
  const auto h = vtk_field(text, "height", g.size());
  for (int n : g.interior) {
    EXPECT_EQ(k[n], static_cast<double>(hm.k[n]));
    EXPECT_EQ(h[n], hm.height[n]);
  }
  const std::vector<SpiralCurve> curves{{{{0, 0}, {1, 0.5}}, 2.0, false}, {{{3, 4}}, 2.0, true}};
  const auto l = lines(spirals_csv(curves));
  ASSERT_EQ(l.size(), 4u);
  EXPECT_EQ(l[0], "curve_id,point_index,x,y,t");
  EXPECT_EQ(l[1], "0,0,0,0,2");
  EXPECT_EQ(l[2], "0,1,1,0.5,2");
  EXPECT_EQ(l[3], "1,0,3,4,2");
}

TEST(Io, WriteFailuresRaise) {
  EXPECT_THROW(write_text("/nonexistent_dir_for_spiralflow/x.txt", "x"), SnapshotIOFailure);
  const fs::path dir = scratch_dir("io");
  write_text(dir / "file", "x");
  EXPECT_THROW(ensure_directory(dir / "file"), SnapshotIOFailure);
}

TEST(Execute, WritesArtifacts) {
  const fs::path dir = scratch_dir("execute");
  Scenario sc = build_scenario("annulus_radial");
  sc.params.t_end = 1.0;
  sc.params.snapshot_interval = 0.5;
  ExecuteOptions opt;
  opt.out_dir = dir;
  const RunOutcome o = execute(sc, opt);
  for (const char* f : {"snapshot_0000.vtk", "snapshot_0001.vtk", "snapshot_0002.vtk", "heights_0000.vtk",
                        "heights_0002.vtk", "diagnostics.csv", "spirals.csv", "summary.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  EXPECT_FALSE(fs::exists(dir / "snapshot_0003.vtk"));
  EXPECT_EQ(slurp(dir / "diagnostics.csv"), diagnostics_csv(o.result.diagnostics));
  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(j["scenario"], "annulus_radial");
  EXPECT_EQ(o.spiral_times, (std::vector<double>{0.0, 0.5, 1.0}));
}

TEST(Cli, CheckReportsStaticConstants) {
  const fs::path dir = scratch_dir("check");
  const CliResult r = cli("check --scenario annulus_constant --out " + (dir / "out").string(), dir);
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::ordered_json::parse(r.out);
  EXPECT_EQ(j["growth_bounds"], nlohmann::ordered_json::parse("[1.5, 6.0]"));
  EXPECT_EQ(j["C0"].get<double>(), 2.0);
  EXPECT_EQ(j["K0"].get<double>(), 1.5);
  EXPECT_TRUE(j["Sc_slope"].is_null());
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  const std::vector<std::string> expected{"scenario", "h",        "epsilon",  "t_end",    "C0",
                                          "K0",       "K0_numeric", "M",      "forcing_margin",
                                          "growth_bounds", "Sc_slope", "Sc_fekete", "tip_rate",
                                          "S_over_T", "checks"};
  EXPECT_EQ(keys, expected);
  EXPECT_EQ(nlohmann::ordered_json::parse(slurp(dir / "out" / "summary.json")), j);
}

TEST(Cli, RunWithZeroFinalTimeWritesInitialSnapshot) {
  const fs::path dir = scratch_dir("run0");
  const CliResult r = cli("run --scenario annulus_rotating --h 0.05 --t-end 0 --out " + (dir / "out").string(), dir);
  ASSERT_EQ(r.code, 0);
  const Scenario sc = build_scenario("annulus_rotating");
  const Grid g = build_grid(sc.domain, 0.05);
  const auto u = vtk_field(slurp(dir / "out" / "snapshot_0000.vtk"), "u", g.size());
  for (int k : g.interior) EXPECT_EQ(u[k], sc.initial(g.position(k)));
  EXPECT_FALSE(fs::exists(dir / "out" / "snapshot_0001.vtk"));
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["t_end"].get<double>(), 0.0);
  EXPECT_EQ(j["h"].get<double>(), 0.05);
}

TEST(Cli, ErrorsMapToExitCodes) {
  const fs::path dir = scratch_dir("errors");
  EXPECT_EQ(cli("run --scenario no_such_scenario", dir).code, 1);
  EXPECT_EQ(cli("run --scenario annulus_constant --bogus-flag 3", dir).code, 1);
  EXPECT_EQ(cli("run --scenario annulus_constant --scheme implicit", dir).code, 1);
  EXPECT_EQ(cli("run --scenario annulus_constant --h 0.2", dir).code, 1);  // coarser than r/4
  EXPECT_EQ(cli("", dir).code, 1);
  write_text(dir / "bad.json", "{ not json");
  EXPECT_EQ(cli("check --scenario " + (dir / "bad.json").string(), dir).code, 1);
}

TEST(Cli, RunsCustomJsonScenario) {
  const fs::path dir = scratch_dir("custom");
  write_text(dir / "custom.json", R"({
    "name": "small_pair",
    "domain": {"outer_radius": 1.5, "hole_radius": 0.3,
               "holes": [{"center": [-0.5, 0], "strength": 1}, {"center": [0.5, 0], "strength": -1}]},
    "forcing": {"type": "constant", "value": 1.0},
    "initial": {"type": "constant", "value": 0.0},
    "solver": {"h": 0.05, "t_end": 0.5, "scheme": "central"},
    "checks": ["barrier", "height_residual"]
  })");
  const CliResult r = cli("run --scenario " + (dir / "custom.json").string() + " --out " + (dir / "out").string(), dir);
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["scenario"], "small_pair");
  EXPECT_TRUE(j["checks"]["barrier"].get<bool>());
  EXPECT_TRUE(j["checks"]["height_residual"].get<bool>());
  const auto csv = lines(slurp(dir / "out" / "diagnostics.csv"));
  EXPECT_EQ(csv[0], "t,S,min_u,sup_grad,sup_ut,S_over_t");
  EXPECT_EQ(csv.size(), 7u);  // t = 0, 0.1, ..., 0.5
}
