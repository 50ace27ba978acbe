#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "partrans/config.hpp"
#include "partrans/harness.hpp"

using namespace partrans;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("partrans_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("key/value parsing") {
  const auto kv = parse_key_values("# comment\ndomain.Lx = 2.5  # trailing\n\n  solver.h=0.05\n");
  CHECK(kv.at("domain.Lx") == "2.5");
  CHECK(kv.at("solver.h") == "0.05");
  CHECK_THROWS_WITH_AS(parse_key_values("a = 1\nbroken\n"), doctest::Contains("line 2"), std::invalid_argument);

  const RunConfig c = config_from_text("case = z1\nsolver.eps = 0.005\nsweep.eps_ratio = 5, 10,20\n");
  CHECK(c.kind == CaseKind::z1);
  CHECK(c.solver.eps == 0.005);
  CHECK(c.sweep.eps_ratio == std::vector<double>{5, 10, 20});
  CHECK_THROWS_AS(config_from_text("solver.bogus = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_text("solver.h = abc\n"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_text("case = moon\n"), std::invalid_argument);
}

TEST_CASE("presets and overrides") {
  RunConfig c;
  CHECK(c.effective_rain() == 0.0);
  c.apply_override("case=flat_source");
  CHECK(c.effective_rain() == 0.05);
  c.apply_override("field.r = 0.1");
  CHECK(c.effective_rain() == 0.1);
  c.apply_override("case=z3");
  CHECK(c.solver.seed_offset == 0.5);
  CHECK_THROWS(c.apply_override("no-equals-sign"));

  RunConfig s;
  s.sweep.h = {1.0};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.sweep.allow_out_of_range = true;
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("config round trip through text") {
  RunConfig c;
  c.kind = CaseKind::z2;
  c.solver.eps = 1.0 / 3000.0;
  c.theta_deg = 41.3;
  c.landscape.K = 5e-4 / 3600 / 50;
  c.sweep.ds_ratio = {0.1, 1.0 / 3.0};
  c.seed = 123456789012345ULL;
  std::string text;
  for (const auto& [k, v] : c.to_map()) text += k + " = " + v + "\n";
  const RunConfig back = config_from_text(text);
  CHECK(back.to_map() == c.to_map());
  CHECK(back.solver.eps == c.solver.eps);
  CHECK(back.landscape.K == c.landscape.K);
}

TEST_CASE("meta reproduces a solve bit for bit") {
  const auto dir = scratch("meta_a"), dir2 = scratch("meta_b");
  RunConfig c;
  c.kind = CaseKind::z1;
  c.probes = {100, 25};
  c.reference_nx = 200;
  c.reference_ny = 50;
  c.out_dir = dir.string();
  std::ostringstream log;
  CHECK(cmd_solve(c, log) == 0);
  CHECK(log.str().find("linf relative error") != std::string::npos);

  RunConfig again = load_config((dir / "meta").string());
  again.out_dir = dir2.string();
  CHECK(cmd_solve(again, log) == 0);
  CHECK(slurp(dir / "u.csv") == slurp(dir2 / "u.csv"));
  CHECK(slurp(dir / "particles.csv").rfind("k,j,x,y,omega,rho\n", 0) == 0);
  const std::string meta = slurp(dir / "meta");
  CHECK(meta.find("meta.version = ") != std::string::npos);
  CHECK(meta.find("run.seed = 1") != std::string::npos);
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("exit status and error records") {
  const auto dir = scratch("status");
  RunConfig c;
  c.probes = {100, 25};
  c.out_dir = dir.string();
  c.threshold = 1e-12;
  std::ostringstream log;
  CHECK(cmd_solve(c, log) == 1);

  RunConfig bad;
  bad.kind = CaseKind::custom_grid;
  bad.surface_path = (dir / "missing.csv").string();
  bad.out_dir = dir.string();
  CHECK(cmd_solve(bad, log) == 2);
  CHECK(slurp(dir / "error.json").find("\"stage\": \"fields\"") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("custom grid surface") {
  const auto dir = scratch("custom");
  fs::create_directories(dir);
  const auto z = ScalarGrid::sample(40, 10, 1.0, 0.25, [](double, double y) { return 5e-4 * std::cos(8 * std::acos(-1.0) * y); });
  write_grid_csv(z, (dir / "z.csv").string());
  RunConfig c;
  c.kind = CaseKind::custom_grid;
  c.surface_path = (dir / "z.csv").string();
  c.surface_nx = 40;
  c.surface_ny = 10;
  c.probes = {100, 25};
  c.reference_nx = 200;
  c.reference_ny = 50;
  c.out_dir = (dir / "run").string();
  std::ostringstream log;
  CHECK(cmd_solve(c, log) == 0);
  CHECK(fs::exists(dir / "run" / "u.csv"));
  fs::remove_all(dir);
}

TEST_CASE("sweep protocols") {
  RunConfig c;
  c.sweep.protocol = 'a';
  CHECK(sweep_points(c).size() == 5);
  CHECK(sweep_points(c)[0].eps == doctest::Approx(sweep_points(c)[0].h / 10));
  c.sweep.protocol = 'c';
  const auto pc = sweep_points(c);
  CHECK(pc.size() == 4);
  for (const auto& p : pc) CHECK(p.ds == doctest::Approx(4 * p.eps));
  c.sweep.protocol = 'd';
  c.sweep.ds_ratio = {2.0, 1.0};
  const auto pd = sweep_points(c);
  CHECK(pd.size() == 2);
  CHECK(pd[1].ds == doctest::Approx(c.solver.h / 10));

  const auto dir = scratch("sweep");
  c.probes = {100, 25};
  c.out_dir = dir.string();
  std::ostringstream log;
  CHECK(cmd_sweep(c, log) == 0);
  const std::string csv = slurp(dir / "sweep.csv");
  CHECK(csv.rfind("h,eps,ds,error,runtime,case\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  fs::remove_all(dir);

  RunConfig z3;
  z3.kind = CaseKind::z3;
  CHECK_THROWS(run_sweep(z3));
}

TEST_CASE("slope fit and knee report") {
  const std::vector<double> x{1, 2, 4, 8}, y{3, 12, 48, 192};
  CHECK(loglog_slope(x, y) == doctest::Approx(2.0));
  std::vector<ErrorRecord> recs{{0.025, 0.0025, 0.02, 1e-2, 0, ""},
                                {0.025, 0.0025, 0.005, 1.5e-6, 0, ""},
                                {0.025, 0.0025, 0.0025, 1e-6, 0, ""}};
  KneeReport k = knee_report(recs);
  CHECK(k.ok);
  CHECK(k.worst_ratio == doctest::Approx(1.5));
  recs[1].error = 3e-6;
  CHECK_FALSE(knee_report(recs).ok);
}

TEST_CASE("landscape command") {
  const auto dir = scratch("landscape");
  RunConfig c;
  c.kind = CaseKind::landscape;
  c.landscape.nx = 100;
  c.landscape.ny = 25;
  c.landscape_steps = 3;
  c.snapshot_every = 3;
  c.perturbation = {7e-5, 2, 0.005, 0};
  c.out_dir = dir.string();
  std::ostringstream log;
  CHECK(cmd_landscape(c, log) == 0);
  CHECK(fs::exists(dir / "amplitude.csv"));
  CHECK(fs::exists(dir / "step_3" / "particles.csv"));
  CHECK(slurp(dir / "meta").find("meta.amplitude_final") != std::string::npos);
  fs::remove_all(dir);
}
