#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "partrans/config.hpp"
#include "partrans/harness.hpp"
#include "partrans/log.hpp"
#include "partrans/validation.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  std::vector<std::string> overrides;
  bool verbose = false;
};

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--config", o.config, "run config (section.key = value)");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option_function<std::uint64_t>(
      "--seed", [&o](const std::uint64_t& s) { o.seed = s, o.seed_set = true; }, "64-bit seed");
  sub->add_option("--threads", o.threads, "OpenMP threads (0 = default)");
  sub->add_option("--override", o.overrides, "KEY=VALUE, repeatable")->take_all();
  sub->add_flag("-v,--verbose", o.verbose, "info logging");
}

partrans::RunConfig resolve(const CommonOptions& o) {
  partrans::RunConfig cfg = o.config.empty() ? partrans::RunConfig{} : partrans::load_config(o.config);
  for (const auto& kv : o.overrides) cfg.apply_override(kv);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.seed_set) cfg.seed = o.seed;
  if (o.threads > 0) cfg.threads = o.threads;
#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
  if (o.verbose) partrans::set_log_level(partrans::LogLevel::info);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle solver for stationary transport and landscape evolution"};
  app.require_subcommand(1);

  CommonOptions opts;
  auto* solve = app.add_subcommand("solve", "seed, trace and reconstruct one case");
  auto* sweep = app.add_subcommand("sweep", "convergence sweep (protocols a-d)");
  auto* land = app.add_subcommand("landscape", "coupled erosion run");
  auto* self = app.add_subcommand("selftest", "run the acceptance checks");
  for (auto* s : {solve, sweep, land, self}) add_common(s, opts);
  std::vector<std::string> only;
  self->add_option("names", only, "criteria to run (default: all)");

  CLI11_PARSE(app, argc, argv);

  int status = 0;
  try {
    partrans::RunConfig cfg = resolve(opts);
    if (*solve) status = partrans::cmd_solve(cfg, std::cout);
    else if (*sweep) status = partrans::cmd_sweep(cfg, std::cout);
    else if (*land) {
      if (opts.config.empty()) cfg.kind = partrans::CaseKind::landscape;
      status = partrans::cmd_landscape(cfg, std::cout);
    } else if (*self) {
      for (const auto& c : partrans::acceptance_criteria()) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
        const auto r = partrans::run_criterion(c);
        std::cout << partrans::format_result(r) << std::endl;
        if (!r.passed) status = 1;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"status", "error"}, {"stage", "config"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }
  return status;
}
