#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "partrans/grid.hpp"
#include "partrans/landscape.hpp"
#include "partrans/particles.hpp"
#include "partrans/reconstruct.hpp"

namespace partrans {

enum class CaseKind { flat, flat_source, z1, z2, z3, landscape, custom_grid };

std::string to_string(CaseKind kind);
CaseKind parse_case(const std::string& name);

enum class ReferenceKind { automatic, exact, fv, none };

struct SweepAxes {
  char protocol = 'c';             // a, b, c or d
  std::vector<double> h;           // kernel radii (protocols a, b)
  std::vector<double> eps_ratio;   // h / eps
  std::vector<double> ds_ratio;    // ds / eps
  bool allow_out_of_range = false;  // h outside [2^-4, 2^4] h_char
};

/// Everything needed to reproduce one run. Keys are flat and sectioned, e.g. domain.Lx.
struct RunConfig {
  CaseKind kind = CaseKind::flat;
  DomainSpec domain{1.0, 0.25};
  SolverParams solver{};
  double theta_deg = 39.0;
  double u0 = 1e-3;
  double rain = 0.0;  // r; the flat_source case defaults it to 1/20
  bool rain_set = false;
  ProbeGrid probes{};

  ReferenceKind reference = ReferenceKind::automatic;
  std::size_t reference_nx = 800;
  std::size_t reference_ny = 200;
  double threshold = 0.0;  // acceptance threshold on the l-inf error; 0 disables

  std::string surface_path;  // custom-grid case
  std::size_t surface_nx = 400;
  std::size_t surface_ny = 100;

  LandscapeParams landscape{};
  Perturbation perturbation{};
  std::size_t landscape_steps = 200;
  std::size_t snapshot_every = 50;

  SweepAxes sweep{};

  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int threads = 0;  // 0 leaves the OpenMP default

  /// Sets one key; throws std::invalid_argument for unknown keys or malformed values.
  void set(const std::string& key, const std::string& value);
  /// Applies "KEY=VALUE".
  void apply_override(const std::string& assignment);

  /// Rain actually used by the case.
  double effective_rain() const;
  double theta() const;

  /// Every key with a round-trippable value (%.17g for reals).
  std::map<std::string, std::string> to_map() const;
  void validate() const;
};

/// Parses "section.key = value" lines; '#' starts a comment. Throws with the line number.
std::map<std::string, std::string> parse_key_values(const std::string& text);

RunConfig load_config(const std::string& path);
RunConfig config_from_text(const std::string& text);

/// meta: the config keys plus meta.* entries (versions, timings, counts). Keys under meta.
/// are skipped when the file is loaded back as a config.
void write_meta(const RunConfig& config, const std::map<std::string, std::string>& extra, const std::string& path);

std::string format_real(double v);
std::vector<double> parse_real_list(const std::string& text);

}  // namespace partrans
