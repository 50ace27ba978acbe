#include "partrans/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace partrans {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(d))
    throw std::invalid_argument(key + ": expected a real number, got '" + v + "'");
  return d;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  if (v.empty() || v[0] == '-') throw std::invalid_argument(key + ": expected a non-negative integer, got '" + v + "'");
  const unsigned long long n = std::strtoull(v.c_str(), &end, 10);
  if (*end != '\0' || errno == ERANGE)
    throw std::invalid_argument(key + ": expected a non-negative integer, got '" + v + "'");
  return n;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument(key + ": expected true or false, got '" + v + "'");
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + format_real(xs[i]);
  return s;
}

const char* reference_name(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::automatic: return "auto";
    case ReferenceKind::exact: return "exact";
    case ReferenceKind::fv: return "fv";
    case ReferenceKind::none: return "none";
  }
  return "auto";
}

constexpr double deg = std::numbers::pi / 180.0;

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_real("list", item));
  }
  return out;
}

std::string to_string(CaseKind kind) {
  switch (kind) {
    case CaseKind::flat: return "flat";
    case CaseKind::flat_source: return "flat_source";
    case CaseKind::z1: return "z1";
    case CaseKind::z2: return "z2";
    case CaseKind::z3: return "z3";
    case CaseKind::landscape: return "landscape";
    case CaseKind::custom_grid: return "custom-grid";
  }
  return "flat";
}

CaseKind parse_case(const std::string& name) {
  for (CaseKind k : {CaseKind::flat, CaseKind::flat_source, CaseKind::z1, CaseKind::z2, CaseKind::z3,
                     CaseKind::landscape, CaseKind::custom_grid})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown case '" + name + "'");
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const std::string& v = value;
  auto real = [&] { return parse_real(key, v); };
  auto count = [&] { return static_cast<std::size_t>(parse_unsigned(key, v)); };

  if (key == "case") {
    kind = parse_case(v);
    // the dry-area preset keeps seeds off the ridge crests
    if (kind == CaseKind::z3) solver.seed_offset = 0.5;
  } else if (key == "domain.Lx") domain.Lx = real();
  else if (key == "domain.Ly") domain.Ly = real();
  else if (key == "solver.h") solver.h = real();
  else if (key == "solver.eps") solver.eps = real();
  else if (key == "solver.ds") solver.ds = real();
  else if (key == "solver.max_steps") solver.max_steps = count();
  else if (key == "solver.seed_offset") solver.seed_offset = real();
  else if (key == "field.theta_deg") theta_deg = real();
  else if (key == "field.u0") u0 = real();
  else if (key == "field.r") { rain = real(); rain_set = true; }
  else if (key == "probe.nx") probes.nx = count();
  else if (key == "probe.ny") probes.ny = count();
  else if (key == "reference.kind") {
    if (v == "auto") reference = ReferenceKind::automatic;
    else if (v == "exact") reference = ReferenceKind::exact;
    else if (v == "fv") reference = ReferenceKind::fv;
    else if (v == "none") reference = ReferenceKind::none;
    else throw std::invalid_argument("reference.kind: expected auto, exact, fv or none");
  } else if (key == "reference.nx") reference_nx = count();
  else if (key == "reference.ny") reference_ny = count();
  else if (key == "reference.threshold") threshold = real();
  else if (key == "surface.path") surface_path = v;
  else if (key == "surface.nx") surface_nx = count();
  else if (key == "surface.ny") surface_ny = count();
  else if (key == "landscape.Lx") landscape.Lx = real();
  else if (key == "landscape.Ly") landscape.Ly = real();
  else if (key == "landscape.V") landscape.V = real();
  else if (key == "landscape.m") landscape.m = real();
  else if (key == "landscape.n") landscape.n = real();
  else if (key == "landscape.rho_s") landscape.rho_s = real();
  else if (key == "landscape.c_sat") landscape.c_sat = real();
  else if (key == "landscape.e") landscape.e = real();
  else if (key == "landscape.s") landscape.s = real();
  else if (key == "landscape.theta_deg") landscape.theta = real() * deg;
  else if (key == "landscape.h0") landscape.h0 = real();
  else if (key == "landscape.c0") landscape.c0 = real();
  else if (key == "landscape.K") landscape.K = real();
  else if (key == "landscape.H") landscape.H = real();
  else if (key == "landscape.r") landscape.r = real();
  else if (key == "landscape.dt") landscape.dt = real();
  else if (key == "landscape.nx") landscape.nx = count();
  else if (key == "landscape.ny") landscape.ny = count();
  else if (key == "landscape.kernel_h") landscape.kernel_h = real();
  else if (key == "landscape.eps") landscape.eps = real();
  else if (key == "landscape.ds") landscape.ds = real();
  else if (key == "landscape.seed_offset") landscape.seed_offset = real();
  else if (key == "landscape.dry_fraction") landscape.dry_fraction = real();
  else if (key == "landscape.steps") landscape_steps = count();
  else if (key == "landscape.snapshot_every") snapshot_every = count();
  else if (key == "perturbation.amplitude") perturbation.amplitude = real();
  else if (key == "perturbation.n_channels") perturbation.n_channels = count();
  else if (key == "perturbation.width") perturbation.width = real();
  else if (key == "sweep.protocol") {
    if (v.size() != 1 || v[0] < 'a' || v[0] > 'd') throw std::invalid_argument("sweep.protocol: expected a, b, c or d");
    sweep.protocol = v[0];
  } else if (key == "sweep.h") sweep.h = parse_real_list(v);
  else if (key == "sweep.eps_ratio") sweep.eps_ratio = parse_real_list(v);
  else if (key == "sweep.ds_ratio") sweep.ds_ratio = parse_real_list(v);
  else if (key == "sweep.allow_out_of_range") sweep.allow_out_of_range = parse_bool(key, v);
  else if (key == "run.out") out_dir = v;
  else if (key == "run.seed") seed = parse_unsigned(key, v);
  else if (key == "run.threads") threads = static_cast<int>(parse_unsigned(key, v));
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

void RunConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("override '" + assignment + "' is not KEY=VALUE");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

double RunConfig::effective_rain() const {
  if (rain_set) return rain;
  return kind == CaseKind::flat_source ? 1.0 / 20.0 : 0.0;
}

double RunConfig::theta() const { return theta_deg * deg; }

std::map<std::string, std::string> RunConfig::to_map() const {
  std::map<std::string, std::string> m;
  m["case"] = to_string(kind);
  m["domain.Lx"] = format_real(domain.Lx);
  m["domain.Ly"] = format_real(domain.Ly);
  m["solver.h"] = format_real(solver.h);
  m["solver.eps"] = format_real(solver.eps);
  m["solver.ds"] = format_real(solver.ds);
  m["solver.max_steps"] = std::to_string(solver.max_steps);
  m["solver.seed_offset"] = format_real(solver.seed_offset);
  m["field.theta_deg"] = format_real(theta_deg);
  m["field.u0"] = format_real(u0);
  m["field.r"] = format_real(effective_rain());
  m["probe.nx"] = std::to_string(probes.nx);
  m["probe.ny"] = std::to_string(probes.ny);
  m["reference.kind"] = reference_name(reference);
  m["reference.nx"] = std::to_string(reference_nx);
  m["reference.ny"] = std::to_string(reference_ny);
  m["reference.threshold"] = format_real(threshold);
  if (!surface_path.empty()) m["surface.path"] = surface_path;
  m["surface.nx"] = std::to_string(surface_nx);
  m["surface.ny"] = std::to_string(surface_ny);
  const LandscapeParams& L = landscape;
  m["landscape.Lx"] = format_real(L.Lx);
  m["landscape.Ly"] = format_real(L.Ly);
  m["landscape.V"] = format_real(L.V);
  m["landscape.m"] = format_real(L.m);
  m["landscape.n"] = format_real(L.n);
  m["landscape.rho_s"] = format_real(L.rho_s);
  m["landscape.c_sat"] = format_real(L.c_sat);
  m["landscape.e"] = format_real(L.e);
  m["landscape.s"] = format_real(L.s);
  m["landscape.theta_deg"] = format_real(L.theta / deg);
  m["landscape.h0"] = format_real(L.h0);
  m["landscape.c0"] = format_real(L.c0);
  m["landscape.K"] = format_real(L.K);
  m["landscape.H"] = format_real(L.H);
  m["landscape.r"] = format_real(L.r);
  m["landscape.dt"] = format_real(L.dt);
  m["landscape.nx"] = std::to_string(L.nx);
  m["landscape.ny"] = std::to_string(L.ny);
  m["landscape.kernel_h"] = format_real(L.kernel_h);
  m["landscape.eps"] = format_real(L.eps);
  m["landscape.ds"] = format_real(L.ds);
  m["landscape.seed_offset"] = format_real(L.seed_offset);
  m["landscape.dry_fraction"] = format_real(L.dry_fraction);
  m["landscape.steps"] = std::to_string(landscape_steps);
  m["landscape.snapshot_every"] = std::to_string(snapshot_every);
  m["perturbation.amplitude"] = format_real(perturbation.amplitude);
  m["perturbation.n_channels"] = std::to_string(perturbation.n_channels);
  m["perturbation.width"] = format_real(perturbation.width);
  m["sweep.protocol"] = std::string(1, sweep.protocol);
  m["sweep.h"] = join(sweep.h);
  m["sweep.eps_ratio"] = join(sweep.eps_ratio);
  m["sweep.ds_ratio"] = join(sweep.ds_ratio);
  m["sweep.allow_out_of_range"] = sweep.allow_out_of_range ? "true" : "false";
  m["run.out"] = out_dir;
  m["run.seed"] = std::to_string(seed);
  m["run.threads"] = std::to_string(threads);
  return m;
}

void RunConfig::validate() const {
  domain.validate();
  solver.validate();
  if (probes.nx < 2 || probes.ny < 2) throw std::invalid_argument("probe grid needs at least 2x2 nodes");
  if (!(u0 >= 0.0)) throw std::invalid_argument("field.u0 must be non-negative");
  if (!(std::tan(theta()) > 0.0)) throw std::invalid_argument("field.theta_deg must give tan(theta) > 0");
  if (kind == CaseKind::custom_grid && surface_path.empty())
    throw std::invalid_argument("custom-grid case needs surface.path");
  if (kind == CaseKind::landscape) landscape.validate();
  if (!sweep.allow_out_of_range) {
    constexpr double h_char = 1.0 / 40.0;
    for (double h : sweep.h)
      if (h < h_char / 16.0 * (1 - 1e-12) || h > h_char * 16.0 * (1 + 1e-12))
        throw std::invalid_argument("sweep.h value " + format_real(h) +
                                    " outside [2^-4, 2^4] h_char; set sweep.allow_out_of_range = true");
  }
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig config_from_text(const std::string& text) {
  const auto kv = parse_key_values(text);
  RunConfig cfg;
  // case first: it may preset other keys that the file then overrides
  if (auto it = kv.find("case"); it != kv.end()) cfg.set("case", it->second);
  for (const auto& [k, v] : kv) {
    if (k == "case" || k.rfind("meta.", 0) == 0) continue;
    try {
      cfg.set(k, v);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string("config: ") + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return config_from_text(ss.str());
}

void write_meta(const RunConfig& config, const std::map<std::string, std::string>& extra, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  for (const auto& [k, v] : config.to_map()) f << k << " = " << v << '\n';
  for (const auto& [k, v] : extra) f << "meta." << k << " = " << v << '\n';
}

}  // namespace partrans
