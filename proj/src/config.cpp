#include "stirlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace stirlab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    throw PreconditionError("configuration: key '" + key + "' has non-numeric value '" +
                            value + "'");
  }
  if (used != value.size())
    throw PreconditionError("configuration: trailing characters after number in '" +
                            key + " = " + value + "'");
  return out;
}

long long parse_integer(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(value, &used);
  } catch (const std::exception&) {
    throw PreconditionError("configuration: key '" + key + "' has non-integer value '" +
                            value + "'");
  }
  if (used != value.size())
    throw PreconditionError("configuration: trailing characters after integer in '" +
                            key + " = " + value + "'");
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario s;

  const std::map<std::string, std::function<void(const std::string&, const std::string&)>>
      setters = {
          {"surface", [&](const std::string&, const std::string& v) { s.surface = v; }},
          {"surface_a",
           [&](const std::string& k, const std::string& v) { s.surface_a = parse_double(k, v); }},
          {"surface_b",
           [&](const std::string& k, const std::string& v) { s.surface_b = parse_double(k, v); }},
          {"band_lo",
           [&](const std::string& k, const std::string& v) { s.band_lo = parse_double(k, v); }},
          {"band_hi",
           [&](const std::string& k, const std::string& v) { s.band_hi = parse_double(k, v); }},
          {"plateau_fraction",
           [&](const std::string& k, const std::string& v) {
             s.plateau_fraction = parse_double(k, v);
           }},
          {"base_speed",
           [&](const std::string& k, const std::string& v) { s.base_speed = parse_double(k, v); }},
          {"turns",
           [&](const std::string& k, const std::string& v) {
             s.turns = static_cast<int>(parse_integer(k, v));
           }},
          {"delta",
           [&](const std::string& k, const std::string& v) { s.delta = parse_double(k, v); }},
          {"extension", [&](const std::string&, const std::string& v) { s.extension = v; }},
          {"time",
           [&](const std::string& k, const std::string& v) { s.time = parse_double(k, v); }},
          {"steps",
           [&](const std::string& k, const std::string& v) {
             s.steps = static_cast<int>(parse_integer(k, v));
           }},
          {"schedule_count",
           [&](const std::string& k, const std::string& v) {
             s.schedule_count = static_cast<int>(parse_integer(k, v));
           }},
          {"rho0",
           [&](const std::string& k, const std::string& v) { s.rho0 = parse_double(k, v); }},
          {"decay",
           [&](const std::string& k, const std::string& v) { s.decay = parse_double(k, v); }},
          {"target_scale",
           [&](const std::string& k, const std::string& v) {
             s.target_scale = parse_double(k, v);
           }},
          {"scaling", [&](const std::string&, const std::string& v) { s.scaling = v; }},
          {"mesh_u",
           [&](const std::string& k, const std::string& v) {
             s.mesh_u = static_cast<int>(parse_integer(k, v));
           }},
          {"mesh_v",
           [&](const std::string& k, const std::string& v) {
             s.mesh_v = static_cast<int>(parse_integer(k, v));
           }},
          {"samples",
           [&](const std::string& k, const std::string& v) {
             s.samples = static_cast<int>(parse_integer(k, v));
           }},
          {"seed",
           [&](const std::string& k, const std::string& v) {
             s.seed = static_cast<std::uint64_t>(parse_integer(k, v));
           }},
          {"tol_divergence",
           [&](const std::string& k, const std::string& v) {
             s.tol_divergence = parse_double(k, v);
           }},
          {"tol_duality",
           [&](const std::string& k, const std::string& v) {
             s.tol_duality = parse_double(k, v);
           }},
          {"output_dir", [&](const std::string&, const std::string& v) { s.output_dir = v; }},
      };

  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw PreconditionError("configuration line " + std::to_string(line_no) +
                              ": expected 'key = value', got '" + stripped + "'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end())
      throw PreconditionError("configuration line " + std::to_string(line_no) +
                              ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw PreconditionError("configuration line " + std::to_string(line_no) +
                              ": duplicate key '" + key + "'");
    it->second(key, value);
  }
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "surface = " << s.surface << "\n";
  out << "surface_a = " << format_double(s.surface_a) << "\n";
  out << "surface_b = " << format_double(s.surface_b) << "\n";
  out << "band_lo = " << format_double(s.band_lo) << "\n";
  out << "band_hi = " << format_double(s.band_hi) << "\n";
  out << "plateau_fraction = " << format_double(s.plateau_fraction) << "\n";
  out << "base_speed = " << format_double(s.base_speed) << "\n";
  out << "turns = " << s.turns << "\n";
  out << "delta = " << format_double(s.delta) << "\n";
  out << "extension = " << s.extension << "\n";
  out << "time = " << format_double(s.time) << "\n";
  out << "steps = " << s.steps << "\n";
  out << "schedule_count = " << s.schedule_count << "\n";
  out << "rho0 = " << format_double(s.rho0) << "\n";
  out << "decay = " << format_double(s.decay) << "\n";
  out << "target_scale = " << format_double(s.target_scale) << "\n";
  out << "scaling = " << s.scaling << "\n";
  out << "mesh_u = " << s.mesh_u << "\n";
  out << "mesh_v = " << s.mesh_v << "\n";
  out << "samples = " << s.samples << "\n";
  out << "seed = " << s.seed << "\n";
  out << "tol_divergence = " << format_double(s.tol_divergence) << "\n";
  out << "tol_duality = " << format_double(s.tol_duality) << "\n";
  out << "output_dir = " << s.output_dir << "\n";
  return out.str();
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("configuration file not readable: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

ExtensionMode parse_extension_mode(const std::string& name) {
  if (name == "product") return ExtensionMode::product;
  if (name == "jacobian_corrected") return ExtensionMode::jacobian_corrected;
  throw PreconditionError("unknown extension mode '" + name +
                          "' (expected product or jacobian_corrected)");
}

ScalingMode parse_scaling_mode(const std::string& name) {
  return scaling_mode_from_string(name);
}

void validate(const Scenario& s) {
  if (s.surface.rfind("implicit", 0) == 0)
    throw PreconditionError(
        "surface '" + s.surface +
        "': implicit surfaces are not supported; use one of the parametric kinds "
        "torus_revolution, flat_annulus, flat_strip");
  if (s.surface != "torus_revolution" && s.surface != "flat_annulus" &&
      s.surface != "flat_strip")
    throw PreconditionError("unknown surface kind '" + s.surface +
                            "' (expected torus_revolution, flat_annulus or flat_strip)");
  if (!(s.surface_a > 0.0) || !(s.surface_b > 0.0))
    throw PreconditionError("surface dimensions must be positive");
  if (s.surface == "torus_revolution" && !(s.surface_a > s.surface_b))
    throw PreconditionError("torus_revolution needs major radius > minor radius");
  if (s.surface == "flat_annulus" && !(s.surface_a < s.surface_b))
    throw PreconditionError("flat_annulus needs inner radius < outer radius");
  if (!(s.band_lo < s.band_hi))
    throw PreconditionError("band_lo must be below band_hi");
  if (!(s.plateau_fraction > 0.0) || s.plateau_fraction > 1.0)
    throw PreconditionError("plateau_fraction must lie in (0, 1]");
  if (s.turns < 0) throw PreconditionError("turns must be nonnegative");
  if (!(s.delta > 0.0)) throw PreconditionError("delta must be positive");
  parse_extension_mode(s.extension);
  parse_scaling_mode(s.scaling);
  if (!(s.time > 0.0)) throw PreconditionError("time must be positive");
  if (s.steps < 0) throw PreconditionError("steps must be nonnegative");
  if (s.schedule_count < 1) throw PreconditionError("schedule_count must be >= 1");
  if (s.mesh_u < 8 || s.mesh_v < 8)
    throw PreconditionError("mesh resolution must be at least 8 per direction");
  if (s.samples < 1) throw PreconditionError("samples must be >= 1");
  if (!(s.tol_divergence > 0.0) || !(s.tol_duality > 0.0))
    throw PreconditionError("tolerances must be positive");
}

EmbeddedSurface build_surface(const Scenario& s) {
  if (s.surface == "torus_revolution")
    return EmbeddedSurface::torus(s.surface_a, s.surface_b);
  if (s.surface == "flat_annulus")
    return EmbeddedSurface::flat_annulus(s.surface_a, s.surface_b);
  if (s.surface == "flat_strip")
    return EmbeddedSurface::flat_strip(s.surface_a, s.surface_b);
  throw PreconditionError("unknown surface kind '" + s.surface + "'");
}

BandProfile build_band(const Scenario& s) {
  return BandProfile{s.band_lo, s.band_hi, s.plateau_fraction};
}

TangentField build_field(const Scenario& s, const EmbeddedSurface& surface) {
  return stirring_field(surface, build_band(s), s.turns, s.base_speed);
}

int effective_steps(const Scenario& s) {
  if (s.steps > 0) return s.steps;
  return 512 * std::max(1, s.turns);
}

}  // namespace stirlab
