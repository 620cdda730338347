#include "protosim/params.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace protosim {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void check_recoil_consistency(const ParamPreset& p) {
  if (p.omega_r_check_exempt || !p.omega_r_printed) return;
  const double derived = p.params.omega_r();
  const double rel = std::abs(*p.omega_r_printed - derived) / derived;
  if (rel > 0.01)
    fail("preset '" + p.name + "': printed recoil frequency differs from hbar k^2/2M by " +
         std::to_string(rel * 100.0) + "%");
}

ParamPreset rb85_preset() {
  ParamPreset p;
  p.name = "rb85";
  p.params.mass = 85.0 * kAmuKg;
  p.params.k = 2.0 * M_PI / 780e-9;
  p.params.omega = 2.0 * M_PI * 16.4e6;  // quoted Rabi frequency
  p.params.mu = 2.0 * M_PI * 16.4e6;     // only coupling scale quoted
  p.params.delta = 1.0e9;                // "1 GHz" detuning, angular reading
  p.omega_r_printed = 2.4e4;             // rad/s, quoted explicitly
  p.provenance = {
      {"wavelength", "780 nm"},
      {"mass", "85 amu"},
      {"recoil_frequency", "2.4 x 10^4 rad/s"},
      {"rabi_frequency", "2 pi x 16.4 MHz"},
      {"detuning", "1 GHz"},
      {"finesse", "4.4 x 10^5"},
      {"timing_note", "around 0.5 us; quoted between interaction time and cavity lifetime"},
      {"coupling_note", "atom-field coupling not quoted separately; mu set to the Rabi figure"},
  };
  return p;
}

ParamPreset he4_preset() {
  ParamPreset p;
  p.name = "he4";
  p.params.mass = 4.0 * kAmuKg;
  p.params.k = 2.0 * M_PI / 543.5e-9;
  p.params.delta = 6.28e9;                              // "6.28 GHz"
  p.params.mu = std::sqrt(4.0 * p.params.delta * 1.2e5);  // from mu^2/(4 delta) = 120 kHz
  p.params.omega = p.params.mu;                          // classical Rabi not quoted
  p.omega_r_printed = 1.06e6;
  p.omega_r_check_exempt = true;  // "1.06 MHz": rad/s vs Hz reading not disambiguated
  p.cavity_lifetime = 1e-3;       // "lifetimes up to milliseconds"
  p.provenance = {
      {"wavelength", "543.5 nm"},
      {"mass", "4 amu"},
      {"recoil_frequency", "1.06 MHz (unit reading ambiguous; exempt from the 1% check)"},
      {"effective_rabi", "mu^2/(4 delta) = 120 kHz"},
      {"detuning", "6.28 GHz"},
      {"interaction_time", "13 us"},
      {"finesse", "7.85 x 10^6"},
      {"cavity_lifetime", "up to milliseconds"},
      {"coupling_note", "omega not quoted; set to mu"},
  };
  return p;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail("preset: bad numeric value '" + value + "' for key '" + key + "'");
  }
}

}  // namespace

std::string to_string(RegimeStatus status) {
  switch (status) {
    case RegimeStatus::Ok: return "ok";
    case RegimeStatus::Warn: return "warn";
    case RegimeStatus::Fail: return "fail";
  }
  return "?";
}

ParamPreset preset(const std::string& name) {
  ParamPreset p;
  if (name == "rb85")
    p = rb85_preset();
  else if (name == "he4")
    p = he4_preset();
  else
    fail("unknown preset '" + name + "' (have: rb85, he4)");
  p.params.validate();
  check_recoil_consistency(p);
  return p;
}

BraggDiagnostics validate_bragg_regime(const PhysicalParams& params,
                                       std::optional<double> cavity_lifetime) {
  params.validate();
  BraggDiagnostics d;
  d.ratio = params.delta / params.omega_r();
  d.interaction_time = params.bragg_time();
  d.cavity_lifetime = cavity_lifetime;
  if (d.ratio < 2.0)
    d.status = RegimeStatus::Fail;
  else if (d.ratio < 100.0)
    d.status = RegimeStatus::Warn;
  else
    d.status = RegimeStatus::Ok;
  return d;
}

ParamPreset load_preset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open preset file '" + path + "'");
  ParamPreset p;
  p.name = path;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      fail("preset file " + path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key == "name")
      p.name = value;
    else if (key == "mu")
      p.params.mu = parse_double(key, value);
    else if (key == "delta")
      p.params.delta = parse_double(key, value);
    else if (key == "omega")
      p.params.omega = parse_double(key, value);
    else if (key == "k")
      p.params.k = parse_double(key, value);
    else if (key == "mass")
      p.params.mass = parse_double(key, value);
    else if (key == "bragg_order")
      p.params.bragg_order = static_cast<int>(parse_double(key, value));
    else if (key == "cavity_lifetime")
      p.cavity_lifetime = parse_double(key, value);
    else if (key == "omega_r_printed")
      p.omega_r_printed = parse_double(key, value);
    else if (key == "omega_r_check_exempt")
      p.omega_r_check_exempt = parse_double(key, value) != 0.0;
    else if (key.rfind("provenance.", 0) == 0)
      p.provenance[key.substr(11)] = value;
    else
      fail("preset file " + path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  p.params.validate();
  check_recoil_consistency(p);
  return p;
}

void save_preset_file(const ParamPreset& preset, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write preset file '" + path + "'");
  out << "name = " << preset.name << "\n";
  out << "mu = " << fmt_double(preset.params.mu) << "\n";
  out << "delta = " << fmt_double(preset.params.delta) << "\n";
  out << "omega = " << fmt_double(preset.params.omega) << "\n";
  out << "k = " << fmt_double(preset.params.k) << "\n";
  out << "mass = " << fmt_double(preset.params.mass) << "\n";
  out << "bragg_order = " << preset.params.bragg_order << "\n";
  if (preset.cavity_lifetime)
    out << "cavity_lifetime = " << fmt_double(*preset.cavity_lifetime) << "\n";
  if (preset.omega_r_printed)
    out << "omega_r_printed = " << fmt_double(*preset.omega_r_printed) << "\n";
  if (preset.omega_r_check_exempt) out << "omega_r_check_exempt = 1\n";
  for (const auto& [key, value] : preset.provenance)
    out << "provenance." << key << " = " << value << "\n";
}

void apply_override(ParamPreset& preset, const std::string& key, const std::string& value) {
  if (key == "mu")
    preset.params.mu = parse_double(key, value);
  else if (key == "delta")
    preset.params.delta = parse_double(key, value);
  else if (key == "omega")
    preset.params.omega = parse_double(key, value);
  else if (key == "k")
    preset.params.k = parse_double(key, value);
  else if (key == "mass")
    preset.params.mass = parse_double(key, value);
  else if (key == "bragg_order")
    preset.params.bragg_order = static_cast<int>(parse_double(key, value));
  else if (key == "cavity_lifetime")
    preset.cavity_lifetime = parse_double(key, value);
  else
    fail("unknown parameter override '" + key + "'");
  preset.params.validate();
}

ParamPreset resolve_preset(const std::string& name_or_path) {
  const bool pathlike = name_or_path.find('/') != std::string::npos ||
                        (name_or_path.size() > 7 &&
                         name_or_path.rfind(".preset") == name_or_path.size() - 7);
  if (pathlike) return load_preset_file(name_or_path);

  if (const char* dir = std::getenv("PROTOSIM_PRESET_DIR")) {
    std::string candidate = std::string(dir) + "/" + name_or_path + ".preset";
    if (std::ifstream(candidate).good()) return load_preset_file(candidate);
  }
  return preset(name_or_path);
}

}  // namespace protosim
