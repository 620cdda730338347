/*
 * params.hpp — physical parameter presets and Bragg-regime diagnostics.
 *
 * The built-in presets carry the published figures for Rb-85 (780 nm) and
 * He-4 (543.5 nm) experiments.  Frequency figures are converted to rad/s
 * in ONE place (the preset constructors below), under the reading that
 * the quoted GHz/kHz values are angular rates: that reading reproduces
 * the quoted 13 us He interaction time from t = 2 pi delta / mu^2 =
 * pi/(2 beta) with beta = 120 kHz.  Figures whose unit reading stays
 * ambiguous are kept as provenance text and exempted from consistency
 * checks rather than guessed.
 */

#pragma once

#include <map>
#include <optional>
#include <string>

#include "protosim/dynamics.hpp"

namespace protosim {

struct ParamPreset {
  std::string name;
  PhysicalParams params;
  // printed figures with their units, verbatim
  std::map<std::string, std::string> provenance;
  std::optional<double> cavity_lifetime;   // seconds, when stated
  std::optional<double> omega_r_printed;   // rad/s reading of the printed recoil
  bool omega_r_check_exempt = false;       // unit reading ambiguous
};

// name in {rb85, he4}; validates the printed-vs-derived recoil frequency
// (within 1% of the derived value) unless the preset is exempt.
ParamPreset preset(const std::string& name);

enum class RegimeStatus { Ok, Warn, Fail };
std::string to_string(RegimeStatus status);

struct BraggDiagnostics {
  double ratio = 0.0;             // delta / omega_r
  double interaction_time = 0.0;  // 2 pi delta / mu^2 (s)
  std::optional<double> cavity_lifetime;
  RegimeStatus status = RegimeStatus::Fail;  // ok >= 100 > warn >= 2 > fail
};

BraggDiagnostics validate_bragg_regime(const PhysicalParams& params,
                                       std::optional<double> cavity_lifetime = std::nullopt);

// --- preset files ---------------------------------------------------------------

// Plain "key = value" text; keys are the PhysicalParams field names plus
// name, cavity_lifetime, omega_r_printed, omega_r_check_exempt and
// provenance.<tag>.  Doubles are written with 17 significant digits so a
// save/load round trip is bit-exact.
ParamPreset load_preset_file(const std::string& path);
void save_preset_file(const ParamPreset& preset, const std::string& path);

// numeric field override ("mu=1.1e8", "delta=2e9", ...)
void apply_override(ParamPreset& preset, const std::string& key, const std::string& value);

// Built-in name, or a file: names are searched in $PROTOSIM_PRESET_DIR
// first (as <name>.preset), then the built-ins; anything containing a
// path separator or ending in .preset is loaded directly.
ParamPreset resolve_preset(const std::string& name_or_path);

}  // namespace protosim
