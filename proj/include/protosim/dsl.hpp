/*
 * dsl.hpp — the line-oriented protocol script language and its runner.
 *
 * One step per line, '#' comments, ids defined before use:
 *
 *   params rb85 [delta=2e9 ...]
 *   cavity C1 superpos            # (|0>+|1>)/sqrt(2); or: cavity C1 fock 0
 *   atom a1 g P0                  # creates a1.int and a1.mom
 *   bragg a1 C1 auto              # auto = 2 pi delta / mu^2
 *   bragg a2 A B auto             # ground arm through A, excited arm through B
 *   pulse a1 P-2 pi pi/2 plus     # theta phi drive-sign
 *   ramsey a1
 *   hadamard-momentum a1
 *   aux s C1 auto g               # JC readout + Ramsey + detect outcome, aux dropped
 *   splitter C2 C1 D1 D2
 *   postselect onephoton C1 C2
 *   detect D1 D2 keep D1          # without keep: record the outcome table only
 *   measure a2.int=g a2.mom=P0    # project an outcome
 *   measure a2.int a2.mom a3.int a3.mom enumerate
 *   drop C1
 *   expect fidelity @state.json 0.9999999999
 *   expect fidelity {"registry": [...], "amplitudes": [...]} 0.9999999999
 *   expect entropy a1.int,a1.mom 1.0 1e-9
 *
 * Runs are deterministic: measurements either post-select a named outcome
 * or enumerate all of them, and reports are byte-identical across repeated
 * runs (wall time is reported on the console, never inside the JSON).
 */

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "protosim/dynamics.hpp"
#include "protosim/params.hpp"
#include "protosim/statekit.hpp"

namespace protosim::dsl {

struct ParseError : std::runtime_error {
  ParseError(int line_number, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_number) + ": " + msg),
        line(line_number) {}
  int line;
};

// --- steps -----------------------------------------------------------------

struct ParamsStep {
  std::string preset;  // name or file path
  std::vector<std::pair<std::string, std::string>> overrides;
};
struct CavityStep {
  std::string id;
  bool superposed = true;  // else a Fock state
  int fock = 0;
};
struct AtomStep {
  std::string name;
  std::string internal = "g";
  std::string momentum = "P0";
};
struct BraggStep {
  std::string atom;
  std::string cavity_ground;                 // single-cavity steps use only this
  std::optional<std::string> cavity_excited; // set for branch-routed crossings
  std::optional<double> duration;            // nullopt = auto (2 pi delta / mu^2)
};
struct PulseStep {
  std::string atom;
  std::string arm;
  double theta = M_PI;
  double phi = 0.0;
  DriveSign sign = DriveSign::Minus;
};
struct RamseyStep {
  std::string atom;
};
struct HadamardMomentumStep {
  std::string atom;
};
struct AuxStep {
  std::string atom;
  std::string cavity;
  std::optional<double> duration;  // nullopt = auto (pi / 2 mu)
  std::string outcome = "g";
};
struct SplitterStep {
  std::string in0, in1, out2, out3;
};
struct PostselectOnePhotonStep {
  std::vector<std::string> modes;
};
struct DetectStep {
  std::vector<std::string> modes;
  std::optional<std::string> keep;  // post-select the single photon at this mode
};
struct MeasureStep {
  bool enumerate = false;
  Assignment outcome;                   // project path
  std::vector<std::string> subsystems;  // enumerate path
};
struct DropStep {
  std::string id;
};
struct ExpectFidelityStep {
  std::string literal_source;  // "@path" or inline JSON text (canonical dump)
  double threshold = 1.0 - 1e-10;
};
struct ExpectEntropyStep {
  std::vector<std::string> side;
  double value = 1.0;
  double tolerance = 1e-9;
};

using Step = std::variant<ParamsStep, CavityStep, AtomStep, BraggStep, PulseStep, RamseyStep,
                          HadamardMomentumStep, AuxStep, SplitterStep, PostselectOnePhotonStep,
                          DetectStep, MeasureStep, DropStep, ExpectFidelityStep,
                          ExpectEntropyStep>;

struct ProtocolScript {
  std::vector<Step> steps;
  std::vector<int> lines;    // source line of each step
  std::string source_hash;   // fnv1a-64 of the source text
};

// Parses UTF-8 script text; throws ParseError with a line number.
ProtocolScript parse_script(const std::string& text);

// Canonical text form; parse(serialize(s)) reproduces s, so
// parse . serialize . parse is a fixed point.
std::string serialize_script(const ProtocolScript& script);

// --- running -----------------------------------------------------------------

struct RunFlags {
  bool trace = false;                         // include per-step state snapshots
  std::optional<std::string> initial_params;  // preset providing params before
                                              // the first params step
  std::string script_dir;                     // base for @file literals
  // Samples one outcome (and collapses) at 'measure ... enumerate' and
  // keep-less 'detect' steps instead of enumerating them.  Deterministic
  // for a given seed; without it the tool never draws randomness.
  std::optional<std::uint64_t> seed;
};

struct RunReport {
  nlohmann::ordered_json json;  // byte-stable document
  bool expects_passed = true;
  double wall_seconds = 0.0;            // console-only; never serialized
  std::optional<ParamPreset> params;    // parameters in force after the run
};

// Executes the script; expect failures are recorded, runtime errors throw
// SimError/invalid_argument with the originating step attached.
RunReport run(const ProtocolScript& script, const RunFlags& flags = {});

struct SweepResult {
  std::string csv;  // delta_over_omega_r, beta_t, infidelity, norm_drift, leakage
  bool expects_passed = true;
};

// One run per grid value (the template's ${var} occurrences substituted),
// evaluated in a parallel worker pool, plus the closed-form-vs-oracle
// validation at each run's parameters.
SweepResult sweep(const std::string& script_template, const std::string& var,
                  const std::vector<std::string>& grid, const RunFlags& flags = {},
                  int l_max = 6, double tol = 1e-6);

// CSV rows of validate_adiabaticity at the standard ratios {1e2, 1e3, 1e4}
// plus the preset's own delta/omega_r.
std::string validate_csv(const ParamPreset& preset, int l_max = 6, double tol = 1e-6);

std::string fnv1a_hex(const std::string& text);

}  // namespace protosim::dsl
