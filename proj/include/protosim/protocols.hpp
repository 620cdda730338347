/*
 * protocols.hpp — the end-to-end pipelines, composed from dynamics
 * primitives with a snapshot after every step.
 *
 *   generate_hyper_bell_pair : two ground-state atoms Bragg-diffracted
 *     through one superposed cavity, a pi pulse on each deflected arm, and
 *     a resonant auxiliary-atom readout of the cavity, leaving the atom
 *     pair hyperentangled in internal state and momentum.
 *
 *   swap_entanglement / enumerate_swap_outcomes : two such pairs; the
 *     inner atoms pass their undeflected (ground) arms through cavity A
 *     and their deflected (excited) arms through cavity B, auxiliary
 *     atoms read both cavities out, and a Ramsey zone plus state-selective
 *     detection of the inner atoms leaves the outer pair entangled.
 *
 *   delayed_choice_swap / npartite_swap : cavity-entangled momentum GHZ
 *     groups, a symmetric beam splitter erasing the which-cavity
 *     information, and single-photon detection; delayed_choice_hyper then
 *     lifts the surviving momentum entanglement into hyperentanglement
 *     with arm-selective pi pulses.
 *
 * Traces record each step's label, target subsystems, the state snapshot,
 * and the conditional probability of every measurement step.
 */

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "protosim/dynamics.hpp"
#include "protosim/statekit.hpp"

namespace protosim {

struct TraceStep {
  std::string label;
  std::vector<std::string> targets;  // subsystem ids the step acted on
  KetState state;
  std::optional<double> probability;  // conditional, for measurement steps
};

struct PipelineTrace {
  std::string pipeline;
  std::vector<TraceStep> steps;
  // set when a requested detection outcome has zero probability; the trace
  // then ends at the pre-detection snapshot
  bool impossible = false;

  const KetState& final_state() const;
  const TraceStep& step(const std::string& label) const;
  bool has_step(const std::string& label) const;
  void add(std::string label, std::vector<std::string> targets, KetState state,
           std::optional<double> probability = std::nullopt);
};

struct GenerationOptions {
  std::string atom1 = "a1";
  std::string atom2 = "a2";
  std::string cavity = "C1";
  std::string aux = "u1";
  // the phase-referenced (plus-sign) drive at phi = pi/2 flips g -> e with
  // no extra phase on the deflected arm
  DriveSign pulse_sign = DriveSign::Plus;
  double pulse_phi = M_PI / 2.0;
  // Ramsey-zone outcome of the auxiliary atom; "e" yields the -i relative
  // phase on the doubly excited component, "g" the +i one
  std::string aux_outcome = "e";
};

PipelineTrace generate_hyper_bell_pair(const PhysicalParams& params,
                                       const GenerationOptions& options = {});

// detection outcomes driving the entanglement swap; defaults pick the
// mixed-momentum branch that leaves atoms 1,4 maximally hyperentangled
struct DetectionPlan {
  std::string atom2_internal = "g";
  std::string atom2_momentum = "P0";
  std::string atom3_internal = "g";
  std::string atom3_momentum = "P-2";
  std::string aux_a_outcome = "g";
  std::string aux_b_outcome = "g";
};

PipelineTrace swap_entanglement(const PhysicalParams& params, const DetectionPlan& plan = {});

struct SwapOutcome {
  DetectionPlan plan;
  double probability;  // conditional on the auxiliary outcomes
  KetState state;      // conditional atoms-1,4 state, canonical global phase
  double entropy_14;   // ebits across atom1 | atom4
};

// All 16 internal x momentum outcomes for atoms 2,3 under fixed auxiliary
// outcomes; probabilities sum to 1.
std::vector<SwapOutcome> enumerate_swap_outcomes(const PhysicalParams& params,
                                                 const std::string& aux_a_outcome = "g",
                                                 const std::string& aux_b_outcome = "g");

enum class DetectorChoice { D1, D2 };

// Cavity-entangled momentum GHZ groups of n/2 atoms each (atoms a1..an,
// cavities C1/C2), kept unread for later delayed-choice manipulation.
// The cap guards accidental dense blowups in downstream oracles.
std::pair<KetState, KetState> npartite_generate(const PhysicalParams& params, int n,
                                                int atom_cap = 16);

// Beam-splitter projection of both cavities and detection at the chosen
// detector; returns the n-atom momentum-entangled state.
PipelineTrace npartite_swap(const PhysicalParams& params, int n, DetectorChoice choice);

// the bipartite (n = 4) case
PipelineTrace delayed_choice_swap(const PhysicalParams& params, DetectorChoice choice);

// Arm-selective pi pulses (minus-sign drive): arms maps atom name ->
// momentum label, e.g. {{"a1", "P0"}, {"a3", "P-2"}}.
KetState delayed_choice_hyper(const KetState& state,
                              const std::map<std::string, std::string>& arms);

// {pipeline, steps: [{label, targets, probability, state?}], final}
nlohmann::ordered_json trace_to_json(const PipelineTrace& trace, bool include_states);

}  // namespace protosim
