/*
 * dynamics.hpp — the physical transformations of the simulator.
 *
 * Off-resonant first-order Bragg diffraction of a two-level atom through a
 * cavity in a |0>/|1> superposition, in two forms:
 *
 *   bragg_closed_form : the adiabatic two-level rotation on the resonant
 *     momentum pair (P0, P-2),
 *       C_a(t) = e^{2i beta t} [ C_a(0) cos(beta t) + i C_b(0) sin(beta t) ],
 *     with beta = mu^2/(4 delta), acting in the (g, n=1) sector for a
 *     ground-state atom and in the (e, n=0) sector for an excited one.
 *     The (g, n=0) and (e, n=1) sectors are uncoupled and their kinetic
 *     phases l(l0+l) omega_r t vanish for l in {0, -2}.
 *
 *   bragg_ode_oracle : fixed-step RK4 integration of the full truncated
 *     momentum-ladder equations (no adiabatic elimination), used to test
 *     the closed form rather than assume it.
 *
 * Plus the resonant Jaynes-Cummings exchange, classical Rabi pulses on a
 * selected momentum arm, Ramsey zones, momentum Hadamards, the symmetric
 * two-mode beam splitter, and photon detection.
 *
 * hbar = 1 internally: every propagator works with rad/s rates and seconds.
 */

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "protosim/statekit.hpp"

namespace protosim {

inline constexpr double kHbarSI = 1.054571817e-34;  // J s
inline constexpr double kAmuKg = 1.66053906660e-27;  // kg

struct PhysicalParams {
  double mu = 0.0;     // atom-field coupling (rad/s)
  double delta = 0.0;  // detuning (rad/s)
  double omega = 0.0;  // classical Rabi frequency (rad/s)
  double k = 0.0;      // field wavenumber (1/m)
  double mass = 0.0;   // atom mass (kg)
  int bragg_order = 2; // l0, even; the protocols use first order (2)

  // recoil frequency hbar k^2 / 2M (rad/s); derived, never stored
  double omega_r() const { return kHbarSI * k * k / (2.0 * mass); }
  // pendelloesung rate mu^2 / (4 delta) (rad/s); derived, never stored
  double beta() const { return mu * mu / (4.0 * delta); }
  // interaction time giving beta t = pi/2 (full P0 -> P-2 transfer)
  double bragg_time() const { return 2.0 * M_PI * delta / (mu * mu); }
  // minimal full photon-transfer time for the resonant auxiliary readout
  double aux_readout_time() const { return M_PI / (2.0 * mu); }

  void validate() const;  // positivity, even bragg_order
};

// --- classical pulses --------------------------------------------------------

// Sign of the semiclassical drive term in the two-level Hamiltonian.  The
// two conventions used by the protocols differ by this overall sign:
//   Plus : H = +(Omega/2)(e^{-i phi} sigma+ + e^{i phi} sigma-)
//          theta = pi, phi = pi/2  ->  |g> -> |e>,  |e> -> -|g>
//   Minus: H = -(Omega/2)(e^{-i phi} sigma+ + e^{i phi} sigma-)
//          theta = pi, phi = 0     ->  |g> -> i|e>, |e> -> i|g>
enum class DriveSign { Plus, Minus };

struct PulseSpec {
  double theta = M_PI;  // pulse area Omega t (rad)
  double phi = 0.0;     // drive phase (rad)
  std::string arm;      // momentum label filter; applied only on this arm
  DriveSign sign = DriveSign::Minus;
};

// 2x2 internal-state rotation of a pulse, basis order (g, e)
Eigen::Matrix2cd pulse_matrix(double theta, double phi, DriveSign sign);

// --- momentum-ladder oracle ----------------------------------------------------

enum class Branch { GroundInitial, ExcitedInitial };

// Truncated ladder amplitudes, index l in [-l_max, l_max].  The three
// arrays play the same structural roles in both branches:
//   GroundInitial : primary = C_{g,1},  intermediate = C_{e,0},  spectator = C_{g,0}
//   ExcitedInitial: primary = C_{e,0},  intermediate = C_{g,1},  spectator = C_{e,1}
// primary carries the Bragg-coupled pair (even l) with the kinetic
// diagonal; intermediate carries the detuned odd-l amplitudes (diagonal
// delta); spectator is uncoupled (kinetic diagonal only).
struct AmplitudeLadder {
  Branch branch = Branch::GroundInitial;
  int l_max = 6;
  std::vector<Complex> primary;
  std::vector<Complex> intermediate;
  std::vector<Complex> spectator;

  static AmplitudeLadder zero(Branch branch, int l_max);
  // ladder with spectator[0] = primary[0] = 1/sqrt(2): the standard
  // injection |g,P0> (x) (|0>+|1>)/sqrt(2) (or its excited-branch
  // counterpart on l = -2)
  static AmplitudeLadder injection(Branch branch, int l_max);

  int size() const { return 2 * l_max + 1; }
  int index(int l) const;
  Complex pri(int l) const { return primary[index(l)]; }
  Complex mid(int l) const { return intermediate[index(l)]; }
  Complex spec(int l) const { return spectator[index(l)]; }
  double norm_squared() const;
};

struct OdeResult {
  AmplitudeLadder ladder;
  double norm_drift = 0.0;       // |final - initial| of the ladder norm^2
  double leakage = 0.0;          // boundary population of the coupled arrays
  bool truncation_warning = false;  // leakage > 1e-6
  long steps = 0;                // step count of the accepted refinement
  double refinement_diff = 0.0;  // max-abs diff between last two refinements
};

// Integrates the truncated coupled ladder with fixed-step RK4, halving the
// step until successive refinements agree within tol.  Throws
// IntegratorError when the norm drifts by more than 10 * tol.
OdeResult bragg_ode_oracle(const AmplitudeLadder& initial, const PhysicalParams& params,
                           double duration, int l_max, double tol);

// Adiabatic prediction for the same ladder: the two-level rotation on the
// (0, -2) primary pair, kinetic phases elsewhere, intermediates frozen.
AmplitudeLadder closed_form_ladder(const AmplitudeLadder& initial, const PhysicalParams& params,
                                   double duration);

// 1 - |<a|b>|^2 over all three arrays
double ladder_infidelity(const AmplitudeLadder& a, const AmplitudeLadder& b);

// One grid point of the adiabatic-validity study: ODE oracle vs closed
// form at beta t = pi/2 for a given detuning-to-recoil ratio.  Only the
// ratio is taken from `base` (via its derived omega_r); the coupling is
// chosen by validation_coupling() so that both the adiabaticity parameter
// mu/(2 delta) and the ladder selectivity beta/omega_r improve as the
// ratio grows.
struct AdiabaticityPoint {
  double delta_over_omega_r = 0.0;
  double beta_t = 0.0;
  double infidelity = 0.0;
  double norm_drift = 0.0;
  double leakage = 0.0;
  double transfer_probability = 0.0;  // one-photon-branch P0 -> P-2 transfer
};

// Pendelloesung rate for a validation run: beta/omega_r = 2.5 / ratio^{1/4},
// floored at 0.25.  Shrinking beta with the ratio keeps the higher-order
// ladder leakage (~ (beta/8 omega_r)^2) and the adiabatic leakage
// (~ beta/delta) both falling, so the closed form's accuracy improves
// monotonically; the floor bounds the integration cost at large ratios
// while staying well inside first-order selectivity.
double validation_coupling(double ratio, double omega_r);

AdiabaticityPoint validate_adiabaticity(const PhysicalParams& base, double ratio,
                                        int l_max = 6, double tol = 1e-6);

// --- state-level propagators ---------------------------------------------------

// Restricts bragg_closed_form to one internal-state branch; the
// entanglement-swapping stage routes the ground branch through one cavity
// and the excited branch through the other.
enum class BraggSectors { Both, GroundOnly, ExcitedOnly };

KetState bragg_closed_form(const KetState& state, const std::string& atom_internal_id,
                           const std::string& atom_momentum_id, const std::string& cavity_id,
                           const PhysicalParams& params, double duration,
                           BraggSectors sectors = BraggSectors::Both,
                           std::vector<std::string>* warnings = nullptr);

// Resonant Jaynes-Cummings exchange H = mu (sigma+ b + sigma- b+):
//   |g,1> -> cos(mu t)|g,1> - i sin(mu t)|e,0>
//   |e,0> -> cos(mu t)|e,0> - i sin(mu t)|g,1>
//   |g,0> fixed; populated |e,1> or n >= 2 is unsupported.
KetState jc_resonant(const KetState& state, const std::string& atom_internal_id,
                     const std::string& cavity_id, const PhysicalParams& params,
                     double duration);

// Applies the pulse's internal rotation on configurations whose momentum
// label equals pulse.arm; other configurations are untouched.
KetState classical_pulse(const KetState& state, const std::string& atom_internal_id,
                         const std::string& atom_momentum_id, const PulseSpec& pulse);

// |g> -> (|g>+|e>)/sqrt(2), |e> -> (|g>-|e>)/sqrt(2); involutive.
KetState ramsey_zone(const KetState& state, const std::string& atom_internal_id);

// Same map on the momentum pair: |P0> -> (|P0>+|P-2>)/sqrt(2),
// |P-2> -> (|P0>-|P-2>)/sqrt(2).  Other momentum labels are untouched.
KetState momentum_hadamard(const KetState& state, const std::string& atom_momentum_id);

// Symmetric beam splitter a2 = (a0 + i a1)/sqrt(2), a3 = (i a0 + a1)/sqrt(2):
//   |1,0> -> (|1,0> + i|0,1>)/sqrt(2)
//   |0,1> -> (i|1,0> + |0,1>)/sqrt(2)
//   |0,0> -> |0,0>
// Input modes are removed from the registry; fresh detector modes out2,
// out3 are appended.  More than one photon across the inputs is
// unsupported (those branches are discarded before the splitter).
KetState beam_splitter(const KetState& state, const std::string& in0, const std::string& in1,
                       const std::string& out2, const std::string& out3);

struct DetectionOutcome {
  std::string label;        // e.g. "D1=1 D2=0"
  std::vector<int> counts;  // photon count per detector, in argument order
  double probability;
  KetState state;           // conditional state, detector modes removed
  bool failure;             // total count != 1
};

// Enumerates the occupied photon-count outcomes over the given detector
// modes.  Probabilities sum to 1; conditional states are renormalized.
std::vector<DetectionOutcome> detect_photons(const KetState& state,
                                             const std::vector<std::string>& detector_ids);

}  // namespace protosim
