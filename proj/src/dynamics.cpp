#include "protosim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "protosim/errors.hpp"
#include "state_access.hpp"

namespace protosim {

using detail::StateAccess;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void warn(std::vector<std::string>* sink, const std::string& msg) {
  if (sink)
    sink->push_back(msg);
  else
    std::cerr << "[protosim] warning: " << msg << "\n";
}

// photon count carried by a mode label ("0", "1", ...)
int mode_count(const SubsystemSpec& spec, int label_index) {
  const std::string& label = spec.basis[label_index];
  try {
    std::size_t pos = 0;
    int n = std::stoi(label, &pos);
    if (pos != label.size() || n < 0) throw std::invalid_argument(label);
    return n;
  } catch (const std::exception&) {
    fail("mode '" + spec.id + "' has non-numeric label '" + label + "'");
  }
}

struct TwoLabelSlots {
  int slot;
  std::uint8_t a, b;
};

TwoLabelSlots find_pair(const KetState& state, const std::string& id, const std::string& la,
                        const std::string& lb, const char* what) {
  int slot = state.subsystem_index(id);
  if (slot < 0) fail(std::string(what) + ": unknown subsystem '" + id + "'");
  const auto& spec = state.registry()[slot];
  int ia = spec.label_index(la), ib = spec.label_index(lb);
  if (ia < 0 || ib < 0)
    fail(std::string(what) + ": subsystem '" + id + "' is missing labels '" + la + "'/'" + lb + "'");
  return {slot, static_cast<std::uint8_t>(ia), static_cast<std::uint8_t>(ib)};
}

void prune_map(std::map<ConfigKey, Complex>& amps) {
  for (auto it = amps.begin(); it != amps.end();)
    it = (std::abs(it->second) < kPruneThreshold) ? amps.erase(it) : std::next(it);
}

}  // namespace

// --- PhysicalParams -----------------------------------------------------------

void PhysicalParams::validate() const {
  if (!(mu > 0.0) || !(delta > 0.0) || !(omega > 0.0) || !(k > 0.0) || !(mass > 0.0))
    fail("PhysicalParams: mu, delta, omega, k, mass must all be positive");
  if (bragg_order < 2 || bragg_order % 2 != 0)
    fail("PhysicalParams: bragg_order must be a positive even integer");
}

// --- pulses ----------------------------------------------------------------------

Eigen::Matrix2cd pulse_matrix(double theta, double phi, DriveSign sign) {
  const Complex i{0.0, 1.0};
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  const Complex drive = (sign == DriveSign::Plus) ? -i : i;
  Eigen::Matrix2cd u;
  // basis order (g, e)
  u(0, 0) = c;
  u(1, 1) = c;
  u(1, 0) = drive * s * std::exp(i * phi);
  u(0, 1) = drive * s * std::exp(-i * phi);
  return u;
}

// --- AmplitudeLadder ---------------------------------------------------------------

AmplitudeLadder AmplitudeLadder::zero(Branch branch, int l_max) {
  if (l_max < 3) fail("AmplitudeLadder: l_max must be >= 3");
  AmplitudeLadder out;
  out.branch = branch;
  out.l_max = l_max;
  out.primary.assign(out.size(), Complex{0.0, 0.0});
  out.intermediate.assign(out.size(), Complex{0.0, 0.0});
  out.spectator.assign(out.size(), Complex{0.0, 0.0});
  return out;
}

AmplitudeLadder AmplitudeLadder::injection(Branch branch, int l_max) {
  AmplitudeLadder out = zero(branch, l_max);
  const double a = 1.0 / std::sqrt(2.0);
  const int l0 = (branch == Branch::GroundInitial) ? 0 : -2;
  out.primary[out.index(l0)] = a;
  out.spectator[out.index(l0)] = a;
  return out;
}

int AmplitudeLadder::index(int l) const {
  if (l < -l_max || l > l_max) fail("AmplitudeLadder: l out of range");
  return l + l_max;
}

double AmplitudeLadder::norm_squared() const {
  double n = 0.0;
  for (const auto& c : primary) n += std::norm(c);
  for (const auto& c : intermediate) n += std::norm(c);
  for (const auto& c : spectator) n += std::norm(c);
  return n;
}

// --- ODE oracle -----------------------------------------------------------------------

namespace {

// Packed ladder derivative.  Layout: [primary | intermediate | spectator],
// each 2*l_max+1 wide.  Structure (both branches):
//   d pri[l]/dt  = -i ( kin(l) pri[l] + (mu/2)(mid[l+1] + mid[l-1]) )
//   d mid[l]/dt  = -i ( delta  mid[l] + (mu/2)(pri[l+1] + pri[l-1]) )
//   d spec[l]/dt = -i   kin(l) spec[l]
// with kin(l) = l (l0 + l) omega_r and everything outside [-l_max, l_max]
// zero.
struct LadderSystem {
  int n;
  double half_mu, delta;
  std::vector<double> kin;

  LadderSystem(const PhysicalParams& p, int l_max)
      : n(2 * l_max + 1), half_mu(0.5 * p.mu), delta(p.delta), kin(n) {
    const double wr = p.omega_r();
    for (int i = 0; i < n; ++i) {
      const int l = i - l_max;
      kin[i] = static_cast<double>(l) * (p.bragg_order + l) * wr;
    }
  }

  void deriv(const std::vector<Complex>& y, std::vector<Complex>& dy) const {
    const Complex* pri = y.data();
    const Complex* mid = y.data() + n;
    const Complex* spec = y.data() + 2 * n;
    Complex* dpri = dy.data();
    Complex* dmid = dy.data() + n;
    Complex* dspec = dy.data() + 2 * n;
    // -i * w spelled out as (im(w), -re(w)): keeps the hot loop free of
    // complex-complex multiplies
    for (int i = 0; i < n; ++i) {
      const Complex mid_nb =
          (i + 1 < n ? mid[i + 1] : Complex{}) + (i > 0 ? mid[i - 1] : Complex{});
      const Complex pri_nb =
          (i + 1 < n ? pri[i + 1] : Complex{}) + (i > 0 ? pri[i - 1] : Complex{});
      const Complex wp = kin[i] * pri[i] + half_mu * mid_nb;
      const Complex wm = delta * mid[i] + half_mu * pri_nb;
      const Complex ws = kin[i] * spec[i];
      dpri[i] = Complex{wp.imag(), -wp.real()};
      dmid[i] = Complex{wm.imag(), -wm.real()};
      dspec[i] = Complex{ws.imag(), -ws.real()};
    }
  }
};

void rk4_integrate(const LadderSystem& sys, std::vector<Complex>& y, double duration,
                   long steps) {
  const double h = duration / static_cast<double>(steps);
  const std::size_t m = y.size();
  std::vector<Complex> k1(m), k2(m), k3(m), k4(m), tmp(m);
  for (long s = 0; s < steps; ++s) {
    sys.deriv(y, k1);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    sys.deriv(tmp, k2);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    sys.deriv(tmp, k3);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * k3[i];
    sys.deriv(tmp, k4);
    for (std::size_t i = 0; i < m; ++i)
      y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

}  // namespace

OdeResult bragg_ode_oracle(const AmplitudeLadder& initial, const PhysicalParams& params,
                           double duration, int l_max, double tol) {
  params.validate();
  if (l_max < 3) fail("bragg_ode_oracle: l_max must be >= 3");
  if (!(tol > 0.0)) fail("bragg_ode_oracle: tol must be positive");
  if (initial.l_max > l_max) fail("bragg_ode_oracle: initial ladder wider than l_max");
  if (duration < 0.0) fail("bragg_ode_oracle: negative duration");

  // pad the initial condition out to l_max
  AmplitudeLadder start = AmplitudeLadder::zero(initial.branch, l_max);
  for (int l = -initial.l_max; l <= initial.l_max; ++l) {
    start.primary[start.index(l)] = initial.pri(l);
    start.intermediate[start.index(l)] = initial.mid(l);
    start.spectator[start.index(l)] = initial.spec(l);
  }

  OdeResult result;
  result.ladder = start;
  if (duration == 0.0) return result;

  const LadderSystem sys(params, l_max);
  const int n = sys.n;
  std::vector<Complex> y0(3 * n);
  std::copy(start.primary.begin(), start.primary.end(), y0.begin());
  std::copy(start.intermediate.begin(), start.intermediate.end(), y0.begin() + n);
  std::copy(start.spectator.begin(), start.spectator.end(), y0.begin() + 2 * n);

  double kin_max = 0.0;
  for (double kv : sys.kin) kin_max = std::max(kin_max, std::abs(kv));
  const double w_fast = std::max({params.delta, params.mu, kin_max, 1.0 / duration});
  long steps = std::max<long>(50, static_cast<long>(std::ceil(duration * w_fast / 0.5)));
  constexpr long kMaxSteps = 400'000'000;

  std::vector<Complex> coarse = y0;
  rk4_integrate(sys, coarse, duration, steps);
  while (true) {
    const long finer_steps = steps * 2;
    if (finer_steps > kMaxSteps)
      throw IntegratorError("bragg_ode_oracle: refinement did not converge within step budget");
    std::vector<Complex> fine = y0;
    rk4_integrate(sys, fine, duration, finer_steps);
    double diff = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i)
      diff = std::max(diff, std::abs(fine[i] - coarse[i]));
    coarse = std::move(fine);
    steps = finer_steps;
    if (diff < tol) {
      result.refinement_diff = diff;
      result.steps = steps;
      break;
    }
  }

  std::copy(coarse.begin(), coarse.begin() + n, result.ladder.primary.begin());
  std::copy(coarse.begin() + n, coarse.begin() + 2 * n, result.ladder.intermediate.begin());
  std::copy(coarse.begin() + 2 * n, coarse.end(), result.ladder.spectator.begin());

  result.norm_drift = std::abs(result.ladder.norm_squared() - start.norm_squared());
  if (result.norm_drift > 10.0 * tol)
    throw IntegratorError("bragg_ode_oracle: norm drift " + std::to_string(result.norm_drift) +
                          " exceeds 10 * tol");

  // boundary population of the coupled arrays flags a too-small l_max
  result.leakage =
      std::norm(result.ladder.primary.front()) + std::norm(result.ladder.primary.back()) +
      std::norm(result.ladder.intermediate.front()) + std::norm(result.ladder.intermediate.back());
  result.truncation_warning = result.leakage > 1e-6;
  return result;
}

AmplitudeLadder closed_form_ladder(const AmplitudeLadder& initial, const PhysicalParams& params,
                                   double duration) {
  params.validate();
  AmplitudeLadder out = initial;
  const double wr = params.omega_r();
  const double bt = params.beta() * duration;
  const Complex i{0.0, 1.0};
  const Complex phase = std::exp(2.0 * i * bt);
  const Complex c = phase * std::cos(bt), s = phase * i * std::sin(bt);

  const Complex p0 = initial.pri(0), pm2 = initial.pri(-2);
  for (int l = -initial.l_max; l <= initial.l_max; ++l) {
    const double kin = static_cast<double>(l) * (params.bragg_order + l) * wr;
    const Complex kin_phase = std::exp(-i * kin * duration);
    out.spectator[out.index(l)] = kin_phase * initial.spec(l);
    if (l == 0)
      out.primary[out.index(l)] = c * p0 + s * pm2;
    else if (l == -2)
      out.primary[out.index(l)] = c * pm2 + s * p0;
    else
      out.primary[out.index(l)] = kin_phase * initial.pri(l);
    // intermediates are frozen by the adiabatic elimination
    out.intermediate[out.index(l)] = std::exp(-i * params.delta * duration) * initial.mid(l);
  }
  return out;
}

double ladder_infidelity(const AmplitudeLadder& a, const AmplitudeLadder& b) {
  if (a.l_max != b.l_max) fail("ladder_infidelity: mismatched l_max");
  Complex overlap{0.0, 0.0};
  for (int idx = 0; idx < a.size(); ++idx) {
    overlap += std::conj(a.primary[idx]) * b.primary[idx];
    overlap += std::conj(a.intermediate[idx]) * b.intermediate[idx];
    overlap += std::conj(a.spectator[idx]) * b.spectator[idx];
  }
  return 1.0 - std::norm(overlap) / (a.norm_squared() * b.norm_squared());
}

double validation_coupling(double ratio, double omega_r) {
  const double b = std::max(0.25, 2.5 / std::pow(ratio, 0.25));
  return std::sqrt(4.0 * b * ratio) * omega_r;
}

AdiabaticityPoint validate_adiabaticity(const PhysicalParams& base, double ratio, int l_max,
                                        double tol) {
  if (!(ratio > 0.0)) fail("validate_adiabaticity: ratio must be positive");
  PhysicalParams p = base;
  const double wr = base.omega_r();
  p.delta = ratio * wr;
  p.mu = validation_coupling(ratio, wr);

  const double duration = p.bragg_time();
  AmplitudeLadder start = AmplitudeLadder::injection(Branch::GroundInitial, l_max);
  OdeResult ode = bragg_ode_oracle(start, p, duration, l_max, tol);
  AmplitudeLadder cf = closed_form_ladder(start, p, duration);

  AdiabaticityPoint point;
  point.delta_over_omega_r = ratio;
  point.beta_t = p.beta() * duration;
  point.infidelity = ladder_infidelity(cf, ode.ladder);
  point.norm_drift = ode.norm_drift;
  point.leakage = ode.leakage;
  point.transfer_probability = 2.0 * std::norm(ode.ladder.pri(-2));
  return point;
}

// --- state-level propagators --------------------------------------------------------

KetState bragg_closed_form(const KetState& state, const std::string& atom_internal_id,
                           const std::string& atom_momentum_id, const std::string& cavity_id,
                           const PhysicalParams& params, double duration, BraggSectors sectors,
                           std::vector<std::string>* warnings) {
  params.validate();
  const auto gi = find_pair(state, atom_internal_id, "g", "e", "bragg_closed_form");
  const auto mm = find_pair(state, atom_momentum_id, "P0", "P-2", "bragg_closed_form");
  int cav_slot = state.subsystem_index(cavity_id);
  if (cav_slot < 0) fail("bragg_closed_form: unknown cavity '" + cavity_id + "'");
  const auto& cav = state.registry()[cav_slot];

  const double ratio = params.delta / params.omega_r();
  if (ratio < 2.0)
    throw SimError("bragg_closed_form: delta/omega_r = " + std::to_string(ratio) +
                   " is outside the Bragg regime (need >= 2)");
  if (ratio < 10.0)
    warn(warnings, "bragg_closed_form: delta/omega_r = " + std::to_string(ratio) +
                       " is marginal for the adiabatic closed form");

  const double bt = params.beta() * duration;
  const Complex i{0.0, 1.0};
  const Complex stay = std::exp(2.0 * i * bt) * std::cos(bt);
  const Complex hop = std::exp(2.0 * i * bt) * i * std::sin(bt);

  std::map<ConfigKey, Complex> out;
  for (const auto& [key, amp] : state.amplitudes()) {
    const int n = mode_count(cav, key[cav_slot]);
    if (n >= 2)
      throw UnsupportedSectorError("bragg_closed_form: photon number " + std::to_string(n) +
                                   " is outside the model");
    const bool ground = key[gi.slot] == gi.a;
    const bool excited = key[gi.slot] == gi.b;
    const bool interacting = (ground && n == 1 && sectors != BraggSectors::ExcitedOnly) ||
                             (excited && n == 0 && sectors != BraggSectors::GroundOnly);
    const std::uint8_t m = key[mm.slot];
    if (interacting && (m == mm.a || m == mm.b)) {
      ConfigKey partner = key;
      partner[mm.slot] = (m == mm.a) ? mm.b : mm.a;
      out[key] += amp * stay;
      out[partner] += amp * hop;
    } else {
      out[key] += amp;  // uncoupled sector; kinetic phase vanishes on the pair
    }
  }
  prune_map(out);
  return StateAccess::like(state, std::move(out));
}

KetState jc_resonant(const KetState& state, const std::string& atom_internal_id,
                     const std::string& cavity_id, const PhysicalParams& params,
                     double duration) {
  params.validate();
  const auto gi = find_pair(state, atom_internal_id, "g", "e", "jc_resonant");
  int cav_slot = state.subsystem_index(cavity_id);
  if (cav_slot < 0) fail("jc_resonant: unknown cavity '" + cavity_id + "'");
  const auto& cav = state.registry()[cav_slot];
  int zero_idx = -1, one_idx = -1;
  for (int l = 0; l < cav.dim(); ++l) {
    const int n = mode_count(cav, l);
    if (n == 0) zero_idx = l;
    if (n == 1) one_idx = l;
  }
  if (one_idx < 0 || zero_idx < 0) fail("jc_resonant: cavity needs Fock labels 0 and 1");

  const double mt = params.mu * duration;
  const Complex c{std::cos(mt), 0.0};
  const Complex m_is{0.0, -std::sin(mt)};

  std::map<ConfigKey, Complex> out;
  for (const auto& [key, amp] : state.amplitudes()) {
    const int n = mode_count(cav, key[cav_slot]);
    const bool excited = key[gi.slot] == gi.b;
    if (n >= 2 || (excited && n >= 1))
      throw UnsupportedSectorError(
          "jc_resonant: populated configuration with total excitation > 1");
    if (!excited && n == 1) {
      ConfigKey flip = key;
      flip[gi.slot] = gi.b;
      flip[cav_slot] = static_cast<std::uint8_t>(zero_idx);
      out[key] += amp * c;
      out[flip] += amp * m_is;
    } else if (excited && n == 0) {
      ConfigKey flip = key;
      flip[gi.slot] = gi.a;
      flip[cav_slot] = static_cast<std::uint8_t>(one_idx);
      out[key] += amp * c;
      out[flip] += amp * m_is;
    } else {
      out[key] += amp;  // |g,0> is dark
    }
  }
  prune_map(out);
  return StateAccess::like(state, std::move(out));
}

KetState classical_pulse(const KetState& state, const std::string& atom_internal_id,
                         const std::string& atom_momentum_id, const PulseSpec& pulse) {
  const auto gi = find_pair(state, atom_internal_id, "g", "e", "classical_pulse");
  int mom_slot = state.subsystem_index(atom_momentum_id);
  if (mom_slot < 0) fail("classical_pulse: unknown subsystem '" + atom_momentum_id + "'");
  int arm = state.registry()[mom_slot].label_index(pulse.arm);
  if (arm < 0)
    fail("classical_pulse: unknown arm '" + pulse.arm + "' on '" + atom_momentum_id + "'");

  const Eigen::Matrix2cd u = pulse_matrix(pulse.theta, pulse.phi, pulse.sign);

  std::map<ConfigKey, Complex> out;
  for (const auto& [key, amp] : state.amplitudes()) {
    if (key[mom_slot] != static_cast<std::uint8_t>(arm)) {
      out[key] += amp;
      continue;
    }
    const int col = (key[gi.slot] == gi.a) ? 0 : 1;
    ConfigKey kg = key, ke = key;
    kg[gi.slot] = gi.a;
    ke[gi.slot] = gi.b;
    out[kg] += amp * u(0, col);
    out[ke] += amp * u(1, col);
  }
  prune_map(out);
  return StateAccess::like(state, std::move(out));
}

KetState ramsey_zone(const KetState& state, const std::string& atom_internal_id) {
  const auto gi = find_pair(state, atom_internal_id, "g", "e", "ramsey_zone");
  const int d = state.registry()[gi.slot].dim();
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(d, d);
  u(gi.a, gi.a) = r;
  u(gi.a, gi.b) = r;
  u(gi.b, gi.a) = r;
  u(gi.b, gi.b) = -r;
  return apply_local_unitary(state, {atom_internal_id}, u);
}

KetState momentum_hadamard(const KetState& state, const std::string& atom_momentum_id) {
  const auto mm = find_pair(state, atom_momentum_id, "P0", "P-2", "momentum_hadamard");
  const int d = state.registry()[mm.slot].dim();
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(d, d);
  u(mm.a, mm.a) = r;
  u(mm.a, mm.b) = r;
  u(mm.b, mm.a) = r;
  u(mm.b, mm.b) = -r;
  return apply_local_unitary(state, {atom_momentum_id}, u);
}

KetState beam_splitter(const KetState& state, const std::string& in0, const std::string& in1,
                       const std::string& out2, const std::string& out3) {
  int s0 = state.subsystem_index(in0), s1 = state.subsystem_index(in1);
  if (s0 < 0 || s1 < 0) fail("beam_splitter: unknown input mode");
  if (s0 == s1) fail("beam_splitter: input modes must differ");
  if (state.has_subsystem(out2) || state.has_subsystem(out3) || out2 == out3)
    fail("beam_splitter: output modes must be fresh and distinct");
  const auto& spec0 = state.registry()[s0];
  const auto& spec1 = state.registry()[s1];

  std::vector<SubsystemSpec> registry;
  std::vector<int> kept_slots;
  for (std::size_t i = 0; i < state.registry().size(); ++i) {
    if (static_cast<int>(i) == s0 || static_cast<int>(i) == s1) continue;
    registry.push_back(state.registry()[i]);
    kept_slots.push_back(static_cast<int>(i));
  }
  registry.push_back(detector_mode(out2));
  registry.push_back(detector_mode(out3));

  const double r = 1.0 / std::sqrt(2.0);
  const Complex i{0.0, 1.0};

  std::map<ConfigKey, Complex> out;
  auto emit = [&](const ConfigKey& rest, int n2, int n3, Complex amp) {
    ConfigKey key = rest;
    key.push_back(static_cast<std::uint8_t>(n2));
    key.push_back(static_cast<std::uint8_t>(n3));
    out[key] += amp;
  };
  for (const auto& [key, amp] : state.amplitudes()) {
    const int n0 = mode_count(spec0, key[s0]);
    const int n1 = mode_count(spec1, key[s1]);
    if (n0 + n1 > 1)
      throw UnsupportedSectorError("beam_splitter: more than one photon across the input modes");
    ConfigKey rest;
    rest.reserve(kept_slots.size() + 2);
    for (int slot : kept_slots) rest.push_back(key[slot]);
    if (n0 == 0 && n1 == 0) {
      emit(rest, 0, 0, amp);
    } else if (n0 == 1) {
      emit(rest, 1, 0, amp * r);
      emit(rest, 0, 1, amp * i * r);
    } else {
      emit(rest, 1, 0, amp * i * r);
      emit(rest, 0, 1, amp * r);
    }
  }
  prune_map(out);
  return StateAccess::make(std::move(registry), std::move(out), state.post_selected(),
                           state.branch_probability());
}

std::vector<DetectionOutcome> detect_photons(const KetState& state,
                                             const std::vector<std::string>& detector_ids) {
  if (detector_ids.empty()) fail("detect_photons: no detector modes given");
  std::vector<int> slots;
  for (const auto& id : detector_ids) {
    int slot = state.subsystem_index(id);
    if (slot < 0) fail("detect_photons: unknown mode '" + id + "'");
    slots.push_back(slot);
  }

  std::map<std::vector<int>, bool> occupied;
  for (const auto& [key, amp] : state.amplitudes()) {
    std::vector<int> counts;
    for (int slot : slots) counts.push_back(mode_count(state.registry()[slot], key[slot]));
    occupied[counts] = true;
  }

  std::vector<DetectionOutcome> outcomes;
  for (const auto& [counts, ignored] : occupied) {
    Assignment pin;
    std::string label;
    int total = 0;
    for (std::size_t i = 0; i < detector_ids.size(); ++i) {
      pin[detector_ids[i]] = std::to_string(counts[i]);
      if (!label.empty()) label += " ";
      label += detector_ids[i] + "=" + std::to_string(counts[i]);
      total += counts[i];
    }
    auto res = project_and_collapse(state, pin);
    if (res.impossible()) continue;  // cannot happen for occupied tuples
    KetState cond = *res.state;
    for (const auto& id : detector_ids) cond = drop_product_subsystem(cond, id);
    outcomes.push_back(
        DetectionOutcome{label, counts, res.probability, std::move(cond), total != 1});
  }
  return outcomes;
}

}  // namespace protosim
