#include "protosim/protocols.hpp"

#include <algorithm>
#include <cmath>

#include "protosim/errors.hpp"
#include "protosim/metrics.hpp"

namespace protosim {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

KetState superposed_cavity(const std::string& id) {
  return make_state({cavity_mode(id)},
                    {{{{id, "0"}}, {kInvSqrt2, 0.0}}, {{{id, "1"}}, {kInvSqrt2, 0.0}}},
                    false);
}

KetState ground_atom(const std::string& name) {
  return basis_state({atom_internal(name + ".int"), atom_momentum(name + ".mom")},
                     {{name + ".int", "g"}, {name + ".mom", "P0"}});
}

std::vector<std::string> atom_ids(const std::string& name) {
  return {name + ".int", name + ".mom"};
}

// resonant auxiliary readout of one cavity: inject a ground aux atom, full
// photon transfer, Ramsey zone, project the requested outcome, drop the
// aux atom (the cavity is left in vacuum but stays in the registry)
struct AuxReadout {
  KetState state;
  double probability;
};

AuxReadout aux_readout(const KetState& input, const std::string& aux_name,
                       const std::string& cavity_id, const PhysicalParams& params,
                       const std::string& outcome) {
  const std::string aux_int = aux_name + ".int";
  KetState s = tensor(input, basis_state({atom_internal(aux_int)}, {{aux_int, "g"}}));
  s = jc_resonant(s, aux_int, cavity_id, params, params.aux_readout_time());
  s = ramsey_zone(s, aux_int);
  auto res = project_and_collapse(s, {{aux_int, outcome}});
  if (res.impossible())
    throw SimError("aux_readout: outcome '" + outcome + "' has zero probability");
  return AuxReadout{drop_product_subsystem(*res.state, aux_int), res.probability};
}

}  // namespace

// --- PipelineTrace ------------------------------------------------------------------

const KetState& PipelineTrace::final_state() const {
  if (steps.empty()) fail("PipelineTrace: empty trace");
  return steps.back().state;
}

const TraceStep& PipelineTrace::step(const std::string& label) const {
  for (const auto& s : steps)
    if (s.label == label) return s;
  fail("PipelineTrace: no step '" + label + "'");
}

bool PipelineTrace::has_step(const std::string& label) const {
  for (const auto& s : steps)
    if (s.label == label) return true;
  return false;
}

void PipelineTrace::add(std::string label, std::vector<std::string> targets, KetState state,
                        std::optional<double> probability) {
  for (const auto& s : steps)
    if (s.label == label) fail("PipelineTrace: duplicate step label '" + label + "'");
  steps.push_back(TraceStep{std::move(label), std::move(targets), std::move(state), probability});
}

// --- generation ----------------------------------------------------------------------

PipelineTrace generate_hyper_bell_pair(const PhysicalParams& params,
                                       const GenerationOptions& options) {
  params.validate();
  const auto& o = options;
  PipelineTrace trace;
  trace.pipeline = "generate_hyper_bell_pair";

  const double t_bragg = params.bragg_time();
  const PulseSpec pulse{M_PI, o.pulse_phi, "P-2", o.pulse_sign};

  KetState s = tensor(superposed_cavity(o.cavity), ground_atom(o.atom1));
  trace.add("inject-atom1", atom_ids(o.atom1), s);

  s = bragg_closed_form(s, o.atom1 + ".int", o.atom1 + ".mom", o.cavity, params, t_bragg);
  trace.add("bragg-atom1", {o.atom1 + ".int", o.atom1 + ".mom", o.cavity}, s);

  s = classical_pulse(s, o.atom1 + ".int", o.atom1 + ".mom", pulse);
  trace.add("pulse-atom1", atom_ids(o.atom1), s);

  s = tensor(s, ground_atom(o.atom2));
  trace.add("inject-atom2", atom_ids(o.atom2), s);

  s = bragg_closed_form(s, o.atom2 + ".int", o.atom2 + ".mom", o.cavity, params, t_bragg);
  trace.add("bragg-atom2", {o.atom2 + ".int", o.atom2 + ".mom", o.cavity}, s);

  s = classical_pulse(s, o.atom2 + ".int", o.atom2 + ".mom", pulse);
  trace.add("pulse-atom2", atom_ids(o.atom2), s);

  AuxReadout readout = aux_readout(s, o.aux, o.cavity, params, o.aux_outcome);
  trace.add("aux-readout", {o.aux + ".int", o.cavity}, readout.state, readout.probability);

  s = drop_product_subsystem(readout.state, o.cavity);
  trace.add("drop-cavity", {o.cavity}, s);
  return trace;
}

// --- entanglement swapping --------------------------------------------------------------

namespace {

// common part of the swap pipeline, through the Ramsey zones on atoms 2,3
PipelineTrace swap_prefix(const PhysicalParams& params, const std::string& aux_a_outcome,
                          const std::string& aux_b_outcome) {
  params.validate();
  PipelineTrace trace;
  trace.pipeline = "swap_entanglement";

  GenerationOptions pair12;
  pair12.atom1 = "a1";
  pair12.atom2 = "a2";
  pair12.cavity = "C1";
  pair12.aux = "u1";
  GenerationOptions pair34 = pair12;
  pair34.atom1 = "a3";
  pair34.atom2 = "a4";
  pair34.cavity = "C2";
  pair34.aux = "u2";

  PipelineTrace t12 = generate_hyper_bell_pair(params, pair12);
  trace.add("generate-pair-12", {"a1.int", "a1.mom", "a2.int", "a2.mom", "C1", "u1.int"},
            t12.final_state());
  PipelineTrace t34 = generate_hyper_bell_pair(params, pair34);
  trace.add("generate-pair-34", {"a3.int", "a3.mom", "a4.int", "a4.mom", "C2", "u2.int"},
            t34.final_state());

  KetState s = tensor(t12.final_state(), t34.final_state());
  trace.add("pairs-joined", {}, s);

  s = tensor(s, tensor(superposed_cavity("A"), superposed_cavity("B")));
  trace.add("cavities-injected", {"A", "B"}, s);

  // the undeflected (ground) arm of each inner atom crosses cavity A, the
  // deflected (excited) arm cavity B
  const double t_bragg = params.bragg_time();
  for (int inner : {2, 3}) {
    const std::string atom = "a" + std::to_string(inner);
    s = bragg_closed_form(s, atom + ".int", atom + ".mom", "A", params, t_bragg,
                          BraggSectors::GroundOnly);
    s = bragg_closed_form(s, atom + ".int", atom + ".mom", "B", params, t_bragg,
                          BraggSectors::ExcitedOnly);
    trace.add("bragg-atom" + std::to_string(inner), {atom + ".int", atom + ".mom", "A", "B"}, s);
  }

  AuxReadout ra = aux_readout(s, "s", "A", params, aux_a_outcome);
  trace.add("aux-A", {"s.int", "A"}, ra.state, ra.probability);
  AuxReadout rb = aux_readout(ra.state, "t", "B", params, aux_b_outcome);
  trace.add("aux-B", {"t.int", "B"}, rb.state, rb.probability);

  s = drop_product_subsystem(rb.state, "A");
  trace.add("drop-cavity-A", {"A"}, s);
  s = drop_product_subsystem(s, "B");
  trace.add("drop-cavity-B", {"B"}, s);

  s = ramsey_zone(s, "a2.int");
  trace.add("ramsey-atom2", {"a2.int"}, s);
  s = ramsey_zone(s, "a3.int");
  trace.add("ramsey-atom3", {"a3.int"}, s);
  return trace;
}

Assignment plan_assignment(const DetectionPlan& plan) {
  return {{"a2.int", plan.atom2_internal},
          {"a2.mom", plan.atom2_momentum},
          {"a3.int", plan.atom3_internal},
          {"a3.mom", plan.atom3_momentum}};
}

}  // namespace

PipelineTrace swap_entanglement(const PhysicalParams& params, const DetectionPlan& plan) {
  PipelineTrace trace = swap_prefix(params, plan.aux_a_outcome, plan.aux_b_outcome);
  auto res = project_and_collapse(trace.final_state(), plan_assignment(plan));
  if (res.impossible()) {
    trace.impossible = true;
    return trace;
  }
  KetState s = *res.state;
  for (const auto& id : {"a2.int", "a2.mom", "a3.int", "a3.mom"})
    s = drop_product_subsystem(s, id);
  trace.add("detect-atoms-23", {"a2.int", "a2.mom", "a3.int", "a3.mom"}, std::move(s),
            res.probability);
  return trace;
}

std::vector<SwapOutcome> enumerate_swap_outcomes(const PhysicalParams& params,
                                                 const std::string& aux_a_outcome,
                                                 const std::string& aux_b_outcome) {
  PipelineTrace prefix = swap_prefix(params, aux_a_outcome, aux_b_outcome);
  const KetState& ready = prefix.final_state();

  static const std::vector<std::string> internals = {"g", "e"};
  static const std::vector<std::string> momenta = {"P0", "P-2"};
  std::vector<SwapOutcome> table;
  for (const std::string& i2 : internals)
    for (const std::string& i3 : internals)
      for (const std::string& m2 : momenta)
        for (const std::string& m3 : momenta) {
          DetectionPlan plan;
          plan.atom2_internal = i2;
          plan.atom3_internal = i3;
          plan.atom2_momentum = m2;
          plan.atom3_momentum = m3;
          plan.aux_a_outcome = aux_a_outcome;
          plan.aux_b_outcome = aux_b_outcome;

          auto res = project_and_collapse(ready, plan_assignment(plan));
          if (res.impossible()) {
            table.push_back(SwapOutcome{plan, 0.0, KetState{}, 0.0});
            continue;
          }
          KetState s = *res.state;
          for (const auto& id : {"a2.int", "a2.mom", "a3.int", "a3.mom"})
            s = drop_product_subsystem(s, id);
          s = s.canonical_phase();
          const double entropy = entanglement_entropy(s, {"a1.int", "a1.mom"});
          table.push_back(SwapOutcome{plan, res.probability, std::move(s), entropy});
        }
  return table;
}

// --- delayed choice and n-partite swapping ------------------------------------------------

std::pair<KetState, KetState> npartite_generate(const PhysicalParams& params, int n,
                                                int atom_cap) {
  params.validate();
  if (n < 4 || n % 2 != 0) fail("npartite_generate: n must be even and >= 4");
  if (n > atom_cap) fail("npartite_generate: n exceeds the cap of " + std::to_string(atom_cap));

  auto group = [&](const std::string& cavity, int first, int last) {
    std::vector<SubsystemSpec> registry = {cavity_mode(cavity)};
    Assignment undeflected{{cavity, "0"}};
    Assignment deflected{{cavity, "1"}};
    for (int i = first; i <= last; ++i) {
      const std::string name = "a" + std::to_string(i);
      registry.push_back(atom_internal(name + ".int"));
      registry.push_back(atom_momentum(name + ".mom"));
      undeflected[name + ".int"] = "g";
      undeflected[name + ".mom"] = "P0";
      deflected[name + ".int"] = "g";
      deflected[name + ".mom"] = "P-2";
    }
    return make_state(std::move(registry),
                      {{undeflected, {kInvSqrt2, 0.0}}, {deflected, {kInvSqrt2, 0.0}}},
                      false);
  };
  return {group("C1", 1, n / 2), group("C2", n / 2 + 1, n)};
}

PipelineTrace npartite_swap(const PhysicalParams& params, int n, DetectorChoice choice) {
  auto [group1, group2] = npartite_generate(params, n);

  PipelineTrace trace;
  trace.pipeline = "npartite_swap";
  std::vector<std::string> group1_ids, group2_ids;
  for (const auto& spec : group1.registry()) group1_ids.push_back(spec.id);
  for (const auto& spec : group2.registry()) group2_ids.push_back(spec.id);
  trace.add("group-1", group1_ids, group1);
  trace.add("group-2", group2_ids, group2);

  KetState s = tensor(group1, group2);
  trace.add("joined", {}, s);

  // no photon or two photons at the splitter mark the failure branch
  auto single_photon = [](const KetState& st, const ConfigKey& key) {
    const int n1 = st.label_of(key, "C1") == "1" ? 1 : 0;
    const int n2 = st.label_of(key, "C2") == "1" ? 1 : 0;
    return n1 + n2 == 1;
  };
  auto post = project_subspace(s, single_photon);
  if (post.impossible()) fail("npartite_swap: no single-photon component");
  s = *post.state;
  trace.add("single-photon-postselect", {"C1", "C2"}, s, post.probability);

  // the C2 photon exits toward D1 unphased (input 0 of the splitter)
  s = beam_splitter(s, "C2", "C1", "D1", "D2");
  trace.add("beam-splitter", {"C1", "C2", "D1", "D2"}, s);

  const std::string want = (choice == DetectorChoice::D1) ? "D1=1 D2=0" : "D1=0 D2=1";
  auto outcomes = detect_photons(s, {"D1", "D2"});
  for (auto& outcome : outcomes) {
    if (outcome.label == want) {
      trace.add("detect-" + std::string(choice == DetectorChoice::D1 ? "D1" : "D2"),
                {"D1", "D2"}, std::move(outcome.state), outcome.probability);
      return trace;
    }
  }
  trace.impossible = true;
  return trace;
}

PipelineTrace delayed_choice_swap(const PhysicalParams& params, DetectorChoice choice) {
  PipelineTrace trace = npartite_swap(params, 4, choice);
  trace.pipeline = "delayed_choice_swap";
  return trace;
}

KetState delayed_choice_hyper(const KetState& state,
                              const std::map<std::string, std::string>& arms) {
  KetState s = state;
  for (const auto& [atom, arm] : arms)
    s = classical_pulse(s, atom + ".int", atom + ".mom", PulseSpec{M_PI, 0.0, arm, DriveSign::Minus});
  return s;
}

// --- reporting -----------------------------------------------------------------------------

nlohmann::ordered_json trace_to_json(const PipelineTrace& trace, bool include_states) {
  nlohmann::ordered_json j;
  j["pipeline"] = trace.pipeline;
  j["impossible"] = trace.impossible;
  j["steps"] = nlohmann::ordered_json::array();
  for (const auto& step : trace.steps) {
    nlohmann::ordered_json row;
    row["label"] = step.label;
    row["targets"] = step.targets;
    if (step.probability) row["probability"] = *step.probability;
    if (include_states) row["state"] = state_to_json(step.state.canonical_phase());
    j["steps"].push_back(std::move(row));
  }
  if (!trace.steps.empty())
    j["final"] = state_to_json(trace.final_state().canonical_phase());
  return j;
}

}  // namespace protosim
