/*
 * statekit.hpp — sparse composite quantum states over labeled subsystems.
 *
 * A KetState is a sparse map from basis configurations to complex
 * amplitudes, where a configuration assigns one basis label to every
 * subsystem in the state's registry (e.g. a1.int -> "g", a1.mom -> "P0",
 * C1 -> "1").  Subsystems carry their own finite bases, so atoms, cavity
 * modes and detector modes coexist in one container.
 *
 * States are immutable values: every operation returns a new state.
 */

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace protosim {

using Complex = std::complex<double>;

// Amplitudes with |a| below this threshold are dropped after every
// operation.  Far below every comparison tolerance used by the tests.
inline constexpr double kPruneThreshold = 1e-12;
inline constexpr double kNormTolerance = 1e-10;

enum class SubsystemKind { AtomInternal, AtomMomentum, Cavity, DetectorMode };

std::string to_string(SubsystemKind kind);
SubsystemKind subsystem_kind_from_string(const std::string& s);

struct SubsystemSpec {
  std::string id;
  SubsystemKind kind;
  std::vector<std::string> basis;  // ordered labels, unique, size >= 2

  int dim() const { return static_cast<int>(basis.size()); }
  // index of a label in the basis, -1 if absent
  int label_index(const std::string& label) const;

  bool operator==(const SubsystemSpec&) const = default;
};

// Convenience constructors for the subsystem kinds used by the protocols.
SubsystemSpec atom_internal(const std::string& id);
SubsystemSpec atom_momentum(const std::string& id,
                            std::vector<std::string> labels = {"P0", "P-2"});
SubsystemSpec cavity_mode(const std::string& id, int n_max = 1);
SubsystemSpec detector_mode(const std::string& id);

// Partial or total assignment of basis labels, keyed by subsystem id.
using Assignment = std::map<std::string, std::string>;

// Internal configuration key: one basis index per registry slot, in
// registry order.
using ConfigKey = std::vector<std::uint8_t>;

namespace detail {
struct StateAccess;  // construction backdoor for the implementation file
}

class KetState {
 public:
  KetState() = default;

  const std::vector<SubsystemSpec>& registry() const { return registry_; }
  const std::map<ConfigKey, Complex>& amplitudes() const { return amps_; }

  bool post_selected() const { return post_selected_; }
  // probability of the branch this state was conditioned on (1 otherwise)
  double branch_probability() const { return branch_probability_; }

  std::size_t term_count() const { return amps_.size(); }
  bool is_zero() const { return amps_.empty(); }
  double norm_squared() const;

  int subsystem_index(const std::string& id) const;  // -1 if absent
  const SubsystemSpec& subsystem(const std::string& id) const;
  bool has_subsystem(const std::string& id) const;

  // label carried by `id` in a given configuration
  const std::string& label_of(const ConfigKey& key, const std::string& id) const;

  Complex amplitude(const Assignment& total_config) const;

  // Multiplies every amplitude by a unit phase.  Norm tag is unchanged.
  KetState with_global_phase(Complex unit_phase) const;
  // Rotates the global phase so the first nonzero amplitude in lexicographic
  // config-label order is real positive (serialization convention).
  KetState canonical_phase() const;

  bool same_registry(const KetState& other) const;

  friend struct detail::StateAccess;

 private:
  std::vector<SubsystemSpec> registry_;
  std::map<ConfigKey, Complex> amps_;
  bool post_selected_ = false;
  double branch_probability_ = 1.0;
};

// Zero-probability projections are a legitimate outcome of branch
// enumeration, so they are reported as a typed result, not an exception.
struct ProjectionResult {
  double probability = 0.0;
  std::optional<KetState> state;

  bool impossible() const { return !state.has_value(); }
};

struct DensityMatrix {
  std::vector<SubsystemSpec> kept;  // registry order preserved
  Eigen::MatrixXcd rho;             // mixed-radix index over `kept`

  int config_index(const Assignment& config) const;
  double trace() const;
  double purity() const;  // Tr(rho^2) / Tr(rho)^2
};

// --- construction -----------------------------------------------------------

KetState make_state(std::vector<SubsystemSpec> registry,
                    const std::vector<std::pair<Assignment, Complex>>& terms,
                    bool normalize = true);

// Single-configuration basis state.
KetState basis_state(std::vector<SubsystemSpec> registry, const Assignment& config);

// --- operations -------------------------------------------------------------

// Product state of two states over disjoint subsystem ids.
KetState tensor(const KetState& a, const KetState& b);

// Applies `u` to the listed target subsystems.  Matrix indices run in
// mixed radix over the targets in the order given (first target most
// significant).  `u` must be unitary within 1e-10 unless
// `allow_nonunitary` is set (projector application path).
KetState apply_local_unitary(const KetState& state,
                             const std::vector<std::string>& targets,
                             const Eigen::MatrixXcd& u,
                             bool allow_nonunitary = false);

// Projects onto the given partial label assignment.  The returned state is
// renormalized and tagged post-selected with the branch probability.
ProjectionResult project_and_collapse(const KetState& state, const Assignment& partial);

// Projects onto the subspace of configurations accepted by `keep`.
// Coherences inside the subspace survive (unlike project_and_collapse,
// which pins labels).
ProjectionResult project_subspace(const KetState& state,
                                  const std::function<bool(const KetState&, const ConfigKey&)>& keep);

// Removes a subsystem that is in a product state with the rest (checked:
// reduced-state purity > 1 - 1e-10).  Refuses otherwise.
KetState drop_product_subsystem(const KetState& state, const std::string& id);

// Reduced density matrix after tracing out `drop_ids`.
DensityMatrix trace_out(const KetState& state, const std::vector<std::string>& drop_ids);

// Reduced density matrix of a single subsystem (helper over trace_out).
Eigen::MatrixXcd reduced_single(const KetState& state, const std::string& id);

// Renames subsystem ids (used when comparing pipelines up to relabeling).
KetState rename_subsystems(const KetState& state,
                           const std::map<std::string, std::string>& id_map);

// --- serialization ----------------------------------------------------------

// {registry: [...], amplitudes: [{config: {id: label,...}, re, im}]},
// amplitudes sorted lexicographically by config labels for byte-stable
// output.
nlohmann::ordered_json state_to_json(const KetState& state);
KetState state_from_json(const nlohmann::json& j, bool normalize = true);

}  // namespace protosim
