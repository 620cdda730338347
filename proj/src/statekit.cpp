#include "protosim/statekit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "protosim/errors.hpp"
#include "state_access.hpp"

namespace protosim {

using detail::StateAccess;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void validate_registry(const std::vector<SubsystemSpec>& registry) {
  for (std::size_t i = 0; i < registry.size(); ++i) {
    const auto& spec = registry[i];
    if (spec.id.empty()) fail("subsystem id must be nonempty");
    if (spec.dim() < 2) fail("subsystem '" + spec.id + "' needs at least 2 basis labels");
    if (spec.dim() > 255) fail("subsystem '" + spec.id + "' basis too large");
    for (std::size_t a = 0; a < spec.basis.size(); ++a)
      for (std::size_t b = a + 1; b < spec.basis.size(); ++b)
        if (spec.basis[a] == spec.basis[b])
          fail("duplicate basis label '" + spec.basis[a] + "' in subsystem '" + spec.id + "'");
    for (std::size_t j = i + 1; j < registry.size(); ++j)
      if (registry[j].id == spec.id) fail("duplicate subsystem id '" + spec.id + "'");
  }
}

void prune(std::map<ConfigKey, Complex>& amps) {
  for (auto it = amps.begin(); it != amps.end();) {
    if (std::abs(it->second) < kPruneThreshold)
      it = amps.erase(it);
    else
      ++it;
  }
}

double map_norm_squared(const std::map<ConfigKey, Complex>& amps) {
  double s = 0.0;
  for (const auto& [key, amp] : amps) s += std::norm(amp);
  return s;
}

// labels of a config in registry order (for lexicographic serialization)
std::vector<std::string> config_labels(const std::vector<SubsystemSpec>& registry,
                                       const ConfigKey& key) {
  std::vector<std::string> out;
  out.reserve(key.size());
  for (std::size_t i = 0; i < key.size(); ++i) out.push_back(registry[i].basis[key[i]]);
  return out;
}

}  // namespace

// --- SubsystemSpec ------------------------------------------------------------

std::string to_string(SubsystemKind kind) {
  switch (kind) {
    case SubsystemKind::AtomInternal: return "atom-internal";
    case SubsystemKind::AtomMomentum: return "atom-momentum";
    case SubsystemKind::Cavity: return "cavity";
    case SubsystemKind::DetectorMode: return "detector-mode";
  }
  return "?";
}

SubsystemKind subsystem_kind_from_string(const std::string& s) {
  if (s == "atom-internal") return SubsystemKind::AtomInternal;
  if (s == "atom-momentum") return SubsystemKind::AtomMomentum;
  if (s == "cavity") return SubsystemKind::Cavity;
  if (s == "detector-mode") return SubsystemKind::DetectorMode;
  fail("unknown subsystem kind '" + s + "'");
}

int SubsystemSpec::label_index(const std::string& label) const {
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis[i] == label) return static_cast<int>(i);
  return -1;
}

SubsystemSpec atom_internal(const std::string& id) {
  return SubsystemSpec{id, SubsystemKind::AtomInternal, {"g", "e"}};
}

SubsystemSpec atom_momentum(const std::string& id, std::vector<std::string> labels) {
  return SubsystemSpec{id, SubsystemKind::AtomMomentum, std::move(labels)};
}

SubsystemSpec cavity_mode(const std::string& id, int n_max) {
  if (n_max < 1) fail("cavity needs n_max >= 1");
  std::vector<std::string> basis;
  for (int n = 0; n <= n_max; ++n) basis.push_back(std::to_string(n));
  return SubsystemSpec{id, SubsystemKind::Cavity, std::move(basis)};
}

SubsystemSpec detector_mode(const std::string& id) {
  return SubsystemSpec{id, SubsystemKind::DetectorMode, {"0", "1"}};
}

// --- KetState accessors ---------------------------------------------------------

double KetState::norm_squared() const { return map_norm_squared(amps_); }

int KetState::subsystem_index(const std::string& id) const {
  for (std::size_t i = 0; i < registry_.size(); ++i)
    if (registry_[i].id == id) return static_cast<int>(i);
  return -1;
}

bool KetState::has_subsystem(const std::string& id) const { return subsystem_index(id) >= 0; }

const SubsystemSpec& KetState::subsystem(const std::string& id) const {
  int i = subsystem_index(id);
  if (i < 0) fail("unknown subsystem '" + id + "'");
  return registry_[i];
}

const std::string& KetState::label_of(const ConfigKey& key, const std::string& id) const {
  int slot = subsystem_index(id);
  if (slot < 0) fail("unknown subsystem '" + id + "'");
  return registry_[slot].basis[key[slot]];
}

Complex KetState::amplitude(const Assignment& total_config) const {
  if (total_config.size() != registry_.size()) fail("amplitude: config must cover every subsystem");
  ConfigKey key(registry_.size());
  for (std::size_t i = 0; i < registry_.size(); ++i) {
    auto it = total_config.find(registry_[i].id);
    if (it == total_config.end()) fail("amplitude: missing subsystem '" + registry_[i].id + "'");
    int idx = registry_[i].label_index(it->second);
    if (idx < 0) fail("amplitude: unknown label '" + it->second + "'");
    key[i] = static_cast<std::uint8_t>(idx);
  }
  auto it = amps_.find(key);
  return it == amps_.end() ? Complex{0.0, 0.0} : it->second;
}

KetState KetState::with_global_phase(Complex unit_phase) const {
  auto amps = amps_;
  for (auto& [key, amp] : amps) amp *= unit_phase;
  return StateAccess::make(registry_, std::move(amps), post_selected_, branch_probability_);
}

KetState KetState::canonical_phase() const {
  if (amps_.empty()) return *this;
  const ConfigKey* first = nullptr;
  std::vector<std::string> best;
  for (const auto& [key, amp] : amps_) {
    auto labels = config_labels(registry_, key);
    if (!first || labels < best) {
      first = &key;
      best = std::move(labels);
    }
  }
  Complex a = amps_.at(*first);
  return with_global_phase(std::conj(a) / std::abs(a));
}

bool KetState::same_registry(const KetState& other) const { return registry_ == other.registry_; }

// --- construction ---------------------------------------------------------------

KetState make_state(std::vector<SubsystemSpec> registry,
                    const std::vector<std::pair<Assignment, Complex>>& terms,
                    bool normalize) {
  validate_registry(registry);
  if (terms.empty()) fail("make_state: no terms");

  std::map<ConfigKey, Complex> amps;
  for (const auto& [config, amp] : terms) {
    if (config.size() != registry.size())
      fail("make_state: config must assign a label to every subsystem");
    ConfigKey key(registry.size());
    for (std::size_t i = 0; i < registry.size(); ++i) {
      auto it = config.find(registry[i].id);
      if (it == config.end()) fail("make_state: missing subsystem '" + registry[i].id + "'");
      int idx = registry[i].label_index(it->second);
      if (idx < 0)
        fail("make_state: unknown label '" + it->second + "' for subsystem '" + registry[i].id + "'");
      key[i] = static_cast<std::uint8_t>(idx);
    }
    amps[key] += amp;
  }
  prune(amps);
  if (amps.empty()) fail("make_state: all amplitudes are zero");

  double n2 = map_norm_squared(amps);
  if (normalize) {
    double inv = 1.0 / std::sqrt(n2);
    for (auto& [key, amp] : amps) amp *= inv;
  } else if (std::abs(n2 - 1.0) > kNormTolerance) {
    fail("make_state: amplitudes not normalized (pass normalize=true)");
  }
  return StateAccess::make(std::move(registry), std::move(amps), false, 1.0);
}

KetState basis_state(std::vector<SubsystemSpec> registry, const Assignment& config) {
  return make_state(std::move(registry), {{config, Complex{1.0, 0.0}}}, false);
}

// --- tensor ----------------------------------------------------------------------

KetState tensor(const KetState& a, const KetState& b) {
  for (const auto& spec : b.registry())
    if (a.has_subsystem(spec.id)) fail("tensor: subsystem id collision '" + spec.id + "'");

  std::vector<SubsystemSpec> registry = a.registry();
  registry.insert(registry.end(), b.registry().begin(), b.registry().end());

  std::map<ConfigKey, Complex> amps;
  for (const auto& [ka, va] : a.amplitudes()) {
    for (const auto& [kb, vb] : b.amplitudes()) {
      ConfigKey key = ka;
      key.insert(key.end(), kb.begin(), kb.end());
      amps[key] = va * vb;
    }
  }
  prune(amps);
  return StateAccess::make(std::move(registry), std::move(amps),
                           a.post_selected() || b.post_selected(),
                           a.branch_probability() * b.branch_probability());
}

// --- local unitaries ---------------------------------------------------------------

KetState apply_local_unitary(const KetState& state, const std::vector<std::string>& targets,
                             const Eigen::MatrixXcd& u, bool allow_nonunitary) {
  if (targets.empty()) fail("apply_local_unitary: no targets");
  std::vector<int> slots;
  long dim = 1;
  for (const auto& id : targets) {
    int slot = state.subsystem_index(id);
    if (slot < 0) fail("apply_local_unitary: unknown subsystem '" + id + "'");
    if (std::find(slots.begin(), slots.end(), slot) != slots.end())
      fail("apply_local_unitary: duplicate target '" + id + "'");
    slots.push_back(slot);
    dim *= state.registry()[slot].dim();
  }
  if (u.rows() != dim || u.cols() != dim) fail("apply_local_unitary: dimension mismatch");
  if (!allow_nonunitary) {
    Eigen::MatrixXcd gram = u.adjoint() * u;
    gram -= Eigen::MatrixXcd::Identity(dim, dim);
    if (gram.cwiseAbs().maxCoeff() > kNormTolerance)
      fail("apply_local_unitary: matrix is not unitary within 1e-10");
  }

  // Group configurations by their labels outside the targets, apply u to
  // each group's dense column, scatter back.
  auto target_index = [&](const ConfigKey& key) {
    long idx = 0;
    for (int slot : slots) idx = idx * state.registry()[slot].dim() + key[slot];
    return idx;
  };

  std::map<ConfigKey, std::vector<std::pair<long, Complex>>> groups;
  for (const auto& [key, amp] : state.amplitudes()) {
    ConfigKey rest = key;
    for (int slot : slots) rest[slot] = 0;
    groups[rest].emplace_back(target_index(key), amp);
  }

  std::map<ConfigKey, Complex> out;
  for (const auto& [rest, entries] : groups) {
    Eigen::VectorXcd in = Eigen::VectorXcd::Zero(dim);
    for (const auto& [idx, amp] : entries) in[idx] += amp;
    Eigen::VectorXcd res = u * in;
    for (long idx = 0; idx < dim; ++idx) {
      if (std::abs(res[idx]) < kPruneThreshold) continue;
      ConfigKey key = rest;
      long rem = idx;
      for (std::size_t t = slots.size(); t-- > 0;) {
        int d = state.registry()[slots[t]].dim();
        key[slots[t]] = static_cast<std::uint8_t>(rem % d);
        rem /= d;
      }
      out[key] += res[idx];
    }
  }
  prune(out);
  return StateAccess::make(state.registry(), std::move(out), state.post_selected(),
                           state.branch_probability());
}

// --- projection ---------------------------------------------------------------------

ProjectionResult project_and_collapse(const KetState& state, const Assignment& partial) {
  std::vector<std::pair<int, std::uint8_t>> pins;
  for (const auto& [id, label] : partial) {
    int slot = state.subsystem_index(id);
    if (slot < 0) fail("project_and_collapse: unknown subsystem '" + id + "'");
    int idx = state.registry()[slot].label_index(label);
    if (idx < 0) fail("project_and_collapse: unknown label '" + label + "' for '" + id + "'");
    pins.emplace_back(slot, static_cast<std::uint8_t>(idx));
  }
  return project_subspace(state, [pins](const KetState&, const ConfigKey& key) {
    for (const auto& [slot, idx] : pins)
      if (key[slot] != idx) return false;
    return true;
  });
}

ProjectionResult project_subspace(
    const KetState& state,
    const std::function<bool(const KetState&, const ConfigKey&)>& keep) {
  std::map<ConfigKey, Complex> kept;
  double kept_n2 = 0.0;
  for (const auto& [key, amp] : state.amplitudes()) {
    if (keep(state, key)) {
      kept[key] = amp;
      kept_n2 += std::norm(amp);
    }
  }
  double total_n2 = state.norm_squared();
  if (kept.empty() || kept_n2 == 0.0) return ProjectionResult{0.0, std::nullopt};

  double probability = kept_n2 / total_n2;
  double inv = 1.0 / std::sqrt(kept_n2);
  for (auto& [key, amp] : kept) amp *= inv;
  KetState out = StateAccess::make(state.registry(), std::move(kept), true, probability);
  return ProjectionResult{probability, std::move(out)};
}

// --- dropping & tracing ------------------------------------------------------------

KetState drop_product_subsystem(const KetState& state, const std::string& id) {
  int slot = state.subsystem_index(id);
  if (slot < 0) fail("drop_product_subsystem: unknown subsystem '" + id + "'");
  const int d = state.registry()[slot].dim();

  // reduced density matrix of the candidate subsystem
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  std::map<ConfigKey, Eigen::VectorXcd> groups;
  for (const auto& [key, amp] : state.amplitudes()) {
    ConfigKey rest = key;
    rest.erase(rest.begin() + slot);
    auto [it, inserted] = groups.try_emplace(rest, Eigen::VectorXcd::Zero(d));
    it->second[key[slot]] += amp;
  }
  for (const auto& [rest, vec] : groups) rho += vec * vec.adjoint();

  double tr = rho.trace().real();
  double purity = (rho * rho).trace().real() / (tr * tr);
  if (purity < 1.0 - kNormTolerance)
    throw NonProductError("drop_product_subsystem: '" + id + "' is correlated with the rest (purity " +
                          std::to_string(purity) + "); measure or trace instead");

  // keep the dominant label's slice and rescale to the original norm
  int l0 = 0;
  for (int l = 1; l < d; ++l)
    if (rho(l, l).real() > rho(l0, l0).real()) l0 = l;

  std::map<ConfigKey, Complex> amps;
  double slice_n2 = 0.0;
  for (const auto& [key, amp] : state.amplitudes()) {
    if (key[slot] != l0) continue;
    ConfigKey rest = key;
    rest.erase(rest.begin() + slot);
    amps[rest] = amp;
    slice_n2 += std::norm(amp);
  }
  double scale = std::sqrt(state.norm_squared() / slice_n2);
  for (auto& [key, amp] : amps) amp *= scale;

  std::vector<SubsystemSpec> registry = state.registry();
  registry.erase(registry.begin() + slot);
  return StateAccess::make(std::move(registry), std::move(amps), state.post_selected(),
                           state.branch_probability());
}

DensityMatrix trace_out(const KetState& state, const std::vector<std::string>& drop_ids) {
  if (drop_ids.empty()) fail("trace_out: no subsystems to drop");
  std::vector<bool> dropped(state.registry().size(), false);
  for (const auto& id : drop_ids) {
    int slot = state.subsystem_index(id);
    if (slot < 0) fail("trace_out: unknown subsystem '" + id + "'");
    dropped[slot] = true;
  }

  std::vector<SubsystemSpec> kept;
  std::vector<int> kept_slots;
  long dim = 1;
  for (std::size_t i = 0; i < state.registry().size(); ++i) {
    if (!dropped[i]) {
      kept.push_back(state.registry()[i]);
      kept_slots.push_back(static_cast<int>(i));
      dim *= state.registry()[i].dim();
    }
  }

  auto kept_index = [&](const ConfigKey& key) {
    long idx = 0;
    for (int slot : kept_slots) idx = idx * state.registry()[slot].dim() + key[slot];
    return idx;
  };

  std::map<ConfigKey, std::vector<std::pair<long, Complex>>> groups;
  for (const auto& [key, amp] : state.amplitudes()) {
    ConfigKey dkey;
    for (std::size_t i = 0; i < key.size(); ++i)
      if (dropped[i]) dkey.push_back(key[i]);
    groups[dkey].emplace_back(kept_index(key), amp);
  }

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [dkey, entries] : groups)
    for (const auto& [i, a] : entries)
      for (const auto& [j, b] : entries) rho(i, j) += a * std::conj(b);

  return DensityMatrix{std::move(kept), std::move(rho)};
}

Eigen::MatrixXcd reduced_single(const KetState& state, const std::string& id) {
  std::vector<std::string> drop;
  for (const auto& spec : state.registry())
    if (spec.id != id) drop.push_back(spec.id);
  if (drop.empty()) fail("reduced_single: state has only '" + id + "'");
  return trace_out(state, drop).rho;
}

KetState rename_subsystems(const KetState& state,
                           const std::map<std::string, std::string>& id_map) {
  std::vector<SubsystemSpec> registry = state.registry();
  for (auto& spec : registry) {
    auto it = id_map.find(spec.id);
    if (it != id_map.end()) spec.id = it->second;
  }
  validate_registry(registry);
  return StateAccess::make(std::move(registry),
                           std::map<ConfigKey, Complex>(state.amplitudes()),
                           state.post_selected(), state.branch_probability());
}

// --- DensityMatrix -------------------------------------------------------------------

int DensityMatrix::config_index(const Assignment& config) const {
  long idx = 0;
  for (const auto& spec : kept) {
    auto it = config.find(spec.id);
    if (it == config.end()) fail("config_index: missing subsystem '" + spec.id + "'");
    int l = spec.label_index(it->second);
    if (l < 0) fail("config_index: unknown label '" + it->second + "'");
    idx = idx * spec.dim() + l;
  }
  return static_cast<int>(idx);
}

double DensityMatrix::trace() const { return rho.trace().real(); }

double DensityMatrix::purity() const {
  double tr = trace();
  return (rho * rho).trace().real() / (tr * tr);
}

// --- serialization -------------------------------------------------------------------

nlohmann::ordered_json state_to_json(const KetState& state) {
  nlohmann::ordered_json j;
  j["registry"] = nlohmann::ordered_json::array();
  for (const auto& spec : state.registry()) {
    nlohmann::ordered_json row;
    row["id"] = spec.id;
    row["kind"] = to_string(spec.kind);
    row["basis"] = spec.basis;
    j["registry"].push_back(std::move(row));
  }

  std::vector<std::pair<std::vector<std::string>, Complex>> rows;
  for (const auto& [key, amp] : state.amplitudes())
    rows.emplace_back(config_labels(state.registry(), key), amp);
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  j["amplitudes"] = nlohmann::ordered_json::array();
  for (const auto& [labels, amp] : rows) {
    nlohmann::ordered_json row;
    nlohmann::ordered_json config;
    for (std::size_t i = 0; i < labels.size(); ++i)
      config[state.registry()[i].id] = labels[i];
    row["config"] = std::move(config);
    row["re"] = amp.real();
    row["im"] = amp.imag();
    j["amplitudes"].push_back(std::move(row));
  }
  return j;
}

KetState state_from_json(const nlohmann::json& j, bool normalize) {
  if (!j.contains("registry") || !j.contains("amplitudes"))
    fail("state literal needs 'registry' and 'amplitudes'");
  std::vector<SubsystemSpec> registry;
  for (const auto& row : j.at("registry")) {
    SubsystemSpec spec;
    spec.id = row.at("id").get<std::string>();
    spec.kind = subsystem_kind_from_string(row.at("kind").get<std::string>());
    spec.basis = row.at("basis").get<std::vector<std::string>>();
    registry.push_back(std::move(spec));
  }
  std::vector<std::pair<Assignment, Complex>> terms;
  for (const auto& row : j.at("amplitudes")) {
    Assignment config;
    for (const auto& [id, label] : row.at("config").items())
      config[id] = label.get<std::string>();
    terms.emplace_back(std::move(config),
                       Complex{row.at("re").get<double>(), row.at("im").get<double>()});
  }
  return make_state(std::move(registry), terms, normalize);
}

}  // namespace protosim
