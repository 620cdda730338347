#include "protosim/dsl.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <random>
#include <set>
#include <sstream>

#include "protosim/errors.hpp"
#include "protosim/metrics.hpp"

namespace protosim::dsl {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

// strips a '#' comment unless the hash sits inside a JSON literal
std::string strip_comment(const std::string& line) {
  int depth = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '{' || line[i] == '[') ++depth;
    if (line[i] == '}' || line[i] == ']') --depth;
    if (line[i] == '#' && depth == 0) return line.substr(0, i);
  }
  return line;
}

double parse_number(int line, const std::string& tok) {
  try {
    std::size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "expected a number, got '" + tok + "'");
  }
}

// angles accept plain numbers plus the forms pi, -pi, pi/N, -pi/N
double parse_angle(int line, const std::string& tok) {
  if (tok == "pi") return M_PI;
  if (tok == "-pi") return -M_PI;
  if (tok.rfind("pi/", 0) == 0) return M_PI / parse_number(line, tok.substr(3));
  if (tok.rfind("-pi/", 0) == 0) return -M_PI / parse_number(line, tok.substr(4));
  return parse_number(line, tok);
}

DriveSign parse_sign(int line, const std::string& tok) {
  if (tok == "plus") return DriveSign::Plus;
  if (tok == "minus") return DriveSign::Minus;
  throw ParseError(line, "drive sign must be 'plus' or 'minus', got '" + tok + "'");
}

std::vector<std::string> split_csv(const std::string& tok) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : tok) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// static id tracking so undefined-id mistakes surface at parse time
struct IdTable {
  std::set<std::string> ids;

  void declare(int line, const std::string& id) {
    if (!ids.insert(id).second) throw ParseError(line, "id '" + id + "' already defined");
  }
  void require(int line, const std::string& id) const {
    if (!ids.count(id)) throw ParseError(line, "undefined id '" + id + "'");
  }
  void require_atom(int line, const std::string& name) const {
    require(line, name + ".int");
    require(line, name + ".mom");
  }
  void remove(int line, const std::string& id) {
    require(line, id);
    ids.erase(id);
  }
};

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

// --- parsing -----------------------------------------------------------------

ProtocolScript parse_script(const std::string& text) {
  ProtocolScript script;
  script.source_hash = fnv1a_hex(text);
  IdTable table;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = strip_comment(raw);
    std::vector<std::string> t = tokenize(line);
    if (t.empty()) continue;
    const std::string& kw = t[0];

    auto arity = [&](std::size_t n) {
      if (t.size() != n)
        throw ParseError(lineno, "'" + kw + "' expects " + std::to_string(n - 1) + " arguments");
    };

    if (kw == "params") {
      if (t.size() < 2) throw ParseError(lineno, "'params' expects a preset name or file");
      ParamsStep step;
      step.preset = t[1];
      for (std::size_t i = 2; i < t.size(); ++i) {
        std::size_t eq = t[i].find('=');
        if (eq == std::string::npos)
          throw ParseError(lineno, "override must be key=value, got '" + t[i] + "'");
        step.overrides.emplace_back(t[i].substr(0, eq), t[i].substr(eq + 1));
      }
      script.steps.emplace_back(std::move(step));
    } else if (kw == "cavity") {
      CavityStep step;
      if (t.size() == 3 && t[2] == "superpos") {
        step.id = t[1];
      } else if (t.size() == 4 && t[2] == "fock") {
        step.id = t[1];
        step.superposed = false;
        step.fock = static_cast<int>(parse_number(lineno, t[3]));
        if (step.fock < 0 || step.fock > 1)
          throw ParseError(lineno, "cavity Fock label must be 0 or 1");
      } else {
        throw ParseError(lineno, "usage: cavity <id> superpos | cavity <id> fock <n>");
      }
      table.declare(lineno, step.id);
      script.steps.emplace_back(std::move(step));
    } else if (kw == "atom") {
      arity(4);
      AtomStep step{t[1], t[2], t[3]};
      table.declare(lineno, step.name + ".int");
      table.declare(lineno, step.name + ".mom");
      script.steps.emplace_back(std::move(step));
    } else if (kw == "bragg") {
      BraggStep step;
      if (t.size() == 4) {
        step.atom = t[1];
        step.cavity_ground = t[2];
        if (t[3] != "auto") step.duration = parse_number(lineno, t[3]);
      } else if (t.size() == 5) {
        step.atom = t[1];
        step.cavity_ground = t[2];
        step.cavity_excited = t[3];
        if (t[4] != "auto") step.duration = parse_number(lineno, t[4]);
      } else {
        throw ParseError(lineno, "usage: bragg <atom> <cavity> [<cavity-excited>] <dur|auto>");
      }
      table.require_atom(lineno, step.atom);
      table.require(lineno, step.cavity_ground);
      if (step.cavity_excited) table.require(lineno, *step.cavity_excited);
      script.steps.emplace_back(std::move(step));
    } else if (kw == "pulse") {
      arity(6);
      PulseStep step;
      step.atom = t[1];
      step.arm = t[2];
      step.theta = parse_angle(lineno, t[3]);
      step.phi = parse_angle(lineno, t[4]);
      step.sign = parse_sign(lineno, t[5]);
      table.require_atom(lineno, step.atom);
      script.steps.emplace_back(std::move(step));
    } else if (kw == "ramsey") {
      arity(2);
      table.require(lineno, t[1] + ".int");
      script.steps.emplace_back(RamseyStep{t[1]});
    } else if (kw == "hadamard-momentum") {
      arity(2);
      table.require(lineno, t[1] + ".mom");
      script.steps.emplace_back(HadamardMomentumStep{t[1]});
    } else if (kw == "aux") {
      arity(5);
      AuxStep step;
      step.atom = t[1];
      step.cavity = t[2];
      if (t[3] != "auto") step.duration = parse_number(lineno, t[3]);
      step.outcome = t[4];
      if (step.outcome != "g" && step.outcome != "e")
        throw ParseError(lineno, "aux outcome must be g or e");
      table.require(lineno, step.cavity);
      script.steps.emplace_back(std::move(step));
    } else if (kw == "splitter") {
      arity(5);
      SplitterStep step{t[1], t[2], t[3], t[4]};
      table.remove(lineno, step.in0);
      table.remove(lineno, step.in1);
      table.declare(lineno, step.out2);
      table.declare(lineno, step.out3);
      script.steps.emplace_back(std::move(step));
    } else if (kw == "postselect") {
      if (t.size() < 3 || t[1] != "onephoton")
        throw ParseError(lineno, "usage: postselect onephoton <mode>...");
      PostselectOnePhotonStep step;
      for (std::size_t i = 2; i < t.size(); ++i) {
        table.require(lineno, t[i]);
        step.modes.push_back(t[i]);
      }
      script.steps.emplace_back(std::move(step));
    } else if (kw == "detect") {
      if (t.size() < 2) throw ParseError(lineno, "'detect' expects mode ids");
      DetectStep step;
      for (std::size_t i = 1; i < t.size(); ++i) {
        if (t[i] == "keep") {
          if (i + 1 != t.size() - 1) throw ParseError(lineno, "'keep' expects one mode");
          step.keep = t[i + 1];
          break;
        }
        table.require(lineno, t[i]);
        step.modes.push_back(t[i]);
      }
      if (step.modes.empty()) throw ParseError(lineno, "'detect' expects mode ids");
      if (step.keep) {
        if (std::find(step.modes.begin(), step.modes.end(), *step.keep) == step.modes.end())
          throw ParseError(lineno, "'keep' mode must be one of the detected modes");
        for (const auto& id : step.modes) table.remove(lineno, id);
      }
      script.steps.emplace_back(std::move(step));
    } else if (kw == "measure") {
      if (t.size() < 2) throw ParseError(lineno, "'measure' expects arguments");
      MeasureStep step;
      if (t.back() == "enumerate") {
        step.enumerate = true;
        for (std::size_t i = 1; i + 1 < t.size(); ++i) {
          table.require(lineno, t[i]);
          step.subsystems.push_back(t[i]);
        }
        if (step.subsystems.empty()) throw ParseError(lineno, "'measure ... enumerate' needs ids");
      } else {
        for (std::size_t i = 1; i < t.size(); ++i) {
          std::size_t eq = t[i].find('=');
          if (eq == std::string::npos)
            throw ParseError(lineno, "measure outcome must be id=label, got '" + t[i] + "'");
          std::string id = t[i].substr(0, eq);
          table.require(lineno, id);
          step.outcome[id] = t[i].substr(eq + 1);
        }
      }
      script.steps.emplace_back(std::move(step));
    } else if (kw == "drop") {
      arity(2);
      table.remove(lineno, t[1]);
      script.steps.emplace_back(DropStep{t[1]});
    } else if (kw == "expect") {
      if (t.size() < 2) throw ParseError(lineno, "'expect' needs fidelity or entropy");
      if (t[1] == "fidelity") {
        if (t.size() < 4) throw ParseError(lineno, "usage: expect fidelity <literal> <threshold>");
        ExpectFidelityStep step;
        step.threshold = parse_number(lineno, t.back());
        // the literal is the raw text between 'fidelity' and the final
        // whitespace-separated threshold token (it may contain spaces)
        std::string body = line;
        while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back())))
          body.pop_back();
        const std::size_t last_ws = body.find_last_of(" \t");
        const std::size_t start = line.find("fidelity") + 8;
        if (last_ws == std::string::npos || last_ws <= start)
          throw ParseError(lineno, "usage: expect fidelity <literal> <threshold>");
        std::string literal = body.substr(start, last_ws - start);
        while (!literal.empty() && std::isspace(static_cast<unsigned char>(literal.front())))
          literal.erase(literal.begin());
        while (!literal.empty() && std::isspace(static_cast<unsigned char>(literal.back())))
          literal.pop_back();
        if (literal.empty()) throw ParseError(lineno, "empty state literal");
        if (literal[0] == '@') {
          step.literal_source = literal;
        } else {
          try {
            step.literal_source = nlohmann::json::parse(literal).dump();
          } catch (const nlohmann::json::exception& e) {
            throw ParseError(lineno, std::string("malformed state literal: ") + e.what());
          }
        }
        script.steps.emplace_back(std::move(step));
      } else if (t[1] == "entropy") {
        arity(5);
        ExpectEntropyStep step;
        step.side = split_csv(t[2]);
        for (const auto& id : step.side) table.require(lineno, id);
        step.value = parse_number(lineno, t[3]);
        step.tolerance = parse_number(lineno, t[4]);
        script.steps.emplace_back(std::move(step));
      } else {
        throw ParseError(lineno, "unknown expect kind '" + t[1] + "'");
      }
    } else {
      throw ParseError(lineno, "unknown keyword '" + kw + "'");
    }
    script.lines.push_back(lineno);
  }
  return script;
}

// --- serialization --------------------------------------------------------------

namespace {

struct StepPrinter {
  std::ostringstream& out;

  void operator()(const ParamsStep& s) {
    out << "params " << s.preset;
    for (const auto& [k, v] : s.overrides) out << " " << k << "=" << v;
  }
  void operator()(const CavityStep& s) {
    out << "cavity " << s.id;
    if (s.superposed)
      out << " superpos";
    else
      out << " fock " << s.fock;
  }
  void operator()(const AtomStep& s) {
    out << "atom " << s.name << " " << s.internal << " " << s.momentum;
  }
  void operator()(const BraggStep& s) {
    out << "bragg " << s.atom << " " << s.cavity_ground;
    if (s.cavity_excited) out << " " << *s.cavity_excited;
    out << " " << (s.duration ? fmt17(*s.duration) : "auto");
  }
  void operator()(const PulseStep& s) {
    out << "pulse " << s.atom << " " << s.arm << " " << fmt17(s.theta) << " " << fmt17(s.phi)
        << " " << (s.sign == DriveSign::Plus ? "plus" : "minus");
  }
  void operator()(const RamseyStep& s) { out << "ramsey " << s.atom; }
  void operator()(const HadamardMomentumStep& s) { out << "hadamard-momentum " << s.atom; }
  void operator()(const AuxStep& s) {
    out << "aux " << s.atom << " " << s.cavity << " "
        << (s.duration ? fmt17(*s.duration) : "auto") << " " << s.outcome;
  }
  void operator()(const SplitterStep& s) {
    out << "splitter " << s.in0 << " " << s.in1 << " " << s.out2 << " " << s.out3;
  }
  void operator()(const PostselectOnePhotonStep& s) {
    out << "postselect onephoton";
    for (const auto& m : s.modes) out << " " << m;
  }
  void operator()(const DetectStep& s) {
    out << "detect";
    for (const auto& m : s.modes) out << " " << m;
    if (s.keep) out << " keep " << *s.keep;
  }
  void operator()(const MeasureStep& s) {
    out << "measure";
    if (s.enumerate) {
      for (const auto& id : s.subsystems) out << " " << id;
      out << " enumerate";
    } else {
      for (const auto& [id, label] : s.outcome) out << " " << id << "=" << label;
    }
  }
  void operator()(const DropStep& s) { out << "drop " << s.id; }
  void operator()(const ExpectFidelityStep& s) {
    out << "expect fidelity " << s.literal_source << " " << fmt17(s.threshold);
  }
  void operator()(const ExpectEntropyStep& s) {
    out << "expect entropy ";
    for (std::size_t i = 0; i < s.side.size(); ++i) out << (i ? "," : "") << s.side[i];
    out << " " << fmt17(s.value) << " " << fmt17(s.tolerance);
  }
};

}  // namespace

std::string serialize_script(const ProtocolScript& script) {
  std::ostringstream out;
  for (const auto& step : script.steps) {
    StepPrinter printer{out};
    std::visit(printer, step);
    out << "\n";
  }
  return out.str();
}

// --- running ---------------------------------------------------------------------

namespace {

struct Runner {
  const RunFlags& flags;
  std::optional<ParamPreset> preset;
  KetState state;
  bool has_state = false;
  nlohmann::ordered_json steps_json = nlohmann::ordered_json::array();
  nlohmann::ordered_json expects_json = nlohmann::ordered_json::array();
  bool expects_ok = true;
  int line = 0;
  std::optional<std::mt19937_64> rng;

  explicit Runner(const RunFlags& f) : flags(f) {
    if (f.initial_params) preset = resolve_preset(*f.initial_params);
    if (f.seed) rng.emplace(*f.seed);
  }

  // portable 53-bit uniform draw; std distributions are implementation-defined
  double draw() { return static_cast<double>((*rng)() >> 11) * 0x1.0p-53; }

  // index into a probability list, cumulative walk
  std::size_t sample_index(const std::vector<double>& probs) {
    const double u = draw();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    return probs.size() - 1;
  }

  [[noreturn]] void die(const std::string& msg) const {
    throw SimError("line " + std::to_string(line) + ": " + msg);
  }

  const PhysicalParams& params() const {
    if (!preset) throw SimError("line " + std::to_string(line) + ": no parameters set");
    return preset->params;
  }

  void attach(const KetState& piece) {
    state = has_state ? tensor(state, piece) : piece;
    has_state = true;
  }

  nlohmann::ordered_json& begin(const std::string& kind) {
    nlohmann::ordered_json row;
    row["line"] = line;
    row["kind"] = kind;
    steps_json.push_back(std::move(row));
    return steps_json.back();
  }

  void snapshot(nlohmann::ordered_json& row) {
    if (flags.trace && has_state) row["state"] = state_to_json(state.canonical_phase());
  }

  // --- step handlers ---

  void operator()(const ParamsStep& s) {
    auto& row = begin("params");
    preset = resolve_preset(s.preset);
    for (const auto& [k, v] : s.overrides) apply_override(*preset, k, v);
    row["preset"] = preset->name;
    row["mu"] = preset->params.mu;
    row["delta"] = preset->params.delta;
    row["omega"] = preset->params.omega;
    row["k"] = preset->params.k;
    row["mass"] = preset->params.mass;
  }

  void operator()(const CavityStep& s) {
    auto& row = begin("cavity");
    row["id"] = s.id;
    if (s.superposed) {
      const double a = 1.0 / std::sqrt(2.0);
      attach(make_state({cavity_mode(s.id)},
                        {{{{s.id, "0"}}, {a, 0.0}}, {{{s.id, "1"}}, {a, 0.0}}}, false));
    } else {
      attach(basis_state({cavity_mode(s.id)}, {{s.id, std::to_string(s.fock)}}));
    }
    snapshot(row);
  }

  void operator()(const AtomStep& s) {
    auto& row = begin("atom");
    row["id"] = s.name;
    attach(basis_state({atom_internal(s.name + ".int"), atom_momentum(s.name + ".mom")},
                       {{s.name + ".int", s.internal}, {s.name + ".mom", s.momentum}}));
    snapshot(row);
  }

  void operator()(const BraggStep& s) {
    auto& row = begin("bragg");
    row["atom"] = s.atom;
    const double t = s.duration ? *s.duration : params().bragg_time();
    row["duration"] = t;
    std::vector<std::string> warnings;
    if (s.cavity_excited) {
      state = bragg_closed_form(state, s.atom + ".int", s.atom + ".mom", s.cavity_ground,
                                params(), t, BraggSectors::GroundOnly, &warnings);
      state = bragg_closed_form(state, s.atom + ".int", s.atom + ".mom", *s.cavity_excited,
                                params(), t, BraggSectors::ExcitedOnly, &warnings);
    } else {
      state = bragg_closed_form(state, s.atom + ".int", s.atom + ".mom", s.cavity_ground,
                                params(), t, BraggSectors::Both, &warnings);
    }
    if (!warnings.empty()) row["warnings"] = warnings;
    snapshot(row);
  }

  void operator()(const PulseStep& s) {
    auto& row = begin("pulse");
    row["atom"] = s.atom;
    row["arm"] = s.arm;
    state = classical_pulse(state, s.atom + ".int", s.atom + ".mom",
                            PulseSpec{s.theta, s.phi, s.arm, s.sign});
    snapshot(row);
  }

  void operator()(const RamseyStep& s) {
    auto& row = begin("ramsey");
    row["atom"] = s.atom;
    state = ramsey_zone(state, s.atom + ".int");
    snapshot(row);
  }

  void operator()(const HadamardMomentumStep& s) {
    auto& row = begin("hadamard-momentum");
    row["atom"] = s.atom;
    state = momentum_hadamard(state, s.atom + ".mom");
    snapshot(row);
  }

  void operator()(const AuxStep& s) {
    auto& row = begin("aux");
    row["atom"] = s.atom;
    row["cavity"] = s.cavity;
    row["outcome"] = s.outcome;
    const std::string aux_int = s.atom + ".int";
    const double t = s.duration ? *s.duration : params().aux_readout_time();
    attach(basis_state({atom_internal(aux_int)}, {{aux_int, "g"}}));
    state = jc_resonant(state, aux_int, s.cavity, params(), t);
    state = ramsey_zone(state, aux_int);
    auto res = project_and_collapse(state, {{aux_int, s.outcome}});
    if (res.impossible()) die("auxiliary outcome '" + s.outcome + "' has zero probability");
    state = drop_product_subsystem(*res.state, aux_int);
    row["probability"] = res.probability;
    snapshot(row);
  }

  void operator()(const SplitterStep& s) {
    auto& row = begin("splitter");
    state = beam_splitter(state, s.in0, s.in1, s.out2, s.out3);
    snapshot(row);
  }

  void operator()(const PostselectOnePhotonStep& s) {
    auto& row = begin("postselect-onephoton");
    std::vector<int> slots;
    for (const auto& id : s.modes) {
      if (!state.has_subsystem(id)) die("unknown mode '" + id + "'");
      slots.push_back(state.subsystem_index(id));
    }
    auto res = project_subspace(state, [&](const KetState& st, const ConfigKey& key) {
      int photons = 0;
      for (std::size_t i = 0; i < s.modes.size(); ++i)
        photons += std::stoi(st.registry()[slots[i]].basis[key[slots[i]]]);
      return photons == 1;
    });
    if (res.impossible()) die("no single-photon component to keep");
    state = *res.state;
    row["probability"] = res.probability;
    snapshot(row);
  }

  void operator()(const DetectStep& s) {
    auto& row = begin("detect");
    auto outcomes = detect_photons(state, s.modes);
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    for (const auto& o : outcomes) {
      nlohmann::ordered_json entry;
      entry["outcome"] = o.label;
      entry["probability"] = o.probability;
      entry["failure"] = o.failure;
      table.push_back(std::move(entry));
    }
    row["outcomes"] = std::move(table);
    if (s.keep) {
      const DetectionOutcome* chosen = nullptr;
      for (const auto& o : outcomes) {
        int total = 0;
        bool at_keep = false;
        for (std::size_t i = 0; i < s.modes.size(); ++i) {
          total += o.counts[i];
          if (s.modes[i] == *s.keep && o.counts[i] == 1) at_keep = true;
        }
        if (total == 1 && at_keep) chosen = &o;
      }
      if (!chosen) die("no single-photon outcome at '" + *s.keep + "'");
      state = chosen->state;
      row["kept"] = chosen->label;
      row["probability"] = chosen->probability;
    } else if (rng) {
      std::vector<double> probs;
      for (const auto& o : outcomes) probs.push_back(o.probability);
      const DetectionOutcome& chosen = outcomes[sample_index(probs)];
      state = chosen.state;
      row["sampled"] = chosen.label;
      row["probability"] = chosen.probability;
    }
    snapshot(row);
  }

  void operator()(const MeasureStep& s) {
    auto& row = begin("measure");
    if (s.enumerate) {
      // all label combinations of the listed subsystems, basis order
      std::vector<const SubsystemSpec*> specs;
      for (const auto& id : s.subsystems) specs.push_back(&state.subsystem(id));
      std::vector<int> idx(specs.size(), 0);
      nlohmann::ordered_json table = nlohmann::ordered_json::array();
      std::vector<double> probs;
      std::vector<ProjectionResult> branches;
      std::vector<std::string> labels;
      while (true) {
        Assignment outcome;
        std::string label;
        for (std::size_t i = 0; i < specs.size(); ++i) {
          outcome[specs[i]->id] = specs[i]->basis[idx[i]];
          if (!label.empty()) label += " ";
          label += specs[i]->id + "=" + specs[i]->basis[idx[i]];
        }
        auto res = project_and_collapse(state, outcome);
        nlohmann::ordered_json entry;
        entry["outcome"] = label;
        entry["probability"] = res.probability;
        if (flags.trace && !res.impossible())
          entry["state"] = state_to_json(res.state->canonical_phase());
        table.push_back(std::move(entry));
        probs.push_back(res.probability);
        labels.push_back(std::move(label));
        branches.push_back(std::move(res));

        int pos = static_cast<int>(specs.size()) - 1;
        while (pos >= 0) {
          if (++idx[pos] < specs[pos]->dim()) break;
          idx[pos] = 0;
          --pos;
        }
        if (pos < 0) break;
      }
      row["outcomes"] = std::move(table);
      if (rng) {
        const std::size_t pick = sample_index(probs);
        state = *branches[pick].state;
        row["sampled"] = labels[pick];
        row["probability"] = probs[pick];
      }
    } else {
      auto res = project_and_collapse(state, s.outcome);
      if (res.impossible()) die("measurement outcome has zero probability");
      state = *res.state;
      row["probability"] = res.probability;
      snapshot(row);
    }
  }

  void operator()(const DropStep& s) {
    auto& row = begin("drop");
    row["id"] = s.id;
    state = drop_product_subsystem(state, s.id);
    snapshot(row);
  }

  void operator()(const ExpectFidelityStep& s) {
    auto& row = begin("expect-fidelity");
    nlohmann::json literal_json;
    if (!s.literal_source.empty() && s.literal_source[0] == '@') {
      std::string path = s.literal_source.substr(1);
      if (!flags.script_dir.empty() && path[0] != '/') path = flags.script_dir + "/" + path;
      std::ifstream in(path);
      if (!in) die("cannot open state literal '" + path + "'");
      in >> literal_json;
    } else {
      literal_json = nlohmann::json::parse(s.literal_source);
    }
    KetState target = state_from_json(literal_json, /*normalize=*/true);
    OverlapReport r = fidelity_report(state, target);
    const bool passed = !r.basis_mismatch && r.fidelity >= s.threshold;
    row["fidelity"] = r.fidelity;
    row["phase"] = r.phase;
    row["basis_mismatch"] = r.basis_mismatch;
    row["threshold"] = s.threshold;
    row["passed"] = passed;
    nlohmann::ordered_json entry;
    entry["line"] = line;
    entry["kind"] = "fidelity";
    entry["measured"] = r.fidelity;
    entry["required"] = s.threshold;
    entry["passed"] = passed;
    expects_json.push_back(std::move(entry));
    expects_ok = expects_ok && passed;
  }

  void operator()(const ExpectEntropyStep& s) {
    auto& row = begin("expect-entropy");
    const double measured = entanglement_entropy(state, s.side);
    const bool passed = std::abs(measured - s.value) <= s.tolerance;
    row["entropy"] = measured;
    row["value"] = s.value;
    row["tolerance"] = s.tolerance;
    row["passed"] = passed;
    nlohmann::ordered_json entry;
    entry["line"] = line;
    entry["kind"] = "entropy";
    entry["measured"] = measured;
    entry["required"] = s.value;
    entry["passed"] = passed;
    expects_json.push_back(std::move(entry));
    expects_ok = expects_ok && passed;
  }
};

}  // namespace

RunReport run(const ProtocolScript& script, const RunFlags& flags) {
  const auto t0 = std::chrono::steady_clock::now();
  Runner runner(flags);
  for (std::size_t i = 0; i < script.steps.size(); ++i) {
    runner.line = script.lines[i];
    try {
      std::visit(runner, script.steps[i]);
    } catch (const ParseError&) {
      throw;
    } catch (const SimError&) {
      throw;
    } catch (const std::exception& e) {
      throw SimError("line " + std::to_string(runner.line) + ": " + e.what());
    }
  }

  RunReport report;
  report.json["script_hash"] = script.source_hash;
  if (runner.preset) {
    nlohmann::ordered_json p;
    p["preset"] = runner.preset->name;
    p["mu"] = runner.preset->params.mu;
    p["delta"] = runner.preset->params.delta;
    p["omega"] = runner.preset->params.omega;
    p["k"] = runner.preset->params.k;
    p["mass"] = runner.preset->params.mass;
    report.json["params"] = std::move(p);
  }
  report.json["steps"] = std::move(runner.steps_json);
  report.json["expects"] = std::move(runner.expects_json);
  report.json["passed"] = runner.expects_ok;
  report.expects_passed = runner.expects_ok;
  report.params = runner.preset;
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

// --- sweeping -----------------------------------------------------------------------

namespace {

std::string substitute(const std::string& text, const std::string& var, const std::string& value) {
  const std::string needle = "${" + var + "}";
  std::string out = text;
  std::size_t pos = 0;
  while ((pos = out.find(needle, pos)) != std::string::npos) {
    out.replace(pos, needle.size(), value);
    pos += value.size();
  }
  return out;
}

std::string csv_header() { return "delta_over_omega_r,beta_t,infidelity,norm_drift,leakage\n"; }

std::string csv_row(const AdiabaticityPoint& p) {
  return fmt12(p.delta_over_omega_r) + "," + fmt12(p.beta_t) + "," + fmt12(p.infidelity) + "," +
         fmt12(p.norm_drift) + "," + fmt12(p.leakage) + "\n";
}

}  // namespace

SweepResult sweep(const std::string& script_template, const std::string& var,
                  const std::vector<std::string>& grid, const RunFlags& flags, int l_max,
                  double tol) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
  if (script_template.find("${" + var + "}") == std::string::npos)
    throw std::invalid_argument("sweep: variable '" + var + "' does not appear in the template");

  struct Point {
    AdiabaticityPoint adiabaticity;
    bool expects_passed;
  };
  std::vector<std::future<Point>> workers;
  for (const auto& value : grid) {
    workers.push_back(std::async(std::launch::async, [&, value]() {
      ProtocolScript script = parse_script(substitute(script_template, var, value));
      RunReport report = run(script, flags);
      if (!report.params)
        throw SimError("sweep: run for '" + value + "' sets no parameters");
      const PhysicalParams& p = report.params->params;
      AdiabaticityPoint point =
          validate_adiabaticity(p, p.delta / p.omega_r(), l_max, tol);
      return Point{point, report.expects_passed};
    }));
  }

  SweepResult result;
  result.csv = csv_header();
  for (auto& w : workers) {
    Point point = w.get();
    result.csv += csv_row(point.adiabaticity);
    result.expects_passed = result.expects_passed && point.expects_passed;
  }
  return result;
}

std::string validate_csv(const ParamPreset& preset, int l_max, double tol) {
  const double preset_ratio = preset.params.delta / preset.params.omega_r();
  std::vector<double> ratios = {1e2, 1e3, 1e4, preset_ratio};
  std::vector<std::future<AdiabaticityPoint>> workers;
  for (double ratio : ratios)
    workers.push_back(std::async(std::launch::async, [&, ratio]() {
      return validate_adiabaticity(preset.params, ratio, l_max, tol);
    }));
  std::string csv = csv_header();
  for (auto& w : workers) csv += csv_row(w.get());
  return csv;
}

}  // namespace protosim::dsl
