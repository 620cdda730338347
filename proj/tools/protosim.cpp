// protosim — protocol-script runner, parameter sweeps, and closed-form vs
// ODE-oracle validation.
//
// Exit codes: 0 ok, 1 expect failure, 2 usage/parse error, 3 runtime error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "protosim/dsl.hpp"
#include "protosim/errors.hpp"
#include "protosim/params.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string dir_of(const std::string& path) {
  std::size_t slash = path.find_last_of('/');
  return slash == std::string::npos ? std::string(".") : path.substr(0, slash);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << content;
}

int cmd_run(const std::string& script_path, const std::string& params_name, bool trace,
            const std::string& json_out, long long seed) {
  protosim::dsl::ProtocolScript script;
  try {
    script = protosim::dsl::parse_script(read_file(script_path));
  } catch (const protosim::dsl::ParseError& e) {
    std::cerr << script_path << ": " << e.what() << "\n";
    return 2;
  }

  protosim::dsl::RunFlags flags;
  flags.trace = trace;
  flags.script_dir = dir_of(script_path);
  if (!params_name.empty()) flags.initial_params = params_name;
  if (seed >= 0) flags.seed = static_cast<std::uint64_t>(seed);

  protosim::dsl::RunReport report = protosim::dsl::run(script, flags);
  if (!json_out.empty()) write_file(json_out, report.json.dump(2) + "\n");

  for (const auto& e : report.json["expects"]) {
    std::cout << "  [line " << e["line"].get<int>() << "] expect " << e["kind"].get<std::string>()
              << ": measured " << e["measured"].get<double>() << " vs "
              << e["required"].get<double>() << "  "
              << (e["passed"].get<bool>() ? "PASS" : "FAIL") << "\n";
  }
  std::cout << (report.expects_passed ? "passed" : "FAILED") << " (" << script.steps.size()
            << " steps, hash " << script.source_hash << ", " << report.wall_seconds << " s)\n";
  return report.expects_passed ? 0 : 1;
}

int cmd_sweep(const std::string& script_path, const std::string& var, const std::string& grid_csv,
              const std::string& csv_out, int l_max, double tol) {
  std::string text = read_file(script_path);
  std::vector<std::string> grid;
  std::string cur;
  for (char c : grid_csv) {
    if (c == ',') {
      grid.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) grid.push_back(cur);

  protosim::dsl::RunFlags flags;
  flags.script_dir = dir_of(script_path);
  protosim::dsl::SweepResult result;
  try {
    result = protosim::dsl::sweep(text, var, grid, flags, l_max, tol);
  } catch (const protosim::dsl::ParseError& e) {
    std::cerr << script_path << ": " << e.what() << "\n";
    return 2;
  }
  if (csv_out.empty())
    std::cout << result.csv;
  else
    write_file(csv_out, result.csv);
  return result.expects_passed ? 0 : 1;
}

int cmd_validate(const std::string& preset_name, int l_max, double tol,
                 const std::string& csv_out) {
  protosim::ParamPreset preset = protosim::resolve_preset(preset_name);
  protosim::BraggDiagnostics diag =
      protosim::validate_bragg_regime(preset.params, preset.cavity_lifetime);
  std::cout << "preset " << preset.name << ": delta/omega_r = " << diag.ratio
            << ", interaction time = " << diag.interaction_time << " s";
  if (diag.cavity_lifetime) std::cout << ", cavity lifetime = " << *diag.cavity_lifetime << " s";
  std::cout << ", status " << protosim::to_string(diag.status) << "\n";

  std::string csv = protosim::dsl::validate_csv(preset, l_max, tol);
  if (csv_out.empty())
    std::cout << csv;
  else
    write_file(csv_out, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyperentanglement protocol simulator"};
  app.require_subcommand(1);

  std::string script_path, params_name, json_out, var, grid_csv, csv_out, preset_name;
  bool trace = false;
  int l_max = 6;
  double tol = 1e-6;
  long long seed = -1;

  CLI::App* run_cmd = app.add_subcommand("run", "execute a protocol script");
  run_cmd->add_option("script", script_path, "script file")->required();
  run_cmd->add_option("--params", params_name, "preset name or .preset file");
  run_cmd->add_flag("--trace", trace, "include per-step state snapshots in the report");
  run_cmd->add_option("--json", json_out, "write the run report to this file");
  run_cmd->add_option("--seed", seed,
                      "sample (and collapse) enumerating measurements with this seed");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a script template over a grid");
  sweep_cmd->add_option("script", script_path, "script template file")->required();
  sweep_cmd->add_option("--var", var, "template variable name")->required();
  sweep_cmd->add_option("--grid", grid_csv, "comma-separated grid values")->required();
  sweep_cmd->add_option("--csv", csv_out, "write the sweep CSV to this file");
  sweep_cmd->add_option("--lmax", l_max, "ladder truncation for the oracle");
  sweep_cmd->add_option("--tol", tol, "oracle refinement tolerance");

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "closed form vs ODE oracle at standard ratios");
  validate_cmd->add_option("--preset", preset_name, "preset name or .preset file")->required();
  validate_cmd->add_option("--lmax", l_max, "ladder truncation for the oracle");
  validate_cmd->add_option("--tol", tol, "oracle refinement tolerance");
  validate_cmd->add_option("--csv", csv_out, "write the validation CSV to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(script_path, params_name, trace, json_out, seed);
    if (sweep_cmd->parsed()) return cmd_sweep(script_path, var, grid_csv, csv_out, l_max, tol);
    if (validate_cmd->parsed()) return cmd_validate(preset_name, l_max, tol, csv_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
