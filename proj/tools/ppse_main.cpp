#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ppse/report.hpp"
#include "ppse/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitScenarioError = 1;
constexpr int kExitUsage = 2;

struct InputArgs {
  std::string builtin_name;
  std::string file_path;
};

void add_input_flags(CLI::App* cmd, InputArgs& in) {
  auto* b = cmd->add_option("--builtin", in.builtin_name, "built-in scenario name");
  auto* f = cmd->add_option("--file", in.file_path, "scenario file (.ppse)");
  b->excludes(f);
  f->excludes(b);
}

// exits with kExitUsage on IO problems, propagates typed scenario errors
ppse::ScenarioSpec load_spec(const InputArgs& in) {
  if (!in.builtin_name.empty()) return ppse::builtin(in.builtin_name);
  if (in.file_path.empty()) {
    std::cerr << "error: one of --builtin or --file is required\n";
    std::exit(kExitUsage);
  }
  std::ifstream f(in.file_path);
  if (!f) {
    std::cerr << "error: cannot open '" << in.file_path << "'\n";
    std::exit(kExitUsage);
  }
  std::ostringstream os;
  os << f.rdbuf();
  return ppse::parse(os.str());
}

double default_tolerance() {
  if (const char* env = std::getenv("PPSE_TOL")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && v > 0.0) return v;
    std::cerr << "error: PPSE_TOL is not a positive number\n";
    std::exit(kExitUsage);
  }
  return 0.0;  // keep the scenario's own tolerance
}

std::vector<ppse::Process> parse_process_list(const std::string& csv) {
  std::vector<ppse::Process> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto p = ppse::process_from_string(item);
    if (!p) {
      std::cerr << "error: unknown process '" << item << "'\n";
      std::exit(kExitUsage);
    }
    out.push_back(*p);
  }
  return out;
}

int report_error(const ppse::Error& e) {
  if (const auto* pe = dynamic_cast<const ppse::ParseError*>(&e)) {
    std::cerr << "parse error at " << pe->line << ":" << pe->column << ": "
              << pe->what() << "\n";
  } else if (const auto* se = dynamic_cast<const ppse::SemanticError*>(&e)) {
    std::cerr << "semantic error at " << se->line << ":" << se->column << ": "
              << se->what() << "\n";
  } else {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitScenarioError;
}

int run_one(ppse::ScenarioSpec spec, double tol_override,
            const std::string& processes_csv, bool reset, ppse::ReportFormat fmt) {
  if (tol_override > 0.0) spec.options.tol = tol_override;
  if (!processes_csv.empty()) spec.options.processes = parse_process_list(processes_csv);
  if (reset) spec.options.reset = true;
  ppse::RunReport rep = ppse::run(spec);
  std::cout << ppse::format_report(rep, fmt);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pre- and post-selected ensemble simulator"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "run a scenario and print its report");
  InputArgs run_in;
  add_input_flags(run_cmd, run_in);
  std::string format_s = "table";
  run_cmd->add_option("--format", format_s, "table | json | csv");
  double tol_override = 0.0;
  run_cmd->add_option("--tol", tol_override, "tolerance override");
  std::string processes_csv;
  run_cmd->add_option("--processes", processes_csv,
                      "comma-separated time-symmetry processes (i..viii)");
  bool reset = false;
  run_cmd->add_flag("--reset", reset, "also compute the reset-variant weights");
  bool all_builtins = false;
  run_cmd->add_flag("--all-builtins", all_builtins, "run every built-in scenario");

  // check-timesym
  auto* ts_cmd = app.add_subcommand(
      "check-timesym", "compare forward and reverse-time ensemble weights");
  InputArgs ts_in;
  add_input_flags(ts_cmd, ts_in);
  std::string ts_processes = "ii";
  ts_cmd->add_option("--processes", ts_processes, "processes to check (default ii)");
  double ts_tol = 1e-9;
  ts_cmd->add_option("--tol", ts_tol, "pass/fail tolerance (default 1e-9)");

  // list-builtins
  auto* list_cmd = app.add_subcommand("list-builtins", "list built-in scenarios");

  // render-builtin
  auto* render_cmd =
      app.add_subcommand("render-builtin", "print the text form of a builtin");
  std::string render_name;
  render_cmd->add_option("name", render_name, "builtin name")->required();

  // validate
  auto* validate_cmd =
      app.add_subcommand("validate", "parse and semantically check a scenario");
  InputArgs val_in;
  add_input_flags(validate_cmd, val_in);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  const double env_tol = default_tolerance();

  try {
    if (list_cmd->parsed()) {
      for (const auto& n : ppse::builtin_names()) std::cout << n << "\n";
      return kExitOk;
    }

    if (render_cmd->parsed()) {
      std::cout << ppse::render(ppse::builtin(render_name));
      return kExitOk;
    }

    if (validate_cmd->parsed()) {
      ppse::ScenarioSpec spec = load_spec(val_in);
      ppse::resolve(spec);
      std::cout << "ok: scenario \"" << spec.name << "\" is valid\n";
      return kExitOk;
    }

    if (run_cmd->parsed()) {
      auto fmt = ppse::report_format_from_string(format_s);
      if (!fmt) {
        std::cerr << "error: unknown format '" << format_s << "'\n";
        return kExitUsage;
      }
      double tol = tol_override > 0.0 ? tol_override : env_tol;
      if (all_builtins) {
        for (const auto& n : ppse::builtin_names()) {
          int rc = run_one(ppse::builtin(n), tol, processes_csv, reset, *fmt);
          if (rc != kExitOk) return rc;
          if (*fmt == ppse::ReportFormat::Table) std::cout << "\n";
        }
        return kExitOk;
      }
      return run_one(load_spec(run_in), tol, processes_csv, reset, *fmt);
    }

    if (ts_cmd->parsed()) {
      ppse::ScenarioSpec spec = load_spec(ts_in);
      if (env_tol > 0.0) spec.options.tol = env_tol;
      spec.options.processes = parse_process_list(ts_processes);
      if (spec.options.processes.empty()) {
        std::cerr << "error: no processes requested\n";
        return kExitUsage;
      }
      ppse::RunReport rep = ppse::run(spec);
      std::cout << "scenario: " << rep.scenario << "\n";
      bool pass = true;
      for (const auto& pr : rep.timesym->processes) {
        bool ok = pr.max_deviation <= ts_tol;
        pass = pass && ok;
        std::cout << "process " << ppse::to_string(pr.process) << ": max deviation "
                  << pr.max_deviation << "  " << (ok ? "PASS" : "FAIL") << "\n";
      }
      for (const auto& row : rep.eigenvalues) {
        std::cout << "Prob[k=" << row.k << "] = " << row.prob << "\n";
      }
      std::cout << "overall: " << (pass ? "PASS" : "FAIL") << " (tolerance " << ts_tol
                << ")\n";
      return pass ? kExitOk : kExitScenarioError;
    }
  } catch (const ppse::Error& e) {
    return report_error(e);
  }

  std::cerr << "error: no subcommand\n";
  return kExitUsage;
}
