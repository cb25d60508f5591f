#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppse/ensemble.hpp"
#include "ppse/timesym.hpp"

namespace ppse {

// ---------------------------------------------------------------------------
// Scenario description language. The text form is the human interface; parse
// and render are exact inverses on canonicalized specs.
// ---------------------------------------------------------------------------

struct NamedState {
  std::string name;
  std::vector<Cx> amps;
  bool operator==(const NamedState&) const = default;
};

struct NamedUnitary {
  std::string name;
  int dim = 0;
  std::vector<Cx> entries;  // row-major
  bool operator==(const NamedUnitary&) const = default;
};

struct MeasureDecl {
  std::vector<int> blocks;      // block sizes, in eigenbasis column order
  std::string mode;             // nondegenerate | coarse | fine | twostep
  std::string basis_ref;        // unitary whose columns are the eigenbasis; "" = canonical
  std::vector<std::pair<int, std::vector<Cx>>> dmats;  // 1-based block index -> row-major
  bool operator==(const MeasureDecl&) const = default;
};

struct SelectDecl {
  std::string basis_ref;
  int index = 0;
  std::string initial_ref;  // preselect only; "" = the chosen eigenstate itself
  bool operator==(const SelectDecl&) const = default;
};

struct SpectralDecl {
  struct Level {
    double energy = 0.0;
    std::vector<std::string> vec_refs;  // named joint-space states
    bool operator==(const Level&) const = default;
  };
  std::vector<Level> levels;
  double duration = 0.0;
  bool operator==(const SpectralDecl&) const = default;
};

struct ScenarioOptions {
  double tol = kDefaultTol;
  bool strict_norm = false;
  bool strict_d = false;
  std::vector<Process> processes;  // time-symmetry processes to run
  bool reset = false;
  std::string theta_ref;  // unitary part of the time-reversal candidate
  bool operator==(const ScenarioOptions&) const = default;
};

struct ScenarioSpec {
  std::string name;
  int dim = 0;
  std::vector<std::string> basis_labels;
  std::vector<NamedState> states;
  std::vector<NamedUnitary> unitaries;
  std::optional<SpectralDecl> spectral;
  MeasureDecl measure;
  SelectDecl pre;
  SelectDecl post;
  ScenarioOptions options;
  bool operator==(const ScenarioSpec&) const = default;
};

// Deterministic parse of the scenario grammar; locations on every error.
ScenarioSpec parse(const std::string& text);

// Canonical text form; parse(render(s)) structurally equals s.
std::string render(const ScenarioSpec& spec);

// Catalog of ready-made scenarios: three-box-X|Y|Z, appendix-a,
// appendix-a-reset, appendix-b-original|interchanged|time-reversed.
ScenarioSpec builtin(const std::string& name);
std::vector<std::string> builtin_names();

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

struct OutcomeRow {
  OutcomeTag tag;
  double weight = 0.0;  // D_i
  double prob = 0.0;    // Tr(rho Gamma_i)
  std::optional<double> closed_form;
  double oracle = 0.0;
};

struct EigenRow {
  int k = 0;
  double prob = 0.0;
  std::optional<double> closed_form;
  double oracle = 0.0;
};

struct TimeSymSection {
  std::vector<double> forward_weights;
  std::vector<ProcessWeights> processes;
  double max_deviation = 0.0;
  bool recovered_initial = false;
  double recovery_overlap = 0.0;
};

struct ResetSection {
  std::vector<double> weights;
  double max_deviation = 0.0;  // against forward weights
};

struct RunReport {
  std::string scenario;
  std::string mode;
  double pre_success = 0.0;
  double post_success = 0.0;
  std::vector<OutcomeRow> outcomes;
  std::vector<EigenRow> eigenvalues;
  std::optional<TimeSymSection> timesym;
  std::optional<ResetSection> reset;
  std::optional<double> prob_found;  // headline for the box fixtures
  std::vector<std::string> warnings;
  std::string note;
};

// Resolved, runnable form of a spec (semantic checks applied).
struct ResolvedScenario {
  RunSetup setup;
  std::optional<AntiunitaryOp> theta;
  ScenarioOptions options;
  std::vector<std::string> warnings;  // e.g. auto-normalized states
};

// Semantic resolution; throws SemanticError with the offending location.
ResolvedScenario resolve(const ScenarioSpec& spec);

// Full pipeline: preselect -> interact -> postselect -> density ->
// probabilities, with closed-form and oracle cross-checks and any requested
// time-symmetry processes. Cross-check deviations beyond 1e-9 become
// warnings, never silent.
RunReport run(const ScenarioSpec& spec);

}  // namespace ppse
