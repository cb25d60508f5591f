#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ppse/apparatus.hpp"
#include "ppse/linalg.hpp"

namespace ppse {

// One boundary selection: the full eigenbasis of the selecting observable
// plus the index that was kept. The matching apparatus pointer label is
// carried for reporting only.
struct SelectionEvent {
  std::vector<StateVector> basis;
  int chosen_index = 0;
  std::string apparatus_label;
};

void validate_selection(const SelectionEvent& ev, const SpacePtr& system,
                        double tol = kDefaultTol);

enum class Stage { TA, TC, TB };

// Factor spaces of the four-component product, in fixed tensor order:
// system, pre-selection apparatus, intermediate pointer, post-selection
// apparatus. The post apparatus carries a ready label at index 0.
struct PipelineContext {
  SpacePtr system;
  SpacePtr pre_app;
  SpacePtr ima;
  SpacePtr post_app;

  SpacePtr joint() const;
  int joint_index(int s, int a, int g, int b) const;
};

PipelineContext make_pipeline_context(const SpacePtr& system, const SpacePtr& ima,
                                      int pre_outcomes, int post_outcomes);

// Pipeline states stay unnormalized; the squared norm of `joint` is the
// cumulative selection probability.
struct PipelineState {
  Stage stage = Stage::TA;
  PipelineContext ctx;
  StateVector joint;
  double success_probability = 1.0;  // of the selection that produced this stage

  double cumulative_probability() const { return norm(joint) * norm(joint); }
};

// Projects the initial system state onto the chosen eigenstate and attaches
// the apparatus factors (chosen pre-pointer, ready intermediate pointer,
// ready post-pointer).
PipelineState preselect(const PipelineContext& ctx, const StateVector& initial,
                        const SelectionEvent& ev);

// Entangles the intermediate pointer per the model. Either a system-stage
// unitary (the interaction itself is the model's) or an explicit joint
// system (x) pointer unitary may drive the step.
PipelineState evolve_to_tc(const PipelineState& at_ta, const IntermediateModel& model,
                           const Operator& u_ca);
PipelineState evolve_to_tc_joint(const PipelineState& at_ta,
                                 const IntermediateModel& model,
                                 const Operator& joint_u);

// Applies the second-stage evolution to the system factor, projects onto the
// chosen post-selection eigenstate and moves the post apparatus off its ready
// label. The result stays unnormalized.
PipelineState postselect(const PipelineState& at_tc, const Operator& u_bc,
                         const SelectionEvent& ev);

// Extracts the system (x) pointer factors of a pipeline state whose pre/post
// apparatus factors are in a definite basis slot.
StateVector system_pointer_part(const PipelineState& st);

// The ensemble state: outcome projectors plus their weights.
struct EnsembleDensity {
  GammaSet gamma;
  std::vector<double> weights;
};

// Weights from the two boundary states at the intermediate time. a_at_tc is
// the forward joint system (x) pointer state. b_at_tc is the post-selection
// state propagated back to the same time; the projection fixes only its
// system-side content, which must ride on the ready pointer column (its
// pointer factor is otherwise ignored).
EnsembleDensity ppse_density(const StateVector& a_at_tc, const StateVector& b_at_tc,
                             const GammaSet& gamma);

// sum_i D_i Gamma_i as a pointer-space operator.
Operator density_operator(const EnsembleDensity& rho);

// Tr(rho Gamma_j) aggregated over the selected outcome indices.
double outcome_prob(const EnsembleDensity& rho, const std::vector<int>& outcome_indices);
double outcome_prob(const EnsembleDensity& rho, const OutcomeTag& tag);
// Aggregate over every outcome reporting eigenvalue block k.
double prob_eigenvalue(const EnsembleDensity& rho, int k);

enum class ClosedFormMode { NonDegenerate, Coarse, Fine, TwoStep };
ClosedFormMode closed_form_mode(ApparatusMode m);

// Probability that the intermediate measurement reports eigenvalue block k,
// computed directly from transition amplitudes <b|U2|c><c|U1|a> without
// constructing any joint state.
double prob_closed_form(ClosedFormMode mode, const StateVector& a, const StateVector& b,
                        const Operator& u1, const Operator& u2,
                        const Eigenstructure& eigen, const std::vector<CMatrix>& dcoeffs,
                        int k);

// Everything needed to run one experiment end to end.
struct RunSetup {
  IntermediateModel model;
  StateVector initial;
  SelectionEvent pre;
  SelectionEvent post;
  Operator u1;                     // system stage t_a -> t_c
  Operator u2;                     // system stage t_c -> t_b
  std::optional<Operator> joint_u; // joint system (x) pointer interaction
  double tol = kDefaultTol;
};

struct OracleResult {
  std::vector<double> per_outcome;  // aligned with model tags
  std::vector<double> per_eigenvalue;
  double pre_success = 0.0;
  double post_success = 0.0;
};

// Brute-force reference: builds the full four-factor product state through
// the selection chain with explicit index loops and reads each outcome
// probability as |amplitude of (pointer outcome and post-selection)|^2,
// normalized over outcomes. Shares no code with the density path.
OracleResult oracle_prob(const RunSetup& setup);

// Orthonormal basis whose first vector is `first`, completed by
// Gram-Schmidt over the canonical basis.
std::vector<StateVector> basis_starting_with(const StateVector& first);

struct ThreeBoxResult {
  double prob_found = 0.0;
  double prob_not_found = 0.0;
  double oracle_found = 0.0;
  double oracle_not_found = 0.0;
  std::string note;
};

enum class Box { X, Y, Z };

// The three-box experiment: pre-selection (|X>+|Y>+|Z>)/sqrt(3),
// post-selection (|X>+|Y>-|Z>)/sqrt(3), and a coarse two-outcome look into
// box P. Stage evolutions default to the identity.
ThreeBoxResult three_box(Box p, const std::optional<Operator>& u1 = std::nullopt,
                         const std::optional<Operator>& u2 = std::nullopt);

}  // namespace ppse
