#pragma once

#include <string>
#include <vector>

#include "ppse/linalg.hpp"

namespace ppse {

// Eigenstructure of the intermediate observable: one block of orthonormal
// system states per distinct eigenvalue. Degeneracy is structural, never
// inferred from numerically close eigenvalues.
struct Eigenstructure {
  std::vector<double> eigenvalues;              // one per block, distinct
  std::vector<std::vector<StateVector>> blocks; // orthonormal, jointly complete
};

enum class ApparatusMode { NonDegenerate, CoarseDegenerate, FineDegenerate, TwoStep };

std::string to_string(ApparatusMode m);
ApparatusMode apparatus_mode_from_string(const std::string& s);

// Identifies one distinguishable pointer outcome. k indexes the eigenvalue
// block; l and m are -1 where the mode does not resolve them.
struct OutcomeTag {
  int k = 0;
  int l = -1;
  int m = -1;
  std::string label;

  bool operator==(const OutcomeTag& o) const {
    return k == o.k && l == o.l && m == o.m;
  }
};

struct IntermediateModel {
  Eigenstructure eigen;
  ApparatusMode mode = ApparatusMode::NonDegenerate;
  std::vector<CMatrix> dcoeffs;  // per block; only populated for TwoStep
  bool strict_d = false;         // require each d block to be unitary

  SpacePtr system_space;
  SpacePtr pointer_space;        // ready label at index 0, outcomes after
  std::vector<OutcomeTag> tags;  // tags[i] <-> pointer index 1 + i

  int outcome_count() const { return int(tags.size()); }
  int pointer_index(int outcome) const { return 1 + outcome; }
};

// Builds the pointer space and outcome tags for the given eigenstructure and
// mode, then validates. For NonDegenerate/CoarseDegenerate there is one
// outcome per eigenvalue, for FineDegenerate one per (k,l), for TwoStep one
// per (k,l,m).
IntermediateModel make_intermediate_model(Eigenstructure eigen, ApparatusMode mode,
                                          std::vector<CMatrix> dcoeffs = {},
                                          bool strict_d = false,
                                          double tol = kDefaultTol);

// Re-checks every model invariant; throws NonOrthonormalBasis,
// IncompleteBasis, BadDCoeffRow, ModeMismatch.
void validate_model(const IntermediateModel& m, double tol = kDefaultTol);

// Resolution of the identity over the pointer outcome labels (the ready
// label is excluded; it carries no amplitude after the interaction).
struct GammaSet {
  SpacePtr pointer_space;
  std::vector<Operator> elements;  // rank-1 projectors, aligned with tags
  std::vector<OutcomeTag> tags;
};

GammaSet gamma_set(const IntermediateModel& m);

// The measurement interaction: evolves `sys` with u_ca, then entangles the
// pointer with the eigencomponents of the result. Output lives on
// system (x) pointer and is normalized.
StateVector interact(const IntermediateModel& m, const StateVector& sys,
                     const Operator& u_ca, double tol = kDefaultTol);

// Unitary extension of the interaction to the full system (x) pointer space,
// exp(-i pi/2 (W + W^dag)) for the branch isometry W. Acts as -i * interact
// on ready-pointer states, as -i W^dag on their images, and as the identity
// on the untouched remainder. Used by the reverse-time machinery.
Operator ima_unitary(const IntermediateModel& m);

// The joint product space system (x) pointer.
SpacePtr joint_space(const IntermediateModel& m);

}  // namespace ppse
