#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "ppse/errors.hpp"

namespace ppse {

using Cx = std::complex<double>;

inline constexpr double kDefaultTol = 1e-10;
// Threshold below which a squared amplitude counts as an empty ensemble /
// zero-measure selection rather than a number to divide by.
inline constexpr double kZeroMeasure = 1e-20;

// A labeled finite-dimensional state space. Product spaces carry dot-joined
// labels in row-major (left factor slowest) order.
struct HilbertSpace {
  int dim = 0;
  std::vector<std::string> labels;
};
using SpacePtr = std::shared_ptr<const HilbertSpace>;

SpacePtr make_space(std::vector<std::string> labels);
SpacePtr make_space(int dim, const std::string& prefix = "e");
SpacePtr product_space(const SpacePtr& a, const SpacePtr& b);
// Spaces are compared structurally (dim and labels), not by pointer.
bool same_space(const SpacePtr& a, const SpacePtr& b);

struct StateVector {
  SpacePtr space;
  std::vector<Cx> amps;
};

struct Operator {
  SpacePtr space;
  std::vector<Cx> entries;  // row-major, dim x dim

  Cx& at(int r, int c) { return entries[size_t(r) * size_t(space->dim) + size_t(c)]; }
  const Cx& at(int r, int c) const {
    return entries[size_t(r) * size_t(space->dim) + size_t(c)];
  }
};

// Antiunitary map v -> T * conj(v), with T unitary.
struct AntiunitaryOp {
  Operator unitary_part;
};

struct SpectralLevel {
  double energy = 0.0;
  std::vector<StateVector> eigenvectors;
};
// Eigen-decomposition of a Hamiltonian; the only accepted Hamiltonian form.
struct SpectralData {
  std::vector<SpectralLevel> levels;
};

// Plain rectangular complex matrix, used for d-coefficient blocks.
struct CMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Cx> a;

  CMatrix() = default;
  CMatrix(int r, int c) : rows(r), cols(c), a(size_t(r) * size_t(c), Cx(0.0, 0.0)) {}
  Cx& at(int r, int c) { return a[size_t(r) * size_t(cols) + size_t(c)]; }
  const Cx& at(int r, int c) const { return a[size_t(r) * size_t(cols) + size_t(c)]; }
  static CMatrix identity(int n);
};

StateVector make_state(SpacePtr space, std::vector<Cx> amps);
StateVector basis_state(const SpacePtr& space, int index);
StateVector zero_state(const SpacePtr& space);

double norm(const StateVector& v);
StateVector normalized(const StateVector& v);
StateVector scaled(const StateVector& v, Cx factor);
StateVector add(const StateVector& u, const StateVector& v);
StateVector sub(const StateVector& u, const StateVector& v);

Cx inner(const StateVector& u, const StateVector& v);
StateVector tensor(const StateVector& u, const StateVector& v);

Operator make_operator(SpacePtr space, std::vector<Cx> entries);
Operator identity_op(const SpacePtr& space);
Operator zero_op(const SpacePtr& space);
Operator projector(const StateVector& v);
StateVector apply(const Operator& m, const StateVector& v);
Operator adjoint(const Operator& m);
Operator compose(const Operator& m, const Operator& n);  // m * n
Operator add(const Operator& m, const Operator& n);
Operator scaled(const Operator& m, Cx factor);
Operator tensor(const Operator& a, const Operator& b);
bool is_unitary(const Operator& m, double tol = kDefaultTol);
bool is_hermitian(const Operator& m, double tol = kDefaultTol);
double trace_distance_from_identity(const Operator& m);  // max-abs entry of M - I
double max_abs_diff(const Operator& a, const Operator& b);

StateVector apply_antiunitary(const AntiunitaryOp& theta, const StateVector& v);
StateVector conj_state(const StateVector& v);

// U = sum_n exp(-i E_n t) |e_n><e_n| assembled from a complete orthonormal
// eigenbasis. Throws IncompleteSpectrum / NonOrthonormal.
Operator unitary_from_spectrum(const SpectralData& spec, double duration,
                               double tol = kDefaultTol);

// Lift a single-factor operator to the product of `spaces`:
// I (x) ... (x) M (x) ... (x) I with M at position factor_index.
Operator embed(const Operator& m, int factor_index, const std::vector<SpacePtr>& spaces);

// Phase-insensitive equality for normalized states: |<u|v>| >= 1 - tol.
bool phase_insensitive_equal(const StateVector& u, const StateVector& v,
                             double tol = kDefaultTol);

}  // namespace ppse
