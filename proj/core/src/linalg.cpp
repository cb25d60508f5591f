#include "ppse/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace ppse {

namespace {

void check_finite(const std::vector<Cx>& a, const char* what) {
  for (const Cx& z : a) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw NonFinite(std::string(what) + " contains a non-finite amplitude");
    }
  }
}

void check_same_space(const SpacePtr& a, const SpacePtr& b, const char* what) {
  if (!same_space(a, b)) {
    throw DimensionMismatch(std::string(what) + ": operands live on different spaces");
  }
}

}  // namespace

SpacePtr make_space(std::vector<std::string> labels) {
  if (labels.empty()) throw DimensionMismatch("space must have dimension >= 1");
  std::unordered_set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) {
      throw DimensionMismatch("duplicate basis label '" + l + "'");
    }
  }
  auto sp = std::make_shared<HilbertSpace>();
  sp->dim = int(labels.size());
  sp->labels = std::move(labels);
  return sp;
}

SpacePtr make_space(int dim, const std::string& prefix) {
  if (dim < 1) throw DimensionMismatch("space must have dimension >= 1");
  std::vector<std::string> labels;
  labels.reserve(size_t(dim));
  for (int i = 0; i < dim; ++i) labels.push_back(prefix + std::to_string(i));
  return make_space(std::move(labels));
}

SpacePtr product_space(const SpacePtr& a, const SpacePtr& b) {
  std::vector<std::string> labels;
  labels.reserve(size_t(a->dim) * size_t(b->dim));
  for (const auto& la : a->labels)
    for (const auto& lb : b->labels) labels.push_back(la + "." + lb);
  return make_space(std::move(labels));
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->dim == b->dim && a->labels == b->labels;
}

CMatrix CMatrix::identity(int n) {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = Cx(1.0, 0.0);
  return m;
}

StateVector make_state(SpacePtr space, std::vector<Cx> amps) {
  if (int(amps.size()) != space->dim) {
    throw DimensionMismatch("state has " + std::to_string(amps.size()) +
                            " amplitudes on a dim-" + std::to_string(space->dim) +
                            " space");
  }
  check_finite(amps, "state");
  return StateVector{std::move(space), std::move(amps)};
}

StateVector basis_state(const SpacePtr& space, int index) {
  if (index < 0 || index >= space->dim) {
    throw DimensionMismatch("basis index out of range");
  }
  std::vector<Cx> amps(size_t(space->dim), Cx(0.0, 0.0));
  amps[size_t(index)] = Cx(1.0, 0.0);
  return StateVector{space, std::move(amps)};
}

StateVector zero_state(const SpacePtr& space) {
  return StateVector{space, std::vector<Cx>(size_t(space->dim), Cx(0.0, 0.0))};
}

double norm(const StateVector& v) {
  double s = 0.0;
  for (const Cx& z : v.amps) s += std::norm(z);
  return std::sqrt(s);
}

StateVector normalized(const StateVector& v) {
  double n = norm(v);
  if (n * n < kZeroMeasure) throw NotNormalized("cannot normalize a null state");
  return scaled(v, Cx(1.0 / n, 0.0));
}

StateVector scaled(const StateVector& v, Cx factor) {
  StateVector out = v;
  for (Cx& z : out.amps) z *= factor;
  return out;
}

StateVector add(const StateVector& u, const StateVector& v) {
  check_same_space(u.space, v.space, "add");
  StateVector out = u;
  for (size_t i = 0; i < out.amps.size(); ++i) out.amps[i] += v.amps[i];
  return out;
}

StateVector sub(const StateVector& u, const StateVector& v) {
  check_same_space(u.space, v.space, "sub");
  StateVector out = u;
  for (size_t i = 0; i < out.amps.size(); ++i) out.amps[i] -= v.amps[i];
  return out;
}

Cx inner(const StateVector& u, const StateVector& v) {
  check_same_space(u.space, v.space, "inner");
  Cx s(0.0, 0.0);
  for (size_t i = 0; i < u.amps.size(); ++i) s += std::conj(u.amps[i]) * v.amps[i];
  return s;
}

StateVector tensor(const StateVector& u, const StateVector& v) {
  SpacePtr sp = product_space(u.space, v.space);
  std::vector<Cx> amps(static_cast<size_t>(sp->dim));
  const size_t dv = size_t(v.space->dim);
  for (size_t i = 0; i < u.amps.size(); ++i)
    for (size_t j = 0; j < dv; ++j) amps[i * dv + j] = u.amps[i] * v.amps[j];
  return StateVector{std::move(sp), std::move(amps)};
}

Operator make_operator(SpacePtr space, std::vector<Cx> entries) {
  const size_t want = size_t(space->dim) * size_t(space->dim);
  if (entries.size() != want) {
    throw DimensionMismatch("operator entry count does not match space dimension");
  }
  check_finite(entries, "operator");
  return Operator{std::move(space), std::move(entries)};
}

Operator identity_op(const SpacePtr& space) {
  Operator m{space, std::vector<Cx>(size_t(space->dim) * size_t(space->dim), Cx(0, 0))};
  for (int i = 0; i < space->dim; ++i) m.at(i, i) = Cx(1.0, 0.0);
  return m;
}

Operator zero_op(const SpacePtr& space) {
  return Operator{space,
                  std::vector<Cx>(size_t(space->dim) * size_t(space->dim), Cx(0, 0))};
}

Operator projector(const StateVector& v) {
  double n = norm(v);
  if (std::abs(n - 1.0) > 1e-8) {
    throw NotNormalized("projector requires a normalized state (norm = " +
                        std::to_string(n) + ")");
  }
  Operator m = zero_op(v.space);
  for (int r = 0; r < v.space->dim; ++r)
    for (int c = 0; c < v.space->dim; ++c)
      m.at(r, c) = v.amps[size_t(r)] * std::conj(v.amps[size_t(c)]);
  return m;
}

StateVector apply(const Operator& m, const StateVector& v) {
  check_same_space(m.space, v.space, "apply");
  const int d = m.space->dim;
  std::vector<Cx> out(size_t(d), Cx(0.0, 0.0));
  for (int r = 0; r < d; ++r) {
    Cx s(0.0, 0.0);
    const Cx* row = &m.entries[size_t(r) * size_t(d)];
    for (int c = 0; c < d; ++c) s += row[c] * v.amps[size_t(c)];
    out[size_t(r)] = s;
  }
  return StateVector{v.space, std::move(out)};
}

Operator adjoint(const Operator& m) {
  Operator out = zero_op(m.space);
  const int d = m.space->dim;
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) out.at(r, c) = std::conj(m.at(c, r));
  return out;
}

Operator compose(const Operator& m, const Operator& n) {
  check_same_space(m.space, n.space, "compose");
  const int d = m.space->dim;
  Operator out = zero_op(m.space);
  for (int r = 0; r < d; ++r) {
    for (int k = 0; k < d; ++k) {
      const Cx mrk = m.at(r, k);
      if (mrk == Cx(0.0, 0.0)) continue;
      for (int c = 0; c < d; ++c) out.at(r, c) += mrk * n.at(k, c);
    }
  }
  return out;
}

Operator add(const Operator& m, const Operator& n) {
  check_same_space(m.space, n.space, "add");
  Operator out = m;
  for (size_t i = 0; i < out.entries.size(); ++i) out.entries[i] += n.entries[i];
  return out;
}

Operator scaled(const Operator& m, Cx factor) {
  Operator out = m;
  for (Cx& z : out.entries) z *= factor;
  return out;
}

Operator tensor(const Operator& a, const Operator& b) {
  SpacePtr sp = product_space(a.space, b.space);
  Operator out = zero_op(sp);
  const int da = a.space->dim, db = b.space->dim;
  for (int ra = 0; ra < da; ++ra)
    for (int ca = 0; ca < da; ++ca) {
      const Cx v = a.at(ra, ca);
      if (v == Cx(0.0, 0.0)) continue;
      for (int rb = 0; rb < db; ++rb)
        for (int cb = 0; cb < db; ++cb)
          out.at(ra * db + rb, ca * db + cb) = v * b.at(rb, cb);
    }
  return out;
}

double trace_distance_from_identity(const Operator& m) {
  double worst = 0.0;
  const int d = m.space->dim;
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      Cx want = (r == c) ? Cx(1.0, 0.0) : Cx(0.0, 0.0);
      worst = std::max(worst, std::abs(m.at(r, c) - want));
    }
  return worst;
}

double max_abs_diff(const Operator& a, const Operator& b) {
  check_same_space(a.space, b.space, "max_abs_diff");
  double worst = 0.0;
  for (size_t i = 0; i < a.entries.size(); ++i)
    worst = std::max(worst, std::abs(a.entries[i] - b.entries[i]));
  return worst;
}

bool is_unitary(const Operator& m, double tol) {
  return trace_distance_from_identity(compose(adjoint(m), m)) <= tol;
}

bool is_hermitian(const Operator& m, double tol) {
  const int d = m.space->dim;
  for (int r = 0; r < d; ++r)
    for (int c = r; c < d; ++c)
      if (std::abs(m.at(r, c) - std::conj(m.at(c, r))) > tol) return false;
  return true;
}

StateVector conj_state(const StateVector& v) {
  StateVector out = v;
  for (Cx& z : out.amps) z = std::conj(z);
  return out;
}

StateVector apply_antiunitary(const AntiunitaryOp& theta, const StateVector& v) {
  check_same_space(theta.unitary_part.space, v.space, "apply_antiunitary");
  return apply(theta.unitary_part, conj_state(v));
}

Operator unitary_from_spectrum(const SpectralData& spec, double duration, double tol) {
  std::vector<const StateVector*> vecs;
  for (const auto& level : spec.levels)
    for (const auto& e : level.eigenvectors) vecs.push_back(&e);
  if (vecs.empty()) throw IncompleteSpectrum("spectral data has no eigenvectors");
  SpacePtr sp = vecs.front()->space;
  for (const auto* v : vecs) {
    if (!same_space(v->space, sp)) {
      throw DimensionMismatch("spectral eigenvectors live on different spaces");
    }
  }
  if (int(vecs.size()) != sp->dim) {
    throw IncompleteSpectrum("spectrum supplies " + std::to_string(vecs.size()) +
                             " eigenvectors for a dim-" + std::to_string(sp->dim) +
                             " space");
  }
  for (size_t i = 0; i < vecs.size(); ++i) {
    for (size_t j = i; j < vecs.size(); ++j) {
      Cx g = inner(*vecs[i], *vecs[j]);
      Cx want = (i == j) ? Cx(1.0, 0.0) : Cx(0.0, 0.0);
      if (std::abs(g - want) > tol) {
        throw NonOrthonormal("spectral eigenvectors are not orthonormal (pair " +
                             std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }

  Operator u = zero_op(sp);
  const int d = sp->dim;
  for (const auto& level : spec.levels) {
    const Cx phase = std::exp(Cx(0.0, -level.energy * duration));
    for (const auto& e : level.eigenvectors) {
      for (int r = 0; r < d; ++r) {
        const Cx pr = phase * e.amps[size_t(r)];
        if (pr == Cx(0.0, 0.0)) continue;
        for (int c = 0; c < d; ++c) u.at(r, c) += pr * std::conj(e.amps[size_t(c)]);
      }
    }
  }
  return u;
}

Operator embed(const Operator& m, int factor_index, const std::vector<SpacePtr>& spaces) {
  if (factor_index < 0 || factor_index >= int(spaces.size())) {
    throw BadFactorIndex("factor index " + std::to_string(factor_index) +
                         " out of range for " + std::to_string(spaces.size()) +
                         " factors");
  }
  if (!same_space(m.space, spaces[size_t(factor_index)])) {
    throw DimensionMismatch("operator does not act on the indexed factor space");
  }
  Operator out = identity_op(spaces[0]);
  bool started = false;
  for (size_t f = 0; f < spaces.size(); ++f) {
    Operator piece = (int(f) == factor_index) ? m : identity_op(spaces[f]);
    if (!started) {
      out = piece;
      started = true;
    } else {
      out = tensor(out, piece);
    }
  }
  return out;
}

bool phase_insensitive_equal(const StateVector& u, const StateVector& v, double tol) {
  double nu = norm(u), nv = norm(v);
  if (nu * nu < kZeroMeasure || nv * nv < kZeroMeasure) return false;
  return std::abs(inner(u, v)) / (nu * nv) >= 1.0 - tol;
}

}  // namespace ppse
