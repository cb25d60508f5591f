#include "ppse/apparatus.hpp"

#include <cmath>

namespace ppse {

std::string to_string(ApparatusMode m) {
  switch (m) {
    case ApparatusMode::NonDegenerate: return "nondegenerate";
    case ApparatusMode::CoarseDegenerate: return "coarse";
    case ApparatusMode::FineDegenerate: return "fine";
    case ApparatusMode::TwoStep: return "twostep";
  }
  return "?";
}

ApparatusMode apparatus_mode_from_string(const std::string& s) {
  if (s == "nondegenerate") return ApparatusMode::NonDegenerate;
  if (s == "coarse") return ApparatusMode::CoarseDegenerate;
  if (s == "fine") return ApparatusMode::FineDegenerate;
  if (s == "twostep") return ApparatusMode::TwoStep;
  throw ModeMismatch("unknown apparatus mode '" + s + "'");
}

namespace {

std::vector<OutcomeTag> build_tags(const Eigenstructure& eigen, ApparatusMode mode) {
  std::vector<OutcomeTag> tags;
  for (int k = 0; k < int(eigen.blocks.size()); ++k) {
    const int sz = int(eigen.blocks[size_t(k)].size());
    switch (mode) {
      case ApparatusMode::NonDegenerate:
      case ApparatusMode::CoarseDegenerate:
        tags.push_back({k, -1, -1, "g" + std::to_string(k)});
        break;
      case ApparatusMode::FineDegenerate:
        for (int l = 0; l < sz; ++l) {
          tags.push_back({k, l, -1, "g" + std::to_string(k) + "_" + std::to_string(l)});
        }
        break;
      case ApparatusMode::TwoStep:
        for (int l = 0; l < sz; ++l) {
          for (int m = 0; m < sz; ++m) {
            tags.push_back({k, l, m,
                            "g" + std::to_string(k) + "_" + std::to_string(l) +
                                std::to_string(m)});
          }
        }
        break;
    }
  }
  return tags;
}

}  // namespace

IntermediateModel make_intermediate_model(Eigenstructure eigen, ApparatusMode mode,
                                          std::vector<CMatrix> dcoeffs, bool strict_d,
                                          double tol) {
  IntermediateModel m;
  m.eigen = std::move(eigen);
  m.mode = mode;
  m.dcoeffs = std::move(dcoeffs);
  m.strict_d = strict_d;

  if (m.eigen.blocks.empty()) throw IncompleteBasis("eigenstructure has no blocks");
  bool found_any = false;
  for (const auto& block : m.eigen.blocks) {
    for (const auto& v : block) {
      m.system_space = v.space;
      found_any = true;
      break;
    }
    if (found_any) break;
  }
  if (!found_any) throw IncompleteBasis("eigenstructure has no eigenvectors");

  m.tags = build_tags(m.eigen, m.mode);
  std::vector<std::string> labels;
  labels.reserve(m.tags.size() + 1);
  labels.push_back("g");
  for (const auto& t : m.tags) labels.push_back(t.label);
  m.pointer_space = make_space(std::move(labels));

  validate_model(m, tol);
  return m;
}

void validate_model(const IntermediateModel& m, double tol) {
  const auto& eigen = m.eigen;
  if (eigen.eigenvalues.size() != eigen.blocks.size()) {
    throw ModeMismatch("eigenvalue count does not match block count");
  }
  for (size_t i = 0; i < eigen.eigenvalues.size(); ++i) {
    for (size_t j = i + 1; j < eigen.eigenvalues.size(); ++j) {
      if (eigen.eigenvalues[i] == eigen.eigenvalues[j]) {
        throw ModeMismatch("eigenvalues of distinct blocks must be distinct");
      }
    }
  }

  std::vector<const StateVector*> all;
  for (const auto& block : eigen.blocks) {
    if (block.empty()) throw IncompleteBasis("empty eigenvalue block");
    for (const auto& v : block) {
      if (!same_space(v.space, m.system_space)) {
        throw DimensionMismatch("eigenvectors live on different system spaces");
      }
      all.push_back(&v);
    }
  }
  if (int(all.size()) != m.system_space->dim) {
    throw IncompleteBasis("eigenbasis has " + std::to_string(all.size()) +
                          " vectors on a dim-" +
                          std::to_string(m.system_space->dim) + " space");
  }
  for (size_t i = 0; i < all.size(); ++i) {
    for (size_t j = i; j < all.size(); ++j) {
      Cx g = inner(*all[i], *all[j]);
      Cx want = (i == j) ? Cx(1.0, 0.0) : Cx(0.0, 0.0);
      if (std::abs(g - want) > tol) {
        throw NonOrthonormalBasis("eigenbasis vectors " + std::to_string(i) + "," +
                                  std::to_string(j) + " are not orthonormal");
      }
    }
  }

  if (m.mode == ApparatusMode::NonDegenerate) {
    for (const auto& block : eigen.blocks) {
      if (block.size() != 1) {
        throw ModeMismatch("nondegenerate mode requires every block to have size 1");
      }
    }
  }

  if (m.mode == ApparatusMode::TwoStep) {
    if (m.dcoeffs.size() != eigen.blocks.size()) {
      throw ModeMismatch("twostep mode needs one d matrix per eigenvalue block");
    }
    for (size_t k = 0; k < m.dcoeffs.size(); ++k) {
      const CMatrix& d = m.dcoeffs[k];
      const int sz = int(eigen.blocks[k].size());
      if (d.rows != sz || d.cols != sz) {
        throw ModeMismatch("d matrix for block " + std::to_string(k) +
                           " has the wrong shape");
      }
      for (int l = 0; l < sz; ++l) {
        double row = 0.0;
        for (int c = 0; c < sz; ++c) row += std::norm(d.at(l, c));
        if (std::abs(row - 1.0) > tol) {
          throw BadDCoeffRow("d row (" + std::to_string(k) + "," + std::to_string(l) +
                                 ") has squared norm " + std::to_string(row),
                             int(k), l);
        }
      }
      if (m.strict_d) {
        for (int c1 = 0; c1 < sz; ++c1) {
          for (int c2 = 0; c2 < sz; ++c2) {
            Cx g(0.0, 0.0);
            for (int r = 0; r < sz; ++r) g += std::conj(d.at(r, c1)) * d.at(r, c2);
            Cx want = (c1 == c2) ? Cx(1.0, 0.0) : Cx(0.0, 0.0);
            if (std::abs(g - want) > tol) {
              throw NotUnitary("strict d: block " + std::to_string(k) +
                               " is not unitary");
            }
          }
        }
      }
    }
  } else if (!m.dcoeffs.empty()) {
    throw ModeMismatch("d matrices are only meaningful in twostep mode");
  }
}

GammaSet gamma_set(const IntermediateModel& m) {
  validate_model(m);
  GammaSet g;
  g.pointer_space = m.pointer_space;
  g.tags = m.tags;
  for (int i = 0; i < m.outcome_count(); ++i) {
    g.elements.push_back(projector(basis_state(m.pointer_space, m.pointer_index(i))));
  }
  return g;
}

SpacePtr joint_space(const IntermediateModel& m) {
  return product_space(m.system_space, m.pointer_space);
}

namespace {

// Image of |c_kl> (x) |g> under the branch isometry: the d-weighted
// superposition for the (k,l) component, with pointer labels collapsed per
// mode.
StateVector branch_image(const IntermediateModel& m, int k, int l) {
  SpacePtr joint = joint_space(m);
  StateVector out = zero_state(joint);
  const int dptr = m.pointer_space->dim;
  auto put = [&](const StateVector& sys, int ptr_index, Cx coeff) {
    for (int s = 0; s < sys.space->dim; ++s) {
      out.amps[size_t(s) * size_t(dptr) + size_t(ptr_index)] +=
          coeff * sys.amps[size_t(s)];
    }
  };
  auto tag_index = [&](const OutcomeTag& want) {
    for (int i = 0; i < m.outcome_count(); ++i) {
      if (m.tags[size_t(i)] == want) return m.pointer_index(i);
    }
    throw UnknownOutcomeTag("internal: missing outcome tag");
  };

  const auto& block = m.eigen.blocks[size_t(k)];
  switch (m.mode) {
    case ApparatusMode::NonDegenerate:
    case ApparatusMode::CoarseDegenerate:
      put(block[size_t(l)], tag_index({k, -1, -1, ""}), Cx(1.0, 0.0));
      break;
    case ApparatusMode::FineDegenerate:
      put(block[size_t(l)], tag_index({k, l, -1, ""}), Cx(1.0, 0.0));
      break;
    case ApparatusMode::TwoStep: {
      const CMatrix& d = m.dcoeffs[size_t(k)];
      for (int mm = 0; mm < int(block.size()); ++mm) {
        put(block[size_t(mm)], tag_index({k, l, mm, ""}), d.at(l, mm));
      }
      break;
    }
  }
  return out;
}

}  // namespace

StateVector interact(const IntermediateModel& m, const StateVector& sys,
                     const Operator& u_ca, double tol) {
  validate_model(m, tol);
  if (!same_space(sys.space, m.system_space)) {
    throw DimensionMismatch("interact: state is not on the model's system space");
  }
  if (std::abs(norm(sys) - 1.0) > 1e-8) {
    throw NotNormalized("interact: system state must be normalized");
  }
  if (!is_unitary(u_ca, tol)) throw NotUnitary("interact: stage evolution not unitary");

  StateVector evolved = apply(u_ca, sys);
  StateVector out = zero_state(joint_space(m));
  for (int k = 0; k < int(m.eigen.blocks.size()); ++k) {
    const auto& block = m.eigen.blocks[size_t(k)];
    for (int l = 0; l < int(block.size()); ++l) {
      Cx t = inner(block[size_t(l)], evolved);
      if (t == Cx(0.0, 0.0)) continue;
      out = add(out, scaled(branch_image(m, k, l), t));
    }
  }
  return out;
}

Operator ima_unitary(const IntermediateModel& m) {
  validate_model(m);
  SpacePtr joint = joint_space(m);
  const int dj = joint->dim;
  const int dptr = m.pointer_space->dim;

  // W maps |c_kl> (x) |g> to its branch image and annihilates everything else.
  Operator w = zero_op(joint);
  for (int k = 0; k < int(m.eigen.blocks.size()); ++k) {
    const auto& block = m.eigen.blocks[size_t(k)];
    for (int l = 0; l < int(block.size()); ++l) {
      StateVector source = zero_state(joint);
      const StateVector& c = block[size_t(l)];
      for (int s = 0; s < c.space->dim; ++s) {
        source.amps[size_t(s) * size_t(dptr)] = c.amps[size_t(s)];  // ready index 0
      }
      StateVector image = branch_image(m, k, l);
      for (int r = 0; r < dj; ++r) {
        if (image.amps[size_t(r)] == Cx(0.0, 0.0)) continue;
        for (int c2 = 0; c2 < dj; ++c2) {
          w.at(r, c2) += image.amps[size_t(r)] * std::conj(source.amps[size_t(c2)]);
        }
      }
    }
  }

  Operator wd = adjoint(w);
  Operator u = identity_op(joint);
  u = add(u, scaled(compose(wd, w), Cx(-1.0, 0.0)));
  u = add(u, scaled(compose(w, wd), Cx(-1.0, 0.0)));
  u = add(u, scaled(add(w, wd), Cx(0.0, -1.0)));
  return u;
}

}  // namespace ppse
