#include "ppse/ensemble.hpp"

#include <cmath>

namespace ppse {

void validate_selection(const SelectionEvent& ev, const SpacePtr& system, double tol) {
  if (ev.basis.empty()) throw IncompleteBasis("selection basis is empty");
  for (const auto& v : ev.basis) {
    if (!same_space(v.space, system)) {
      throw DimensionMismatch("selection basis is not on the system space");
    }
  }
  if (int(ev.basis.size()) != system->dim) {
    throw IncompleteBasis("selection basis must span the system space");
  }
  for (size_t i = 0; i < ev.basis.size(); ++i) {
    for (size_t j = i; j < ev.basis.size(); ++j) {
      Cx g = inner(ev.basis[i], ev.basis[j]);
      Cx want = (i == j) ? Cx(1.0, 0.0) : Cx(0.0, 0.0);
      if (std::abs(g - want) > tol) {
        throw NonOrthonormalBasis("selection basis is not orthonormal");
      }
    }
  }
  if (ev.chosen_index < 0 || ev.chosen_index >= int(ev.basis.size())) {
    throw DimensionMismatch("selection index out of range");
  }
}

SpacePtr PipelineContext::joint() const {
  return product_space(product_space(product_space(system, pre_app), ima), post_app);
}

int PipelineContext::joint_index(int s, int a, int g, int b) const {
  return ((s * pre_app->dim + a) * ima->dim + g) * post_app->dim + b;
}

PipelineContext make_pipeline_context(const SpacePtr& system, const SpacePtr& ima,
                                      int pre_outcomes, int post_outcomes) {
  PipelineContext ctx;
  ctx.system = system;
  ctx.ima = ima;
  std::vector<std::string> pre_labels;
  for (int i = 0; i < pre_outcomes; ++i) pre_labels.push_back("a" + std::to_string(i));
  ctx.pre_app = make_space(std::move(pre_labels));
  std::vector<std::string> post_labels{"bR"};
  for (int i = 0; i < post_outcomes; ++i) post_labels.push_back("b" + std::to_string(i));
  ctx.post_app = make_space(std::move(post_labels));
  return ctx;
}

PipelineState preselect(const PipelineContext& ctx, const StateVector& initial,
                        const SelectionEvent& ev) {
  validate_selection(ev, ctx.system);
  if (!same_space(initial.space, ctx.system)) {
    throw DimensionMismatch("initial state is not on the system space");
  }
  if (std::abs(norm(initial) - 1.0) > 1e-8) {
    throw NotNormalized("initial state must be normalized");
  }
  const StateVector& a = ev.basis[size_t(ev.chosen_index)];
  Cx amp = inner(a, initial);
  if (std::norm(amp) < kZeroMeasure) {
    throw ImpossibleSelection("pre-selection has zero probability");
  }

  PipelineState st;
  st.stage = Stage::TA;
  st.ctx = ctx;
  st.joint = zero_state(ctx.joint());
  const int alpha = ev.chosen_index;
  for (int s = 0; s < ctx.system->dim; ++s) {
    st.joint.amps[size_t(ctx.joint_index(s, alpha, 0, 0))] = amp * a.amps[size_t(s)];
  }
  st.success_probability = std::norm(amp);
  return st;
}

namespace {

// Replaces the (system, pointer) factors of a product-stage state. `source`
// must be pinned to a single pre-apparatus slot and the ready post slot.
PipelineState lift_system_pointer(const PipelineState& at_ta,
                                  const StateVector& sys_ptr, Cx scale) {
  const PipelineContext& ctx = at_ta.ctx;
  PipelineState out;
  out.stage = Stage::TC;
  out.ctx = ctx;
  out.joint = zero_state(ctx.joint());
  out.success_probability = 1.0;

  // locate the pinned pre-apparatus slot (the only populated one at t_a)
  int alpha = -1;
  for (int a = 0; a < ctx.pre_app->dim && alpha < 0; ++a) {
    for (int s = 0; s < ctx.system->dim && alpha < 0; ++s) {
      for (int g = 0; g < ctx.ima->dim && alpha < 0; ++g) {
        if (std::norm(at_ta.joint.amps[size_t(ctx.joint_index(s, a, g, 0))]) >
            kZeroMeasure) {
          alpha = a;
        }
      }
    }
  }
  if (alpha < 0) throw ImpossibleSelection("pipeline state carries no amplitude");

  for (int s = 0; s < ctx.system->dim; ++s) {
    for (int g = 0; g < ctx.ima->dim; ++g) {
      Cx v = sys_ptr.amps[size_t(s) * size_t(ctx.ima->dim) + size_t(g)];
      if (v == Cx(0.0, 0.0)) continue;
      out.joint.amps[size_t(ctx.joint_index(s, alpha, g, 0))] = scale * v;
    }
  }
  return out;
}

}  // namespace

PipelineState evolve_to_tc(const PipelineState& at_ta, const IntermediateModel& model,
                           const Operator& u_ca) {
  if (at_ta.stage != Stage::TA) throw ModeMismatch("evolve_to_tc expects a t_a state");
  // The t_a state is amp * |a_i, alpha_i, g, bR>; pull out the system factor.
  const PipelineContext& ctx = at_ta.ctx;
  StateVector sys = zero_state(ctx.system);
  double best = -1.0;
  int alpha = 0;
  for (int a = 0; a < ctx.pre_app->dim; ++a) {
    double w = 0.0;
    for (int s = 0; s < ctx.system->dim; ++s) {
      w += std::norm(at_ta.joint.amps[size_t(ctx.joint_index(s, a, 0, 0))]);
    }
    if (w > best) {
      best = w;
      alpha = a;
    }
  }
  for (int s = 0; s < ctx.system->dim; ++s) {
    sys.amps[size_t(s)] = at_ta.joint.amps[size_t(ctx.joint_index(s, alpha, 0, 0))];
  }
  double n = norm(sys);
  if (n * n < kZeroMeasure) throw ImpossibleSelection("empty pipeline state");
  // the selection phase stays inside the normalized system vector
  StateVector sys_unit = scaled(sys, Cx(1.0 / n, 0.0));
  StateVector coupled = interact(model, sys_unit, u_ca);
  return lift_system_pointer(at_ta, coupled, Cx(n, 0.0));
}

PipelineState evolve_to_tc_joint(const PipelineState& at_ta,
                                 const IntermediateModel& model,
                                 const Operator& joint_u) {
  if (at_ta.stage != Stage::TA) throw ModeMismatch("evolve_to_tc expects a t_a state");
  if (!is_unitary(joint_u)) throw NotUnitary("joint interaction is not unitary");
  const PipelineContext& ctx = at_ta.ctx;
  if (!same_space(joint_u.space, product_space(ctx.system, ctx.ima))) {
    throw DimensionMismatch("joint interaction must act on system (x) pointer");
  }
  StateVector sys_ptr = system_pointer_part(at_ta);
  double n = norm(sys_ptr);
  if (n * n < kZeroMeasure) throw ImpossibleSelection("empty pipeline state");
  StateVector evolved = apply(joint_u, sys_ptr);
  (void)model;
  return lift_system_pointer(at_ta, scaled(evolved, Cx(1.0 / n, 0.0)), Cx(n, 0.0));
}

PipelineState postselect(const PipelineState& at_tc, const Operator& u_bc,
                         const SelectionEvent& ev) {
  if (at_tc.stage != Stage::TC) throw ModeMismatch("postselect expects a t_c state");
  const PipelineContext& ctx = at_tc.ctx;
  validate_selection(ev, ctx.system);
  if (!is_unitary(u_bc)) throw NotUnitary("second-stage evolution is not unitary");

  const double norm_in_sq = std::pow(norm(at_tc.joint), 2);
  if (norm_in_sq < kZeroMeasure) throw ImpossibleSelection("empty pipeline state");

  const StateVector& b = ev.basis[size_t(ev.chosen_index)];
  const int ds = ctx.system->dim;
  const int da = ctx.pre_app->dim;
  const int dg = ctx.ima->dim;
  const int beta = 1 + ev.chosen_index;  // index 0 is the ready label

  PipelineState out;
  out.stage = Stage::TB;
  out.ctx = ctx;
  out.joint = zero_state(ctx.joint());

  std::vector<Cx> slice(static_cast<size_t>(ds));
  for (int a = 0; a < da; ++a) {
    for (int g = 0; g < dg; ++g) {
      for (int s = 0; s < ds; ++s) {
        slice[size_t(s)] = at_tc.joint.amps[size_t(ctx.joint_index(s, a, g, 0))];
      }
      // u2 on the system factor, then the <b_j| overlap
      Cx overlap(0.0, 0.0);
      for (int r = 0; r < ds; ++r) {
        Cx acc(0.0, 0.0);
        for (int c = 0; c < ds; ++c) acc += u_bc.at(r, c) * slice[size_t(c)];
        overlap += std::conj(b.amps[size_t(r)]) * acc;
      }
      if (overlap == Cx(0.0, 0.0)) continue;
      for (int s = 0; s < ds; ++s) {
        out.joint.amps[size_t(ctx.joint_index(s, a, g, beta))] +=
            overlap * b.amps[size_t(s)];
      }
    }
  }

  const double norm_out_sq = std::pow(norm(out.joint), 2);
  if (norm_out_sq < kZeroMeasure) {
    throw ImpossiblePostSelection("post-selection has zero probability");
  }
  out.success_probability = norm_out_sq / norm_in_sq;
  return out;
}

StateVector system_pointer_part(const PipelineState& st) {
  const PipelineContext& ctx = st.ctx;
  SpacePtr joint2 = product_space(ctx.system, ctx.ima);
  StateVector out = zero_state(joint2);
  for (int s = 0; s < ctx.system->dim; ++s) {
    for (int g = 0; g < ctx.ima->dim; ++g) {
      Cx acc(0.0, 0.0);
      bool populated = false;
      for (int a = 0; a < ctx.pre_app->dim; ++a) {
        for (int b = 0; b < ctx.post_app->dim; ++b) {
          Cx v = st.joint.amps[size_t(ctx.joint_index(s, a, g, b))];
          if (v != Cx(0.0, 0.0)) {
            acc += v;
            populated = true;
          }
        }
      }
      if (populated) {
        out.amps[size_t(s) * size_t(ctx.ima->dim) + size_t(g)] = acc;
      }
    }
  }
  return out;
}

EnsembleDensity ppse_density(const StateVector& a_at_tc, const StateVector& b_at_tc,
                             const GammaSet& gamma) {
  if (!same_space(a_at_tc.space, b_at_tc.space)) {
    throw DimensionMismatch("boundary states must live on the same joint space");
  }
  const int dptr = gamma.pointer_space->dim;
  if (a_at_tc.space->dim % dptr != 0) {
    throw DimensionMismatch("joint space is not divisible by the pointer space");
  }
  const int ds = a_at_tc.space->dim / dptr;

  // System-side content of the reverse-propagated selection state: the
  // projection constrains nothing about its pointer factor, so only the
  // ready column enters.
  std::vector<Cx> b_sys(static_cast<size_t>(ds));
  double nb = 0.0;
  for (int s = 0; s < ds; ++s) {
    b_sys[size_t(s)] = b_at_tc.amps[size_t(s) * size_t(dptr)];
    nb += std::norm(b_sys[size_t(s)]);
  }
  if (nb < kZeroMeasure) {
    throw NotNormalized(
        "reverse-propagated selection state carries no system content on the ready "
        "pointer column");
  }
  nb = std::sqrt(nb);
  for (auto& z : b_sys) z /= nb;

  // v[g] = <b_sys | A(:, g)>, the post-selected amplitude of pointer column g
  std::vector<Cx> v(size_t(dptr), Cx(0.0, 0.0));
  for (int g = 0; g < dptr; ++g) {
    Cx acc(0.0, 0.0);
    for (int s = 0; s < ds; ++s) {
      acc += std::conj(b_sys[size_t(s)]) * a_at_tc.amps[size_t(s) * size_t(dptr) + size_t(g)];
    }
    v[size_t(g)] = acc;
  }

  EnsembleDensity rho;
  rho.gamma = gamma;
  double denom = 0.0;
  for (const auto& gam : gamma.elements) {
    // v^dag Gamma v
    Cx acc(0.0, 0.0);
    for (int r = 0; r < dptr; ++r) {
      for (int c = 0; c < dptr; ++c) {
        Cx e = gam.at(r, c);
        if (e == Cx(0.0, 0.0)) continue;
        acc += std::conj(v[size_t(r)]) * e * v[size_t(c)];
      }
    }
    double w = acc.real();
    if (w < 0.0 && w > -1e-15) w = 0.0;
    rho.weights.push_back(w);
    denom += w;
  }
  if (denom < kZeroMeasure) {
    throw EmptyEnsemble("no intermediate outcome is consistent with both selections");
  }
  for (auto& w : rho.weights) w /= denom;
  return rho;
}

Operator density_operator(const EnsembleDensity& rho) {
  Operator out = zero_op(rho.gamma.pointer_space);
  for (size_t i = 0; i < rho.gamma.elements.size(); ++i) {
    out = add(out, scaled(rho.gamma.elements[i], Cx(rho.weights[i], 0.0)));
  }
  return out;
}

double outcome_prob(const EnsembleDensity& rho, const std::vector<int>& outcome_indices) {
  Operator dens = density_operator(rho);
  double p = 0.0;
  for (int idx : outcome_indices) {
    if (idx < 0 || idx >= int(rho.gamma.elements.size())) {
      throw UnknownOutcomeTag("outcome index " + std::to_string(idx) + " out of range");
    }
    // Tr(rho Gamma_j)
    Operator prod = compose(dens, rho.gamma.elements[size_t(idx)]);
    Cx tr(0.0, 0.0);
    for (int r = 0; r < prod.space->dim; ++r) tr += prod.at(r, r);
    p += tr.real();
  }
  if (p < 0.0 && p > -1e-12) p = 0.0;
  return p;
}

double outcome_prob(const EnsembleDensity& rho, const OutcomeTag& tag) {
  for (size_t i = 0; i < rho.gamma.tags.size(); ++i) {
    if (rho.gamma.tags[i] == tag) return outcome_prob(rho, std::vector<int>{int(i)});
  }
  throw UnknownOutcomeTag("no outcome with tag " + tag.label);
}

double prob_eigenvalue(const EnsembleDensity& rho, int k) {
  std::vector<int> idx;
  for (size_t i = 0; i < rho.gamma.tags.size(); ++i) {
    if (rho.gamma.tags[i].k == k) idx.push_back(int(i));
  }
  if (idx.empty()) {
    throw UnknownOutcomeTag("no outcome reports eigenvalue block " + std::to_string(k));
  }
  return outcome_prob(rho, idx);
}

ClosedFormMode closed_form_mode(ApparatusMode m) {
  switch (m) {
    case ApparatusMode::NonDegenerate: return ClosedFormMode::NonDegenerate;
    case ApparatusMode::CoarseDegenerate: return ClosedFormMode::Coarse;
    case ApparatusMode::FineDegenerate: return ClosedFormMode::Fine;
    case ApparatusMode::TwoStep: return ClosedFormMode::TwoStep;
  }
  throw ModeMismatch("unknown apparatus mode");
}

double prob_closed_form(ClosedFormMode mode, const StateVector& a, const StateVector& b,
                        const Operator& u1, const Operator& u2,
                        const Eigenstructure& eigen, const std::vector<CMatrix>& dcoeffs,
                        int k) {
  if (k < 0 || k >= int(eigen.blocks.size())) {
    throw UnknownOutcomeTag("eigenvalue block " + std::to_string(k) + " out of range");
  }
  if (mode == ClosedFormMode::TwoStep && dcoeffs.size() != eigen.blocks.size()) {
    throw ModeMismatch("twostep closed form needs one d matrix per block");
  }
  StateVector ua = apply(u1, a);
  StateVector u2d_b = apply(adjoint(u2), b);  // <b|U2|c> = <U2^dag b|c>

  auto block_value = [&](int kk) -> double {
    const auto& block = eigen.blocks[size_t(kk)];
    const int sz = int(block.size());
    std::vector<Cx> t(static_cast<size_t>(sz)), s(static_cast<size_t>(sz));
    for (int l = 0; l < sz; ++l) {
      t[size_t(l)] = inner(block[size_t(l)], ua);
      s[size_t(l)] = inner(u2d_b, block[size_t(l)]);
    }
    switch (mode) {
      case ClosedFormMode::NonDegenerate: {
        if (sz != 1) throw ModeMismatch("nondegenerate closed form with block size > 1");
        return std::norm(s[0] * t[0]);
      }
      case ClosedFormMode::Coarse: {
        Cx acc(0.0, 0.0);
        for (int l = 0; l < sz; ++l) acc += s[size_t(l)] * t[size_t(l)];
        return std::norm(acc);
      }
      case ClosedFormMode::Fine: {
        double acc = 0.0;
        for (int l = 0; l < sz; ++l) acc += std::norm(s[size_t(l)] * t[size_t(l)]);
        return acc;
      }
      case ClosedFormMode::TwoStep: {
        const CMatrix& d = dcoeffs[size_t(kk)];
        double acc = 0.0;
        for (int l = 0; l < sz; ++l) {
          for (int m = 0; m < sz; ++m) {
            acc += std::norm(s[size_t(m)] * d.at(l, m) * t[size_t(l)]);
          }
        }
        return acc;
      }
    }
    throw ModeMismatch("unknown closed-form mode");
  };

  double num = block_value(k);
  double den = 0.0;
  for (int kk = 0; kk < int(eigen.blocks.size()); ++kk) den += block_value(kk);
  if (den < kZeroMeasure) {
    throw EmptyEnsemble("closed form: no outcome consistent with both selections");
  }
  return num / den;
}

OracleResult oracle_prob(const RunSetup& setup) {
  const IntermediateModel& m = setup.model;
  const SpacePtr sys = m.system_space;
  const int ds = sys->dim;
  const int na = int(setup.pre.basis.size());
  const int nb = int(setup.post.basis.size());
  const int da = na + 1;  // ready + one pointer slot per outcome
  const int dg = m.pointer_space->dim;
  const int db = nb + 1;

  validate_selection(setup.pre, sys);
  validate_selection(setup.post, sys);

  auto idx = [&](int s, int a, int g, int b) {
    return size_t(((s * da + a) * dg + g) * db + b);
  };
  std::vector<Cx> psi(size_t(ds) * size_t(da) * size_t(dg) * size_t(db), Cx(0, 0));

  // t_o: initial product state, every apparatus on its ready slot (index 0)
  for (int s = 0; s < ds; ++s) psi[idx(s, 0, 0, 0)] = setup.initial.amps[size_t(s)];

  // pre-selection measurement interaction, then projection onto outcome i
  {
    std::vector<Cx> next(psi.size(), Cx(0, 0));
    for (int j = 0; j < na; ++j) {
      const StateVector& aj = setup.pre.basis[size_t(j)];
      Cx amp(0.0, 0.0);
      for (int s = 0; s < ds; ++s) {
        amp += std::conj(aj.amps[size_t(s)]) * psi[idx(s, 0, 0, 0)];
      }
      if (amp == Cx(0.0, 0.0)) continue;
      for (int s = 0; s < ds; ++s) {
        next[idx(s, 1 + j, 0, 0)] += amp * aj.amps[size_t(s)];
      }
    }
    psi.swap(next);
  }
  double pre_success = 0.0;
  {
    std::vector<Cx> next(psi.size(), Cx(0, 0));
    const int keep = 1 + setup.pre.chosen_index;
    for (int s = 0; s < ds; ++s) {
      next[idx(s, keep, 0, 0)] = psi[idx(s, keep, 0, 0)];
      pre_success += std::norm(psi[idx(s, keep, 0, 0)]);
    }
    if (pre_success < kZeroMeasure) {
      throw ImpossibleSelection("oracle: pre-selection has zero probability");
    }
    psi.swap(next);
  }

  // intermediate stage: either the explicit joint unitary or stage evolution
  // followed by the branch expansion of the model
  if (setup.joint_u) {
    const Operator& u = *setup.joint_u;
    std::vector<Cx> next(psi.size(), Cx(0, 0));
    for (int a = 0; a < da; ++a) {
      for (int b = 0; b < db; ++b) {
        for (int s = 0; s < ds; ++s) {
          for (int g = 0; g < dg; ++g) {
            Cx v = psi[idx(s, a, g, b)];
            if (v == Cx(0.0, 0.0)) continue;
            const int col = s * dg + g;
            for (int s2 = 0; s2 < ds; ++s2) {
              for (int g2 = 0; g2 < dg; ++g2) {
                Cx e = u.at(s2 * dg + g2, col);
                if (e == Cx(0.0, 0.0)) continue;
                next[idx(s2, a, g2, b)] += e * v;
              }
            }
          }
        }
      }
    }
    psi.swap(next);
  } else {
    // system evolution u1
    std::vector<Cx> next(psi.size(), Cx(0, 0));
    for (int a = 0; a < da; ++a) {
      for (int g = 0; g < dg; ++g) {
        for (int b = 0; b < db; ++b) {
          for (int s2 = 0; s2 < ds; ++s2) {
            Cx acc(0.0, 0.0);
            for (int s = 0; s < ds; ++s) {
              acc += setup.u1.at(s2, s) * psi[idx(s, a, g, b)];
            }
            next[idx(s2, a, g, b)] = acc;
          }
        }
      }
    }
    psi.swap(next);

    // pointer branch expansion per mode
    std::vector<Cx> coupled(psi.size(), Cx(0, 0));
    for (int a = 0; a < da; ++a) {
      for (int b = 0; b < db; ++b) {
        for (int k = 0; k < int(m.eigen.blocks.size()); ++k) {
          const auto& block = m.eigen.blocks[size_t(k)];
          for (int l = 0; l < int(block.size()); ++l) {
            Cx t(0.0, 0.0);
            for (int s = 0; s < ds; ++s) {
              t += std::conj(block[size_t(l)].amps[size_t(s)]) * psi[idx(s, a, 0, b)];
            }
            if (t == Cx(0.0, 0.0)) continue;
            for (int out = 0; out < m.outcome_count(); ++out) {
              const OutcomeTag& tag = m.tags[size_t(out)];
              if (tag.k != k) continue;
              Cx coeff(0.0, 0.0);
              const StateVector* target = nullptr;
              switch (m.mode) {
                case ApparatusMode::NonDegenerate:
                case ApparatusMode::CoarseDegenerate:
                  target = &block[size_t(l)];
                  coeff = Cx(1.0, 0.0);
                  break;
                case ApparatusMode::FineDegenerate:
                  if (tag.l != l) continue;
                  target = &block[size_t(l)];
                  coeff = Cx(1.0, 0.0);
                  break;
                case ApparatusMode::TwoStep:
                  if (tag.l != l) continue;
                  target = &block[size_t(tag.m)];
                  coeff = m.dcoeffs[size_t(k)].at(l, tag.m);
                  break;
              }
              if (coeff == Cx(0.0, 0.0)) continue;
              const int g = m.pointer_index(out);
              for (int s = 0; s < ds; ++s) {
                coupled[idx(s, a, g, b)] += t * coeff * target->amps[size_t(s)];
              }
            }
          }
        }
      }
    }
    psi.swap(coupled);
  }

  // post-selection: system evolution u2, measurement interaction with the
  // post apparatus, then projection onto outcome j
  {
    std::vector<Cx> next(psi.size(), Cx(0, 0));
    for (int a = 0; a < da; ++a) {
      for (int g = 0; g < dg; ++g) {
        std::vector<Cx> slice(static_cast<size_t>(ds));
        for (int s = 0; s < ds; ++s) slice[size_t(s)] = psi[idx(s, a, g, 0)];
        std::vector<Cx> evolved(size_t(ds), Cx(0, 0));
        for (int s2 = 0; s2 < ds; ++s2) {
          Cx acc(0.0, 0.0);
          for (int s = 0; s < ds; ++s) acc += setup.u2.at(s2, s) * slice[size_t(s)];
          evolved[size_t(s2)] = acc;
        }
        for (int j = 0; j < nb; ++j) {
          const StateVector& bj = setup.post.basis[size_t(j)];
          Cx amp(0.0, 0.0);
          for (int s = 0; s < ds; ++s) {
            amp += std::conj(bj.amps[size_t(s)]) * evolved[size_t(s)];
          }
          if (amp == Cx(0.0, 0.0)) continue;
          for (int s = 0; s < ds; ++s) {
            next[idx(s, a, g, 1 + j)] += amp * bj.amps[size_t(s)];
          }
        }
      }
    }
    double before = 0.0;
    for (const Cx& z : psi) before += std::norm(z);
    psi.swap(next);

    const int keep = 1 + setup.post.chosen_index;
    OracleResult res;
    res.pre_success = pre_success;
    res.per_outcome.assign(size_t(m.outcome_count()), 0.0);
    double total = 0.0;
    for (int out = 0; out < m.outcome_count(); ++out) {
      const int g = m.pointer_index(out);
      double p = 0.0;
      for (int s = 0; s < ds; ++s) {
        for (int a = 0; a < da; ++a) {
          p += std::norm(psi[idx(s, a, g, keep)]);
        }
      }
      res.per_outcome[size_t(out)] = p;
      total += p;
    }
    if (total < kZeroMeasure) {
      throw ImpossiblePostSelection("oracle: post-selection has zero probability");
    }
    res.post_success = total / before;
    for (auto& p : res.per_outcome) p /= total;

    res.per_eigenvalue.assign(m.eigen.blocks.size(), 0.0);
    for (int out = 0; out < m.outcome_count(); ++out) {
      res.per_eigenvalue[size_t(m.tags[size_t(out)].k)] += res.per_outcome[size_t(out)];
    }
    return res;
  }
}

std::vector<StateVector> basis_starting_with(const StateVector& first) {
  std::vector<StateVector> basis{normalized(first)};
  const int d = first.space->dim;
  for (int c = 0; c < d && int(basis.size()) < d; ++c) {
    StateVector cand = basis_state(first.space, c);
    for (const auto& prev : basis) {
      cand = sub(cand, scaled(prev, inner(prev, cand)));
    }
    if (norm(cand) > 1e-8) basis.push_back(normalized(cand));
  }
  if (int(basis.size()) != d) throw IncompleteBasis("failed to complete basis");
  return basis;
}

ThreeBoxResult three_box(Box p, const std::optional<Operator>& u1,
                         const std::optional<Operator>& u2) {
  SpacePtr sys = make_space({"X", "Y", "Z"});
  const double r3 = 1.0 / std::sqrt(3.0);
  StateVector a = make_state(sys, {Cx(r3, 0), Cx(r3, 0), Cx(r3, 0)});
  StateVector b = make_state(sys, {Cx(r3, 0), Cx(r3, 0), Cx(-r3, 0)});

  const int box = (p == Box::X) ? 0 : (p == Box::Y) ? 1 : 2;
  Eigenstructure eigen;
  eigen.eigenvalues = {1.0, 0.0};
  eigen.blocks.resize(2);
  eigen.blocks[0].push_back(basis_state(sys, box));
  for (int c = 0; c < 3; ++c) {
    if (c != box) eigen.blocks[1].push_back(basis_state(sys, c));
  }
  IntermediateModel model =
      make_intermediate_model(std::move(eigen), ApparatusMode::CoarseDegenerate);

  RunSetup setup;
  setup.model = model;
  setup.initial = a;
  setup.pre = SelectionEvent{basis_starting_with(a), 0, "alpha"};
  setup.post = SelectionEvent{basis_starting_with(b), 0, "beta"};
  setup.u1 = u1 ? *u1 : identity_op(sys);
  setup.u2 = u2 ? *u2 : identity_op(sys);

  PipelineContext ctx = make_pipeline_context(sys, model.pointer_space, 3, 3);
  PipelineState at_ta = preselect(ctx, setup.initial, setup.pre);
  PipelineState at_tc = evolve_to_tc(at_ta, model, setup.u1);
  StateVector a_tc = system_pointer_part(at_tc);
  StateVector sv_n = normalized(a_tc);

  StateVector b_back = apply(adjoint(setup.u2), b);
  StateVector b_tc = tensor(b_back, basis_state(model.pointer_space, 0));
  EnsembleDensity rho = ppse_density(sv_n, b_tc, gamma_set(model));

  OracleResult oracle = oracle_prob(setup);

  ThreeBoxResult res;
  res.prob_found = prob_eigenvalue(rho, 0);
  res.prob_not_found = prob_eigenvalue(rho, 1);
  res.oracle_found = oracle.per_eigenvalue[0];
  res.oracle_not_found = oracle.per_eigenvalue[1];
  if (p == Box::Z) {
    res.note =
        "looking in the third box: computed probability 1/5; differs from the "
        "sometimes-quoted 1/3";
  }
  return res;
}

}  // namespace ppse
