#include "ppse/timesym.hpp"

#include <cmath>

namespace ppse {

std::string to_string(Process p) {
  switch (p) {
    case Process::I: return "i";
    case Process::II: return "ii";
    case Process::III: return "iii";
    case Process::IV: return "iv";
    case Process::V: return "v";
    case Process::VI: return "vi";
    case Process::VII: return "vii";
    case Process::VIII: return "viii";
  }
  return "?";
}

std::optional<Process> process_from_string(const std::string& s) {
  if (s == "i") return Process::I;
  if (s == "ii") return Process::II;
  if (s == "iii") return Process::III;
  if (s == "iv") return Process::IV;
  if (s == "v") return Process::V;
  if (s == "vi") return Process::VI;
  if (s == "vii") return Process::VII;
  if (s == "viii") return Process::VIII;
  return std::nullopt;
}

bool check_motion_reversal(const Operator& u, const AntiunitaryOp& theta, double tol) {
  const Operator& t = theta.unitary_part;
  if (!same_space(u.space, t.space)) {
    throw DimensionMismatch("motion-reversal check: operands on different spaces");
  }
  Operator lhs = compose(adjoint(t), compose(u, t));
  Operator ut = zero_op(u.space);
  for (int r = 0; r < u.space->dim; ++r) {
    for (int c = 0; c < u.space->dim; ++c) ut.at(r, c) = u.at(c, r);
  }
  return max_abs_diff(lhs, ut) <= tol;
}

namespace {

struct Chains {
  SpacePtr joint2;
  Operator forward;   // (u2 x I) * U_int * (u1 x I)
  Operator mirrored;  // (u1 x I) * U_int * (u2 x I): the schedule run backwards
  StateVector a_sys;
  StateVector a_full; // a (x) ready pointer
  StateVector b_sys;
  int outcome_count = 0;
  const IntermediateModel* model = nullptr;
};

Chains build_chains(const RunSetup& setup) {
  const IntermediateModel& m = setup.model;
  Chains ch;
  ch.model = &m;
  ch.joint2 = joint_space(m);
  Operator u_int = setup.joint_u ? *setup.joint_u : ima_unitary(m);
  Operator e1 = tensor(setup.u1, identity_op(m.pointer_space));
  Operator e2 = tensor(setup.u2, identity_op(m.pointer_space));
  ch.forward = compose(e2, compose(u_int, e1));
  ch.mirrored = compose(e1, compose(u_int, e2));
  ch.a_sys = setup.pre.basis[size_t(setup.pre.chosen_index)];
  ch.a_full = tensor(ch.a_sys, basis_state(m.pointer_space, 0));
  ch.b_sys = setup.post.basis[size_t(setup.post.chosen_index)];
  ch.outcome_count = m.outcome_count();
  return ch;
}

StateVector pinned(const Chains& ch, const StateVector& sys, int outcome) {
  return tensor(sys, basis_state(ch.model->pointer_space,
                                 ch.model->pointer_index(outcome)));
}

StateVector theta_apply(const Operator& t_joint, const StateVector& v) {
  return apply(t_joint, conj_state(v));
}

std::vector<double> normalize_weights(std::vector<Cx> amps) {
  double denom = 0.0;
  for (const Cx& a : amps) denom += std::norm(a);
  if (denom < kZeroMeasure) {
    throw ImpossibleSelection("reverse projection vanishes for every outcome");
  }
  std::vector<double> w;
  w.reserve(amps.size());
  for (const Cx& a : amps) w.push_back(std::norm(a) / denom);
  return w;
}

std::vector<double> process_weights(const Chains& ch, Process p,
                                    const std::optional<Operator>& t_joint) {
  const bool needs_theta = (p == Process::III || p == Process::IV ||
                            p == Process::V || p == Process::VII);
  if (needs_theta && !t_joint) {
    throw MissingThetaForProcess("process " + to_string(p) +
                                 " needs a time-reversal operator");
  }
  Operator back_fwd = adjoint(ch.forward);
  Operator back_mir = adjoint(ch.mirrored);
  const StateVector& a_full = ch.a_full;
  StateVector b_ready =
      tensor(ch.b_sys, basis_state(ch.model->pointer_space, 0));

  std::vector<Cx> amps;
  for (int i = 0; i < ch.outcome_count; ++i) {
    StateVector b_pin = pinned(ch, ch.b_sys, i);
    StateVector a_pin = pinned(ch, ch.a_sys, i);
    Cx amp(0.0, 0.0);
    switch (p) {
      case Process::I:
        amp = inner(b_pin, apply(ch.forward, a_full));
        break;
      case Process::II:
        amp = inner(a_full, apply(back_fwd, b_pin));
        break;
      case Process::III:
        amp = inner(theta_apply(*t_joint, a_full),
                    apply(ch.mirrored, theta_apply(*t_joint, b_pin)));
        break;
      case Process::IV:
        amp = inner(theta_apply(*t_joint, b_pin),
                    apply(back_mir, theta_apply(*t_joint, a_full)));
        break;
      case Process::V:
        amp = inner(theta_apply(*t_joint, b_pin),
                    apply(ch.forward, theta_apply(*t_joint, a_full)));
        break;
      case Process::VI:
        amp = inner(a_pin, apply(ch.forward, b_ready));
        break;
      case Process::VII:
        amp = inner(theta_apply(*t_joint, a_full),
                    apply(back_fwd, theta_apply(*t_joint, b_pin)));
        break;
      case Process::VIII:
        amp = inner(b_ready, apply(back_fwd, a_pin));
        break;
    }
    amps.push_back(amp);
  }
  return normalize_weights(std::move(amps));
}

}  // namespace

TimeSymReport reverse_ppse(const RunSetup& setup, const std::vector<Process>& processes,
                           const std::optional<AntiunitaryOp>& theta_sys) {
  Chains ch = build_chains(setup);

  std::optional<Operator> t_joint;
  if (theta_sys) {
    t_joint = tensor(theta_sys->unitary_part, identity_op(setup.model.pointer_space));
    AntiunitaryOp theta_joint{*t_joint};
    Operator u_int = setup.joint_u ? *setup.joint_u : ima_unitary(setup.model);
    bool ok = check_motion_reversal(setup.u1, *theta_sys, setup.tol) &&
              check_motion_reversal(setup.u2, *theta_sys, setup.tol) &&
              check_motion_reversal(u_int, theta_joint, setup.tol);
    for (Process p : processes) {
      if ((p == Process::III || p == Process::IV || p == Process::V ||
           p == Process::VII) &&
          !ok) {
        throw MissingThetaForProcess(
            "supplied time-reversal operator fails motion-reversal for a stage "
            "unitary");
      }
    }
  }

  TimeSymReport rep;
  rep.forward_weights = process_weights(ch, Process::I, t_joint);

  for (Process p : processes) {
    ProcessWeights pw;
    pw.process = p;
    pw.weights = process_weights(ch, p, t_joint);
    for (size_t i = 0; i < pw.weights.size(); ++i) {
      pw.max_deviation = std::max(pw.max_deviation,
                                  std::abs(pw.weights[i] - rep.forward_weights[i]));
    }
    rep.max_deviation = std::max(rep.max_deviation, pw.max_deviation);
    rep.processes.push_back(std::move(pw));
  }

  // Full backward evolution of the post-selected state, then projection onto
  // the initial ray.
  StateVector full_fwd = apply(ch.forward, ch.a_full);
  Operator pb = tensor(projector(ch.b_sys), identity_op(setup.model.pointer_space));
  StateVector proj = apply(pb, full_fwd);
  double pn = norm(proj);
  if (pn * pn < kZeroMeasure) {
    throw ImpossiblePostSelection("post-selection has zero probability");
  }
  StateVector b_full = scaled(proj, Cx(1.0 / pn, 0.0));
  StateVector backward = apply(adjoint(ch.forward), b_full);
  Cx overlap = inner(ch.a_full, backward);
  rep.recovery_overlap = std::abs(overlap);
  rep.recovered_initial = std::norm(overlap) > kZeroMeasure;
  return rep;
}

std::vector<double> reset_variant(const RunSetup& setup) {
  const IntermediateModel& m = setup.model;
  Chains ch = build_chains(setup);
  Operator u_int = setup.joint_u ? *setup.joint_u : ima_unitary(m);
  Operator e1 = tensor(setup.u1, identity_op(m.pointer_space));
  Operator c1 = compose(u_int, e1);

  // forward state at t_c and its pointer branches
  StateVector a_tc = apply(c1, ch.a_full);
  const int ds = m.system_space->dim;
  const int dg = m.pointer_space->dim;
  StateVector u2d_b = apply(adjoint(setup.u2), ch.b_sys);

  // reset state: per-branch post-selection amplitude reattached to the
  // branch's system direction, pointer returned to ready
  StateVector reset_sys = zero_state(m.system_space);
  for (int g = 0; g < dg; ++g) {
    StateVector phi = zero_state(m.system_space);
    for (int s = 0; s < ds; ++s) {
      phi.amps[size_t(s)] = a_tc.amps[size_t(s) * size_t(dg) + size_t(g)];
    }
    double n = norm(phi);
    if (n * n < kZeroMeasure) continue;
    Cx beta = inner(u2d_b, phi);  // <b|u2|phi>
    if (beta == Cx(0.0, 0.0)) continue;
    reset_sys = add(reset_sys, scaled(phi, beta / Cx(n, 0.0)));
  }
  double rn = norm(reset_sys);
  if (rn * rn < kZeroMeasure) {
    throw ImpossiblePostSelection("reset state vanishes");
  }
  StateVector b_reset =
      tensor(scaled(reset_sys, Cx(1.0 / rn, 0.0)), basis_state(m.pointer_space, 0));

  // backward through u2 then the interaction; outcome read on the far side
  Operator e2 = tensor(setup.u2, identity_op(m.pointer_space));
  StateVector v = apply(adjoint(c1), apply(adjoint(e2), b_reset));

  std::vector<Cx> amps;
  for (int i = 0; i < m.outcome_count(); ++i) {
    const StateVector& a =
        setup.pre.basis[size_t(setup.pre.chosen_index)];
    StateVector pin = tensor(a, basis_state(m.pointer_space, m.pointer_index(i)));
    amps.push_back(inner(pin, v));
  }
  return normalize_weights(std::move(amps));
}

AppendixAFixture appendix_a_fixture(const CMatrix& d, bool strict) {
  if (d.rows != 2 || d.cols != 2) {
    throw BadDCoeffRow("appendix-a d matrix must be 2x2", 1, 0);
  }
  SpacePtr sys = make_space({"c00", "c11", "c12"});

  Eigenstructure eigen;
  eigen.eigenvalues = {0.0, 1.0};
  eigen.blocks.resize(2);
  eigen.blocks[0].push_back(basis_state(sys, 0));
  eigen.blocks[1].push_back(basis_state(sys, 1));
  eigen.blocks[1].push_back(basis_state(sys, 2));

  std::vector<CMatrix> dcoeffs;
  dcoeffs.push_back(CMatrix::identity(1));
  dcoeffs.push_back(d);

  AppendixAFixture fx;
  fx.model = make_intermediate_model(std::move(eigen), ApparatusMode::TwoStep,
                                     std::move(dcoeffs), strict);

  const SpacePtr ptr = fx.model.pointer_space;
  const SpacePtr joint = joint_space(fx.model);
  auto jstate = [&](std::initializer_list<std::pair<std::pair<int, const char*>, Cx>>
                        terms) {
    StateVector v = zero_state(joint);
    for (const auto& [where, amp] : terms) {
      int s = where.first;
      int g = -1;
      for (int gi = 0; gi < ptr->dim; ++gi) {
        if (ptr->labels[size_t(gi)] == where.second) {
          g = gi;
          break;
        }
      }
      v.amps[size_t(s) * size_t(ptr->dim) + size_t(g)] = amp;
    }
    return v;
  };

  const Cx d00 = d.at(0, 0), d01 = d.at(0, 1), d10 = d.at(1, 0), d11 = d.at(1, 1);
  const double rt = 1.0 / std::sqrt(2.0);

  SpectralLevel zero;
  zero.energy = 0.0;
  zero.eigenvectors.push_back(jstate({{{1, "g1_00"}, -std::conj(d01)},
                                      {{2, "g1_01"}, std::conj(d00)}}));
  zero.eigenvectors.push_back(jstate({{{1, "g1_10"}, std::conj(d11)},
                                      {{2, "g1_11"}, -std::conj(d10)}}));

  SpectralLevel plus;
  plus.energy = 1.0;
  SpectralLevel minus;
  minus.energy = -1.0;
  for (double sign : {1.0, -1.0}) {
    SpectralLevel& lvl = (sign > 0) ? plus : minus;
    lvl.eigenvectors.push_back(jstate({{{0, "g"}, Cx(rt, 0)},
                                       {{0, "g0_00"}, Cx(sign * rt, 0)}}));
    lvl.eigenvectors.push_back(jstate({{{1, "g"}, Cx(rt, 0)},
                                       {{1, "g1_00"}, Cx(sign * rt, 0) * d00},
                                       {{2, "g1_01"}, Cx(sign * rt, 0) * d01}}));
    lvl.eigenvectors.push_back(jstate({{{2, "g"}, Cx(rt, 0)},
                                       {{1, "g1_10"}, Cx(sign * rt, 0) * d10},
                                       {{2, "g1_11"}, Cx(sign * rt, 0) * d11}}));
  }

  // complete the zero level over the untouched remainder of the joint space
  std::vector<StateVector> listed;
  for (const auto* lvl : {&zero, &plus, &minus}) {
    for (const auto& v : lvl->eigenvectors) listed.push_back(v);
  }
  for (int c = 0; c < joint->dim && int(listed.size()) < joint->dim; ++c) {
    StateVector cand = basis_state(joint, c);
    for (const auto& prev : listed) cand = sub(cand, scaled(prev, inner(prev, cand)));
    if (norm(cand) > 1e-8) {
      cand = normalized(cand);
      listed.push_back(cand);
      zero.eigenvectors.push_back(cand);
    }
  }
  if (int(listed.size()) != joint->dim) {
    throw IncompleteSpectrum("appendix-a spectrum completion failed");
  }

  fx.spectrum.levels = {zero, plus, minus};
  fx.duration = M_PI / 2.0;
  fx.a_sys = make_state(sys, {Cx(rt, 0), Cx(rt, 0), Cx(0, 0)});
  fx.b_sys = fx.a_sys;
  return fx;
}

AppendixAResult appendix_a(const CMatrix& d, bool strict) {
  AppendixAFixture fx = appendix_a_fixture(d, strict);
  Operator u_int = unitary_from_spectrum(fx.spectrum, fx.duration);

  RunSetup setup;
  setup.model = fx.model;
  setup.initial = fx.a_sys;
  setup.pre = SelectionEvent{basis_starting_with(fx.a_sys), 0, "alpha"};
  setup.post = SelectionEvent{basis_starting_with(fx.b_sys), 0, "beta"};
  setup.u1 = identity_op(fx.model.system_space);
  setup.u2 = identity_op(fx.model.system_space);
  setup.joint_u = u_int;

  AppendixAResult res;

  // the spectral evolution reproduces the model interaction up to a phase
  StateVector ready = basis_state(fx.model.pointer_space, 0);
  StateVector from_spectrum = apply(u_int, tensor(fx.a_sys, ready));
  StateVector from_model = interact(fx.model, fx.a_sys, setup.u1);
  res.coupling_overlap = std::abs(inner(from_spectrum, from_model));

  // forward density weights
  PipelineContext ctx = make_pipeline_context(fx.model.system_space,
                                              fx.model.pointer_space, 3, 3);
  PipelineState at_ta = preselect(ctx, setup.initial, setup.pre);
  PipelineState at_tc = evolve_to_tc_joint(at_ta, fx.model, u_int);
  StateVector a_tc = normalized(system_pointer_part(at_tc));
  StateVector b_tc = tensor(apply(adjoint(setup.u2), fx.b_sys), ready);
  EnsembleDensity rho = ppse_density(a_tc, b_tc, gamma_set(fx.model));
  res.forward_weights = rho.weights;
  res.prob_k1 = prob_eigenvalue(rho, 1);

  res.reverse = reverse_ppse(setup, {Process::II}, std::nullopt);

  res.reset_weights = reset_variant(setup);
  for (size_t i = 0; i < res.reset_weights.size(); ++i) {
    res.reset_deviation = std::max(
        res.reset_deviation, std::abs(res.reset_weights[i] - res.forward_weights[i]));
  }
  return res;
}

AppendixBFixture appendix_b_fixture(AppendixBVariant v) {
  AppendixBFixture fx;
  fx.system = make_space({"s00", "s11", "s12", "s13"});
  const double rt = 1.0 / std::sqrt(2.0);

  fx.u = zero_op(fx.system);
  fx.u.at(0, 0) = Cx(1, 0);
  fx.u.at(1, 3) = Cx(1, 0);
  fx.u.at(2, 1) = Cx(1, 0);
  fx.u.at(3, 2) = Cx(1, 0);

  const double rt3 = 1.0 / std::sqrt(3.0);
  const Cx r(-0.5, -std::sqrt(3.0) / 2.0);
  Operator t = zero_op(fx.system);
  t.at(0, 0) = Cx(1, 0);
  t.at(1, 1) = Cx(rt3, 0);
  t.at(1, 2) = r * rt3;
  t.at(1, 3) = Cx(rt3, 0);
  t.at(2, 1) = r * rt3;
  t.at(2, 2) = Cx(rt3, 0);
  t.at(2, 3) = Cx(rt3, 0);
  t.at(3, 1) = Cx(rt3, 0);
  t.at(3, 2) = Cx(rt3, 0);
  t.at(3, 3) = r * rt3;
  fx.theta = AntiunitaryOp{t};

  Eigenstructure eigen;
  eigen.eigenvalues = {0.0, 1.0};
  eigen.blocks.resize(2);
  eigen.blocks[0].push_back(basis_state(fx.system, 0));
  for (int c = 1; c < 4; ++c) eigen.blocks[1].push_back(basis_state(fx.system, c));
  fx.model = make_intermediate_model(std::move(eigen), ApparatusMode::CoarseDegenerate);

  StateVector a0 = make_state(fx.system, {Cx(rt, 0), Cx(rt, 0), Cx(0, 0), Cx(0, 0)});
  StateVector b0 = make_state(fx.system, {Cx(rt, 0), Cx(0, 0), Cx(rt, 0), Cx(0, 0)});
  switch (v) {
    case AppendixBVariant::Original:
      fx.a_sys = a0;
      fx.b_sys = b0;
      break;
    case AppendixBVariant::Interchanged:
      fx.a_sys = b0;
      fx.b_sys = a0;
      break;
    case AppendixBVariant::InterchangedTimeReversed:
      fx.a_sys = apply_antiunitary(fx.theta, b0);
      fx.b_sys = apply_antiunitary(fx.theta, a0);
      break;
  }
  return fx;
}

double appendix_b(AppendixBVariant v) {
  AppendixBFixture fx = appendix_b_fixture(v);

  PipelineContext ctx = make_pipeline_context(fx.system, fx.model.pointer_space, 4, 4);
  SelectionEvent pre{basis_starting_with(fx.a_sys), 0, "alpha"};
  SelectionEvent post{basis_starting_with(fx.b_sys), 0, "beta"};
  PipelineState at_ta = preselect(ctx, fx.a_sys, pre);
  PipelineState at_tc = evolve_to_tc(at_ta, fx.model, fx.u);
  StateVector a_tc = normalized(system_pointer_part(at_tc));
  StateVector b_tc = tensor(apply(adjoint(fx.u), fx.b_sys),
                            basis_state(fx.model.pointer_space, 0));
  EnsembleDensity rho = ppse_density(a_tc, b_tc, gamma_set(fx.model));
  return prob_eigenvalue(rho, 0);
}

}  // namespace ppse
