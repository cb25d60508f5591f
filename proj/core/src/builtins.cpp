#include <cmath>

#include "ppse/scenario.hpp"

namespace ppse {

namespace {

NamedUnitary unitary_from_columns(const std::string& name,
                                  const std::vector<StateVector>& cols) {
  NamedUnitary u;
  u.name = name;
  u.dim = int(cols.size());
  u.entries.assign(size_t(u.dim) * size_t(u.dim), Cx(0, 0));
  for (int c = 0; c < u.dim; ++c) {
    for (int r = 0; r < u.dim; ++r) {
      u.entries[size_t(r * u.dim + c)] = cols[size_t(c)].amps[size_t(r)];
    }
  }
  return u;
}

ScenarioSpec three_box_spec(int box) {
  static const char* names[] = {"three-box-X", "three-box-Y", "three-box-Z"};
  ScenarioSpec spec;
  spec.name = names[box];
  spec.dim = 3;
  spec.basis_labels = {"X", "Y", "Z"};

  SpacePtr sys = make_space(spec.basis_labels);
  const double r3 = 1.0 / std::sqrt(3.0);
  StateVector a = make_state(sys, {Cx(r3, 0), Cx(r3, 0), Cx(r3, 0)});
  StateVector b = make_state(sys, {Cx(r3, 0), Cx(r3, 0), Cx(-r3, 0)});

  spec.unitaries.push_back(unitary_from_columns("PRE", basis_starting_with(a)));
  spec.unitaries.push_back(unitary_from_columns("POST", basis_starting_with(b)));

  // eigenbasis columns: the looked-in box first, the other two after
  std::vector<StateVector> cols{basis_state(sys, box)};
  for (int c = 0; c < 3; ++c) {
    if (c != box) cols.push_back(basis_state(sys, c));
  }
  spec.unitaries.push_back(unitary_from_columns("C", cols));

  spec.measure.blocks = {1, 2};
  spec.measure.mode = "coarse";
  spec.measure.basis_ref = "C";
  spec.pre = SelectDecl{"PRE", 0, ""};
  spec.post = SelectDecl{"POST", 0, ""};
  return spec;
}

ScenarioSpec appendix_a_spec(bool reset) {
  const double c = 1.0 / std::sqrt(2.0);
  CMatrix d(2, 2);
  d.at(0, 0) = Cx(c, 0);
  d.at(0, 1) = Cx(c, 0);
  d.at(1, 0) = Cx(-c, 0);
  d.at(1, 1) = Cx(c, 0);
  AppendixAFixture fx = appendix_a_fixture(d);

  ScenarioSpec spec;
  spec.name = reset ? "appendix-a-reset" : "appendix-a";
  spec.dim = 3;
  spec.basis_labels = {"c00", "c11", "c12"};

  spec.unitaries.push_back(
      unitary_from_columns("PRE", basis_starting_with(fx.a_sys)));
  spec.unitaries.push_back(
      unitary_from_columns("POST", basis_starting_with(fx.b_sys)));

  spec.measure.blocks = {1, 2};
  spec.measure.mode = "twostep";
  spec.measure.dmats.emplace_back(2, d.a);

  // the interaction's spectral data, zero level completed over the remainder
  SpectralDecl sd;
  sd.duration = fx.duration;
  int zero_index = 0;
  static const char* coupled_zero[] = {"tau1", "tau2"};
  static const char* coupled_plus[] = {"sigma0p", "sigma11p", "sigma12p"};
  static const char* coupled_minus[] = {"sigma0m", "sigma11m", "sigma12m"};
  for (const auto& lvl : fx.spectrum.levels) {
    SpectralDecl::Level out;
    out.energy = lvl.energy;
    int idx = 0;
    for (const auto& v : lvl.eigenvectors) {
      std::string name;
      if (lvl.energy == 0.0) {
        name = (idx < 2) ? coupled_zero[idx] : ("rest" + std::to_string(zero_index++));
      } else if (lvl.energy > 0.0) {
        name = coupled_plus[idx];
      } else {
        name = coupled_minus[idx];
      }
      ++idx;
      spec.states.push_back(NamedState{name, v.amps});
      out.vec_refs.push_back(std::move(name));
    }
    sd.levels.push_back(std::move(out));
  }
  spec.spectral = std::move(sd);

  spec.pre = SelectDecl{"PRE", 0, ""};
  spec.post = SelectDecl{"POST", 0, ""};
  spec.options.processes = {Process::II};
  spec.options.reset = reset;
  return spec;
}

ScenarioSpec appendix_b_spec(AppendixBVariant v) {
  AppendixBFixture fx = appendix_b_fixture(v);

  ScenarioSpec spec;
  switch (v) {
    case AppendixBVariant::Original: spec.name = "appendix-b-original"; break;
    case AppendixBVariant::Interchanged: spec.name = "appendix-b-interchanged"; break;
    case AppendixBVariant::InterchangedTimeReversed:
      spec.name = "appendix-b-time-reversed";
      break;
  }
  spec.dim = 4;
  spec.basis_labels = fx.system->labels;

  spec.unitaries.push_back(
      unitary_from_columns("PRE", basis_starting_with(fx.a_sys)));
  spec.unitaries.push_back(
      unitary_from_columns("POST", basis_starting_with(fx.b_sys)));

  NamedUnitary u1;
  u1.name = "U1";
  u1.dim = 4;
  u1.entries = fx.u.entries;
  NamedUnitary u2 = u1;
  u2.name = "U2";
  spec.unitaries.push_back(std::move(u1));
  spec.unitaries.push_back(std::move(u2));

  NamedUnitary th;
  th.name = "THETA";
  th.dim = 4;
  th.entries = fx.theta.unitary_part.entries;
  spec.unitaries.push_back(std::move(th));

  spec.measure.blocks = {1, 3};
  spec.measure.mode = "coarse";
  spec.pre = SelectDecl{"PRE", 0, ""};
  spec.post = SelectDecl{"POST", 0, ""};
  spec.options.theta_ref = "THETA";
  spec.options.processes = {Process::II, Process::III};
  return spec;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"three-box-X",        "three-box-Y",
          "three-box-Z",        "appendix-a",
          "appendix-a-reset",   "appendix-b-original",
          "appendix-b-interchanged", "appendix-b-time-reversed"};
}

ScenarioSpec builtin(const std::string& name) {
  if (name == "three-box-X") return three_box_spec(0);
  if (name == "three-box-Y") return three_box_spec(1);
  if (name == "three-box-Z") return three_box_spec(2);
  if (name == "appendix-a") return appendix_a_spec(false);
  if (name == "appendix-a-reset") return appendix_a_spec(true);
  if (name == "appendix-b-original") return appendix_b_spec(AppendixBVariant::Original);
  if (name == "appendix-b-interchanged") {
    return appendix_b_spec(AppendixBVariant::Interchanged);
  }
  if (name == "appendix-b-time-reversed") {
    return appendix_b_spec(AppendixBVariant::InterchangedTimeReversed);
  }
  throw UnknownBuiltin("no builtin scenario named '" + name + "'");
}

}  // namespace ppse
