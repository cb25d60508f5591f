#pragma once

#include <random>

#include "ppse/scenario.hpp"

namespace ppse::testing {

using Rng = std::mt19937;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Cx random_cx(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  return Cx(g(rng), g(rng));
}

inline StateVector random_state(const SpacePtr& sp, Rng& rng, bool real_only = false) {
  std::normal_distribution<double> g(0.0, 1.0);
  StateVector v = zero_state(sp);
  for (auto& z : v.amps) z = real_only ? Cx(g(rng), 0.0) : Cx(g(rng), g(rng));
  return normalized(v);
}

// Gram-Schmidt over Gaussian columns.
inline Operator random_unitary(const SpacePtr& sp, Rng& rng, bool real_only = false) {
  const int d = sp->dim;
  std::vector<StateVector> cols;
  while (int(cols.size()) < d) {
    StateVector cand = random_state(sp, rng, real_only);
    for (const auto& prev : cols) cand = sub(cand, scaled(prev, inner(prev, cand)));
    if (norm(cand) > 1e-6) cols.push_back(normalized(cand));
  }
  Operator u = zero_op(sp);
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < d; ++r) u.at(r, c) = cols[size_t(c)].amps[size_t(r)];
  }
  return u;
}

// Q diag(+-1) Q^T with Q real orthogonal: real, symmetric and unitary, so it
// passes motion reversal under plain conjugation.
inline Operator random_real_symmetric_unitary(const SpacePtr& sp, Rng& rng) {
  Operator q = random_unitary(sp, rng, true);
  Operator out = zero_op(sp);
  const int d = sp->dim;
  std::vector<double> sign(static_cast<size_t>(d));
  for (auto& s : sign) s = uniform_int(rng, 0, 1) ? 1.0 : -1.0;
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      Cx acc(0.0, 0.0);
      for (int k = 0; k < d; ++k) {
        acc += q.at(r, k) * Cx(sign[size_t(k)], 0.0) * q.at(c, k);
      }
      out.at(r, c) = acc;
    }
  }
  return out;
}

inline CMatrix random_dmatrix(int sz, Rng& rng, bool real_only = false) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix d(sz, sz);
  for (int r = 0; r < sz; ++r) {
    double n2 = 0.0;
    for (int c = 0; c < sz; ++c) {
      Cx z = real_only ? Cx(g(rng), 0.0) : Cx(g(rng), g(rng));
      d.at(r, c) = z;
      n2 += std::norm(z);
    }
    if (n2 < 1e-12) {
      d.at(r, 0) = Cx(1.0, 0.0);
      n2 = 1.0;
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (int c = 0; c < sz; ++c) d.at(r, c) *= inv;
  }
  return d;
}

inline std::vector<int> random_blocks(int dim, Rng& rng) {
  std::vector<int> blocks;
  int left = dim;
  while (left > 0) {
    int b = uniform_int(rng, 1, std::min(left, 3));
    blocks.push_back(b);
    left -= b;
  }
  if (blocks.size() == 1 && dim > 1) {
    // a lone block makes every mode trivial; split it
    blocks = {1, dim - 1};
  }
  return blocks;
}

struct RandomScenarioConfig {
  bool real_only = false;              // real states, orthogonal matrices, real d
  bool symmetric_stages = false;       // stage unitaries pass motion reversal with K
  std::vector<std::string> modes = {"nondegenerate", "coarse", "fine", "twostep"};
};

// A full randomized scenario in DSL form. The initial state is resampled
// until the pre-selection and the ensemble denominator are comfortably away
// from zero.
inline ScenarioSpec random_scenario(Rng& rng, const RandomScenarioConfig& cfg,
                                    int index) {
  const int dim = uniform_int(rng, 2, 6);
  SpacePtr sys = make_space(dim, "q");

  ScenarioSpec spec;
  spec.name = "random-" + std::to_string(index);
  spec.dim = dim;
  spec.basis_labels = sys->labels;

  std::string mode = cfg.modes[size_t(uniform_int(rng, 0, int(cfg.modes.size()) - 1))];
  std::vector<int> blocks = random_blocks(dim, rng);
  if (mode == "nondegenerate") blocks.assign(size_t(dim), 1);

  auto named = [&](const std::string& name, const Operator& op) {
    NamedUnitary u;
    u.name = name;
    u.dim = dim;
    u.entries = op.entries;
    spec.unitaries.push_back(std::move(u));
  };

  named("PRE", random_unitary(sys, rng, cfg.real_only));
  named("POST", random_unitary(sys, rng, cfg.real_only));
  named("C", random_unitary(sys, rng, cfg.real_only));
  named("U1", cfg.symmetric_stages ? random_real_symmetric_unitary(sys, rng)
                                   : random_unitary(sys, rng, cfg.real_only));
  named("U2", cfg.symmetric_stages ? random_real_symmetric_unitary(sys, rng)
                                   : random_unitary(sys, rng, cfg.real_only));

  spec.measure.blocks = blocks;
  spec.measure.mode = mode;
  spec.measure.basis_ref = "C";
  if (mode == "twostep") {
    for (size_t b = 0; b < blocks.size(); ++b) {
      CMatrix d = random_dmatrix(blocks[b], rng, cfg.real_only);
      spec.measure.dmats.emplace_back(int(b) + 1, d.a);
    }
  }

  spec.pre = SelectDecl{"PRE", uniform_int(rng, 0, dim - 1), "psi"};
  spec.post = SelectDecl{"POST", uniform_int(rng, 0, dim - 1), ""};

  // initial state with a healthy overlap on the chosen pre-selection ray
  const NamedUnitary* pre_u = nullptr;
  for (const auto& u : spec.unitaries) {
    if (u.name == "PRE") pre_u = &u;
  }
  StateVector a = zero_state(sys);
  for (int r = 0; r < dim; ++r) {
    a.amps[size_t(r)] = pre_u->entries[size_t(r * dim + spec.pre.index)];
  }
  StateVector psi = random_state(sys, rng, cfg.real_only);
  for (int tries = 0; tries < 64 && std::norm(inner(a, psi)) < 0.05; ++tries) {
    psi = random_state(sys, rng, cfg.real_only);
  }
  if (std::norm(inner(a, psi)) < 0.05) psi = a;
  spec.states.push_back(NamedState{"psi", psi.amps});

  return spec;
}

// Resample until the scenario runs without hitting a zero-measure selection.
inline ScenarioSpec runnable_random_scenario(Rng& rng, const RandomScenarioConfig& cfg,
                                             int index) {
  for (int tries = 0; tries < 128; ++tries) {
    ScenarioSpec spec = random_scenario(rng, cfg, index);
    try {
      (void)run(spec);
      return spec;
    } catch (const Error&) {
      continue;
    }
  }
  throw std::runtime_error("could not generate a runnable scenario");
}

}  // namespace ppse::testing
