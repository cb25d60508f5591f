#include <benchmark/benchmark.h>

#include <random>

#include "ppse/report.hpp"
#include "ppse/scenario.hpp"
#include "ppse/timesym.hpp"

namespace {

using namespace ppse;

StateVector random_state(const SpacePtr& sp, std::mt19937& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  StateVector v = zero_state(sp);
  for (auto& z : v.amps) z = Cx(g(rng), g(rng));
  return normalized(v);
}

Operator random_unitary(const SpacePtr& sp, std::mt19937& rng) {
  std::vector<StateVector> cols;
  while (int(cols.size()) < sp->dim) {
    StateVector cand = random_state(sp, rng);
    for (const auto& prev : cols) cand = sub(cand, scaled(prev, inner(prev, cand)));
    if (norm(cand) > 1e-6) cols.push_back(normalized(cand));
  }
  Operator u = zero_op(sp);
  for (int c = 0; c < sp->dim; ++c) {
    for (int r = 0; r < sp->dim; ++r) u.at(r, c) = cols[size_t(c)].amps[size_t(r)];
  }
  return u;
}

IntermediateModel bench_model(int dim) {
  SpacePtr sys = make_space(dim, "c");
  Eigenstructure eigen;
  eigen.eigenvalues = {0.0, 1.0};
  eigen.blocks.resize(2);
  eigen.blocks[0].push_back(basis_state(sys, 0));
  for (int c = 1; c < dim; ++c) eigen.blocks[1].push_back(basis_state(sys, c));
  std::vector<CMatrix> d;
  d.push_back(CMatrix::identity(1));
  d.push_back(CMatrix::identity(dim - 1));
  return make_intermediate_model(std::move(eigen), ApparatusMode::TwoStep,
                                 std::move(d));
}

void bm_tensor(benchmark::State& state) {
  std::mt19937 rng(1);
  SpacePtr sp = make_space(int(state.range(0)), "e");
  StateVector u = random_state(sp, rng);
  StateVector v = random_state(sp, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tensor(u, v));
  }
}
BENCHMARK(bm_tensor)->Arg(8)->Arg(16);

void bm_apply(benchmark::State& state) {
  std::mt19937 rng(2);
  SpacePtr sp = make_space(int(state.range(0)), "e");
  Operator m = random_unitary(sp, rng);
  StateVector v = random_state(sp, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply(m, v));
  }
}
BENCHMARK(bm_apply)->Arg(16)->Arg(64);

void bm_interact(benchmark::State& state) {
  std::mt19937 rng(3);
  IntermediateModel m = bench_model(int(state.range(0)));
  StateVector psi = random_state(m.system_space, rng);
  Operator u = random_unitary(m.system_space, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(interact(m, psi, u));
  }
}
BENCHMARK(bm_interact)->Arg(4)->Arg(6);

void bm_ima_unitary(benchmark::State& state) {
  IntermediateModel m = bench_model(int(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ima_unitary(m));
  }
}
BENCHMARK(bm_ima_unitary)->Arg(4)->Arg(6);

void bm_run_three_box(benchmark::State& state) {
  ScenarioSpec spec = builtin("three-box-X");
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(spec));
  }
}
BENCHMARK(bm_run_three_box);

void bm_run_spin_fixture(benchmark::State& state) {
  ScenarioSpec spec = builtin("appendix-a");
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(spec));
  }
}
BENCHMARK(bm_run_spin_fixture);

void bm_parse_render(benchmark::State& state) {
  std::string text = render(builtin("appendix-a"));
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse(text));
  }
}
BENCHMARK(bm_parse_render);

}  // namespace

BENCHMARK_MAIN();
