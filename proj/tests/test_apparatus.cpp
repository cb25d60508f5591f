#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "ppse/apparatus.hpp"

using namespace ppse;
using ppse::testing::Rng;

namespace {

Eigenstructure canonical_blocks(const SpacePtr& sys, const std::vector<int>& sizes) {
  Eigenstructure eigen;
  int col = 0;
  for (size_t b = 0; b < sizes.size(); ++b) {
    eigen.eigenvalues.push_back(double(b));
    std::vector<StateVector> block;
    for (int i = 0; i < sizes[b]; ++i) block.push_back(basis_state(sys, col++));
    eigen.blocks.push_back(std::move(block));
  }
  return eigen;
}

IntermediateModel random_model(Rng& rng, int dim, ApparatusMode mode) {
  SpacePtr sys = make_space(dim, "c");
  Operator q = testing::random_unitary(sys, rng);
  std::vector<int> sizes = testing::random_blocks(dim, rng);
  if (mode == ApparatusMode::NonDegenerate) sizes.assign(size_t(dim), 1);
  Eigenstructure eigen;
  int col = 0;
  for (size_t b = 0; b < sizes.size(); ++b) {
    eigen.eigenvalues.push_back(double(b));
    std::vector<StateVector> block;
    for (int i = 0; i < sizes[b]; ++i) {
      StateVector v = zero_state(sys);
      for (int r = 0; r < dim; ++r) v.amps[size_t(r)] = q.at(r, col);
      ++col;
      block.push_back(std::move(v));
    }
    eigen.blocks.push_back(std::move(block));
  }
  std::vector<CMatrix> d;
  if (mode == ApparatusMode::TwoStep) {
    for (int sz : sizes) d.push_back(testing::random_dmatrix(sz, rng));
  }
  return make_intermediate_model(std::move(eigen), mode, std::move(d));
}

}  // namespace

TEST_SUITE_BEGIN("apparatus");

TEST_CASE("validate accepts a plain nondegenerate model") {
  SpacePtr sys = make_space(3, "c");
  IntermediateModel m = make_intermediate_model(canonical_blocks(sys, {1, 1, 1}),
                                                ApparatusMode::NonDegenerate);
  CHECK_NOTHROW(validate_model(m));
  CHECK(m.outcome_count() == 3);
}

TEST_CASE("validate rejects an unnormalized d row") {
  SpacePtr sys = make_space(3, "c");
  CMatrix bad(2, 2);
  bad.at(0, 0) = Cx(0.9, 0);
  bad.at(0, 1) = Cx(0.1, 0);
  bad.at(1, 0) = Cx(0, 0);
  bad.at(1, 1) = Cx(1, 0);
  std::vector<CMatrix> d;
  d.push_back(CMatrix::identity(1));
  d.push_back(bad);
  try {
    make_intermediate_model(canonical_blocks(sys, {1, 2}), ApparatusMode::TwoStep,
                            std::move(d));
    FAIL("expected BadDCoeffRow");
  } catch (const BadDCoeffRow& e) {
    CHECK(e.block_index == 1);
    CHECK(e.row_index == 0);
  }
}

TEST_CASE("validate accepts the doubly-degenerate two-step model") {
  SpacePtr sys = make_space(3, "c");
  const double c = 1.0 / std::sqrt(2.0);
  CMatrix d(2, 2);
  d.at(0, 0) = Cx(c, 0);
  d.at(0, 1) = Cx(c, 0);
  d.at(1, 0) = Cx(-c, 0);
  d.at(1, 1) = Cx(c, 0);
  std::vector<CMatrix> ds;
  ds.push_back(CMatrix::identity(1));
  ds.push_back(d);
  CHECK_NOTHROW(make_intermediate_model(canonical_blocks(sys, {1, 2}),
                                        ApparatusMode::TwoStep, std::move(ds),
                                        /*strict_d=*/true));
}

TEST_CASE("validate catches structural mode mismatches") {
  SpacePtr sys = make_space(3, "c");
  CHECK_THROWS_AS(make_intermediate_model(canonical_blocks(sys, {1, 2}),
                                          ApparatusMode::NonDegenerate),
                  ModeMismatch);

  Eigenstructure missing = canonical_blocks(sys, {1, 1});
  CHECK_THROWS_AS(
      make_intermediate_model(std::move(missing), ApparatusMode::NonDegenerate),
      IncompleteBasis);

  Eigenstructure skew = canonical_blocks(sys, {1, 1, 1});
  skew.blocks[1][0] = skew.blocks[0][0];
  CHECK_THROWS_AS(make_intermediate_model(std::move(skew), ApparatusMode::NonDegenerate),
                  NonOrthonormalBasis);
}

TEST_CASE("gamma set resolves the identity over outcomes") {
  SpacePtr sys = make_space(3, "c");
  IntermediateModel m = make_intermediate_model(canonical_blocks(sys, {1, 1, 1}),
                                                ApparatusMode::NonDegenerate);
  GammaSet g = gamma_set(m);
  REQUIRE(g.elements.size() == 3);

  Operator sum = zero_op(m.pointer_space);
  for (const auto& e : g.elements) sum = add(sum, e);
  // identity over the outcome labels, nothing on the ready label
  for (int r = 0; r < m.pointer_space->dim; ++r) {
    for (int c = 0; c < m.pointer_space->dim; ++c) {
      Cx want = (r == c && r != 0) ? Cx(1, 0) : Cx(0, 0);
      CHECK(std::abs(sum.at(r, c) - want) < 1e-10);
    }
  }
  for (size_t i = 0; i < g.elements.size(); ++i) {
    for (size_t j = 0; j < g.elements.size(); ++j) {
      Operator prod = compose(g.elements[i], g.elements[j]);
      if (i == j) {
        CHECK(max_abs_diff(prod, g.elements[i]) < 1e-12);
      } else {
        CHECK(max_abs_diff(prod, zero_op(m.pointer_space)) < 1e-12);
      }
    }
  }
}

TEST_CASE("fine mode tags one outcome per basis vector") {
  SpacePtr sys = make_space(3, "c");
  IntermediateModel m = make_intermediate_model(canonical_blocks(sys, {1, 2}),
                                                ApparatusMode::FineDegenerate);
  GammaSet g = gamma_set(m);
  REQUIRE(g.tags.size() == 3);
  CHECK(g.tags[0] == OutcomeTag{0, 0, -1, ""});
  CHECK(g.tags[1] == OutcomeTag{1, 0, -1, ""});
  CHECK(g.tags[2] == OutcomeTag{1, 1, -1, ""});
}

TEST_CASE("two-step outcome count is the sum of squared block sizes") {
  SpacePtr sys = make_space(3, "c");
  std::vector<CMatrix> d;
  d.push_back(CMatrix::identity(1));
  d.push_back(CMatrix::identity(2));
  IntermediateModel m = make_intermediate_model(canonical_blocks(sys, {1, 2}),
                                                ApparatusMode::TwoStep, std::move(d));
  // enumerate directly: 1*1 + 2*2
  int expected = 0;
  for (int sz : {1, 2}) expected += sz * sz;
  CHECK(m.outcome_count() == expected);
  CHECK(m.tags[0] == OutcomeTag{0, 0, 0, ""});
  CHECK(m.tags[1] == OutcomeTag{1, 0, 0, ""});
  CHECK(m.tags[2] == OutcomeTag{1, 0, 1, ""});
  CHECK(m.tags[3] == OutcomeTag{1, 1, 0, ""});
  CHECK(m.tags[4] == OutcomeTag{1, 1, 1, ""});
}

TEST_CASE("interact correlates pointer labels with eigencomponents") {
  SpacePtr sys = make_space(2, "c");
  IntermediateModel m = make_intermediate_model(canonical_blocks(sys, {1, 1}),
                                                ApparatusMode::NonDegenerate);
  const double rt = 1.0 / std::sqrt(2.0);
  StateVector psi = make_state(sys, {Cx(rt, 0), Cx(rt, 0)});
  StateVector out = interact(m, psi, identity_op(sys));
  const int dg = m.pointer_space->dim;
  CHECK(std::abs(out.amps[size_t(0 * dg + m.pointer_index(0))] - Cx(rt, 0)) < 1e-14);
  CHECK(std::abs(out.amps[size_t(1 * dg + m.pointer_index(1))] - Cx(rt, 0)) < 1e-14);
  CHECK(std::abs(out.amps[0]) < 1e-14);  // nothing stays on the ready label
}

TEST_CASE("interact rejects a non-unitary stage") {
  SpacePtr sys = make_space(2, "c");
  IntermediateModel m = make_intermediate_model(canonical_blocks(sys, {1, 1}),
                                                ApparatusMode::NonDegenerate);
  CHECK_THROWS_AS(interact(m, basis_state(sys, 0), scaled(identity_op(sys), Cx(2, 0))),
                  NotUnitary);
}

TEST_CASE("interact preserves norm in every mode") {
  Rng rng(21);
  for (ApparatusMode mode :
       {ApparatusMode::NonDegenerate, ApparatusMode::CoarseDegenerate,
        ApparatusMode::FineDegenerate, ApparatusMode::TwoStep}) {
    for (int it = 0; it < 8; ++it) {
      const int dim = testing::uniform_int(rng, 2, 6);
      IntermediateModel m = random_model(rng, dim, mode);
      StateVector psi = testing::random_state(m.system_space, rng);
      Operator u = testing::random_unitary(m.system_space, rng);
      StateVector out = interact(m, psi, u);
      CHECK(std::abs(norm(out) - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("coarse and fine branches carry the same per-block content") {
  Rng rng(22);
  for (int it = 0; it < 8; ++it) {
    const int dim = testing::uniform_int(rng, 2, 6);
    IntermediateModel fine = random_model(rng, dim, ApparatusMode::FineDegenerate);
    IntermediateModel coarse =
        make_intermediate_model(fine.eigen, ApparatusMode::CoarseDegenerate);
    StateVector psi = testing::random_state(fine.system_space, rng);
    Operator u = testing::random_unitary(fine.system_space, rng);
    StateVector out_f = interact(fine, psi, u);
    StateVector out_c = interact(coarse, psi, u);

    // summing the fine branches of one block reproduces the coarse branch
    const int dgf = fine.pointer_space->dim;
    const int dgc = coarse.pointer_space->dim;
    for (int k = 0; k < int(fine.eigen.blocks.size()); ++k) {
      for (int s = 0; s < dim; ++s) {
        Cx fine_sum(0, 0);
        for (int i = 0; i < fine.outcome_count(); ++i) {
          if (fine.tags[size_t(i)].k != k) continue;
          fine_sum += out_f.amps[size_t(s * dgf + fine.pointer_index(i))];
        }
        Cx coarse_amp(0, 0);
        for (int i = 0; i < coarse.outcome_count(); ++i) {
          if (coarse.tags[size_t(i)].k != k) continue;
          coarse_amp += out_c.amps[size_t(s * dgc + coarse.pointer_index(i))];
        }
        CHECK(std::abs(fine_sum - coarse_amp) < 1e-12);
      }
    }
  }
}

TEST_CASE("two-step with identity coefficients reproduces the fine state") {
  Rng rng(23);
  for (int it = 0; it < 6; ++it) {
    const int dim = testing::uniform_int(rng, 2, 5);
    IntermediateModel fine = random_model(rng, dim, ApparatusMode::FineDegenerate);
    std::vector<CMatrix> d;
    for (const auto& block : fine.eigen.blocks) {
      d.push_back(CMatrix::identity(int(block.size())));
    }
    IntermediateModel two =
        make_intermediate_model(fine.eigen, ApparatusMode::TwoStep, std::move(d));
    StateVector psi = testing::random_state(fine.system_space, rng);
    Operator u = testing::random_unitary(fine.system_space, rng);
    StateVector out_f = interact(fine, psi, u);
    StateVector out_t = interact(two, psi, u);

    // tag (k,l) of the fine model corresponds to (k,l,l) of the two-step one
    for (int i = 0; i < fine.outcome_count(); ++i) {
      const OutcomeTag& tf = fine.tags[size_t(i)];
      int j = -1;
      for (int jj = 0; jj < two.outcome_count(); ++jj) {
        const OutcomeTag& tt = two.tags[size_t(jj)];
        if (tt.k == tf.k && tt.l == tf.l && tt.m == tf.l) j = jj;
      }
      REQUIRE(j >= 0);
      for (int s = 0; s < dim; ++s) {
        Cx a = out_f.amps[size_t(s * fine.pointer_space->dim + fine.pointer_index(i))];
        Cx b = out_t.amps[size_t(s * two.pointer_space->dim + two.pointer_index(j))];
        CHECK(std::abs(a - b) < 1e-12);
      }
    }
  }
}

TEST_CASE("the interaction unitary extends the branch map") {
  Rng rng(24);
  for (ApparatusMode mode : {ApparatusMode::CoarseDegenerate, ApparatusMode::TwoStep}) {
    IntermediateModel m = random_model(rng, 4, mode);
    Operator u = ima_unitary(m);
    CHECK(is_unitary(u, 1e-10));

    // on ready-pointer states it acts as -i times the interaction
    StateVector psi = testing::random_state(m.system_space, rng);
    StateVector in = tensor(psi, basis_state(m.pointer_space, 0));
    StateVector got = apply(u, in);
    StateVector want =
        scaled(interact(m, psi, identity_op(m.system_space)), Cx(0, -1));
    CHECK(norm(sub(got, want)) < 1e-10);

    // the coupled pair completes a full turn after four quarter-turns
    StateVector four = apply(u, apply(u, apply(u, got)));
    CHECK(norm(sub(four, in)) < 1e-9);
  }
}

TEST_SUITE_END();
