#include <gtest/gtest.h>

#include <random>

#include "cone_lpv/conditions.hpp"
#include "cone_lpv/errors.hpp"
#include "cone_lpv/io.hpp"
#include "cone_lpv/jsr.hpp"
#include "cone_lpv/verify.hpp"
#include "test_support.hpp"

using namespace cone_lpv;
using namespace cone_lpv::testing_support;

namespace {

PolytopicSystem random_system(std::mt19937_64& rng, std::size_t n, std::size_t nv, double range) {
  PolytopicSystem s;
  for (std::size_t k = 0; k < nv; ++k) s.vertices.push_back(random_matrix(rng, n, n, -range, range));
  return s;
}

void expect_certified(const PolytopicSystem& s, const Verdict& v) {
  if (v.existence) {
    EXPECT_TRUE(verify_existence(s, *v.existence).passed);
  }
  if (v.nonexistence) {
    EXPECT_TRUE(verify_nonexistence(s, *v.nonexistence).passed);
    EXPECT_NEAR(v.nonexistence->total_trace(), 1.0, 1e-9);
  }
  EXPECT_EQ(v.outcome == Outcome::inconclusive, !v.existence && !v.nonexistence);
}

}  // namespace

TEST(Build, ScalarStabilityPrimal) {
  const FeasibilityProblem p = build(scalar_system(0.5), Analysis::stability, Side::primal);
  ASSERT_EQ(p.map.output_dims().size(), 2u);
  const BlockDiagSym out = p.map.apply(BlockDiagSym({SymMatrix::from_rows({{2.0}})}));
  EXPECT_DOUBLE_EQ(out[0](0, 0), 2.0 - 0.25 * 2.0);
  EXPECT_DOUBLE_EQ(out[1](0, 0), 2.0);
}

TEST(Build, CounterexampleDualLayout) {
  const PolytopicSystem s = daafouz_system();
  const FeasibilityProblem p = build(s, Analysis::stability, Side::dual);
  EXPECT_EQ(p.map.input_dims().size(), 2u);
  EXPECT_EQ(p.map.output_dims().size(), 4u + 2u);
  ASSERT_EQ(p.equalities.size(), 1u);

  // With only Q(i,j) set, the slack for vertex i is minus the dual condition block.
  std::mt19937_64 rng(51);
  NonexistenceCertificate c;
  c.analysis = Analysis::stability;
  std::vector<SymMatrix> r(6, SymMatrix::zero(2));
  for (int j = 1; j <= 2; ++j)
    for (int i = 1; i <= 2; ++i) {
      const SymMatrix q = random_psd(rng, 2);
      c.blocks.emplace(VertexPair{i, j}, q);
      r[std::size_t(pair_to_flat({i, j}, 2) - 1)] = q;
    }
  const BlockDiagSym adj = p.map.apply_adjoint(BlockDiagSym(r));
  for (int i = 1; i <= 2; ++i) {
    const SymMatrix cond = dual_condition_block(s, Analysis::stability, c, i);
    EXPECT_LE((adj[std::size_t(i - 1)] + cond).frobenius_norm(), 1e-12);
  }
}

TEST(Build, StabilizabilityDualAddsInputEquality) {
  const PolytopicSystem s = io::load_system(data_path("lifted_system.json"));
  const FeasibilityProblem p = build(s, Analysis::stabilizability, Side::dual);
  ASSERT_EQ(p.equalities.size(), 2u);
  const LinearEquality& e = p.equalities[1];
  EXPECT_EQ(e.target, 0.0);
  for (std::size_t k = 0; k < 4; ++k) {
    const SymMatrix& c = e.coefficients[k];
    EXPECT_EQ(c(1, 1), 1.0);
    EXPECT_EQ(c.frobenius_norm(), 1.0);
  }
  for (std::size_t k = 4; k < 6; ++k) EXPECT_EQ(e.coefficients[k].frobenius_norm(), 0.0);
}

TEST(Build, MissingInputOrOutputMatrix) {
  EXPECT_THROW(build(daafouz_system(), Analysis::detectability, Side::primal), ContractError);
  EXPECT_THROW(build(daafouz_system(), Analysis::stabilizability, Side::dual), ContractError);
}

TEST(Analyze, ScalarHalfIsStable) {
  const PolytopicSystem s = scalar_system(0.5);
  const Verdict v = analyze(s, Analysis::stability);
  EXPECT_EQ(v.outcome, Outcome::existence_proven);
  expect_certified(s, v);
}

TEST(Analyze, CounterexampleIsNotPolyQuadraticallyStable) {
  const PolytopicSystem s = daafouz_system();
  const Verdict v = analyze(s, Analysis::stability);
  EXPECT_EQ(v.outcome, Outcome::nonexistence_proven);
  expect_certified(s, v);
}

TEST(Analyze, LiftedCounterexampleIsNotStabilizable) {
  const PolytopicSystem s = io::load_system(data_path("lifted_system.json"));
  const Verdict v = analyze(s, Analysis::stabilizability);
  EXPECT_EQ(v.outcome, Outcome::nonexistence_proven);
  expect_certified(s, v);
  ASSERT_TRUE(v.nonexistence);
  const SymMatrix sum = v.nonexistence->block_sum(4);
  EXPECT_LE(std::abs(sum(1, 1)), 1e-8);
}

TEST(Analyze, StabilizabilityExistenceIsOnlyNecessary) {
  PolytopicSystem s = scalar_system(1.5);
  s.B = Matrix::from_rows({{1.0}});
  const Verdict v = analyze(s, Analysis::stabilizability);
  EXPECT_EQ(v.outcome, Outcome::necessary_condition_feasible);
  expect_certified(s, v);
}

TEST(Analyze, ScalarOracles) {
  for (double a : {0.0, 0.5, -0.5, 0.99}) {
    const Verdict v = analyze(scalar_system(a), Analysis::stability);
    EXPECT_EQ(v.outcome, Outcome::existence_proven) << "a = " << a;
    expect_certified(scalar_system(a), v);
  }
  for (double a : {1.0, 1.1, -1.2}) {
    const Verdict v = analyze(scalar_system(a), Analysis::stability);
    EXPECT_EQ(v.outcome, Outcome::nonexistence_proven) << "a = " << a;
    expect_certified(scalar_system(a), v);
  }
}

TEST(Analyze, DetectabilityOracles) {
  PolytopicSystem blind = scalar_system(1.1);
  blind.C = Matrix::from_rows({{0.0}});
  EXPECT_EQ(analyze(blind, Analysis::detectability).outcome, Outcome::nonexistence_proven);
  for (double a : {0.0, 0.9, 1.1, -3.0, 10.0}) {
    PolytopicSystem full = scalar_system(a);
    full.C = Matrix::from_rows({{1.0}});
    const Verdict v = analyze(full, Analysis::detectability);
    EXPECT_EQ(v.outcome, Outcome::existence_proven) << "a = " << a;
    expect_certified(full, v);
  }
  PolytopicSystem two = daafouz_system();
  two.C = Matrix::identity(2);
  EXPECT_EQ(analyze(two, Analysis::detectability).outcome, Outcome::existence_proven);
}

TEST(Analyze, SingleVertexMatchesSpectralRadius) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const PolytopicSystem s = trial < 100 ? scalar_system(u(rng)) : random_system(rng, 2, 1, 1.2);
    const double rho = jsr::spectral_radius(s.vertices[0]);
    if (std::abs(rho - 1.0) < 1e-3) continue;
    const Verdict v = analyze(s, Analysis::stability);
    EXPECT_EQ(v.outcome, rho < 1.0 ? Outcome::existence_proven : Outcome::nonexistence_proven)
        << "rho = " << rho;
    expect_certified(s, v);
    ++checked;
  }
  EXPECT_GE(checked, 190);
}

TEST(Analyze, HurwitzModeHasCommonLyapunovFunction) {
  const PolytopicSystem s{{Matrix::from_rows({{-1.0, 2.0}, {0.0, -3.0}})}, std::nullopt, std::nullopt};
  const Verdict v = analyze(s, Analysis::ct_cqlf);
  EXPECT_EQ(v.outcome, Outcome::existence_proven);
  expect_certified(s, v);
}

TEST(Analyze, RotationHasNoStrictLyapunovFunction) {
  const PolytopicSystem s{{Matrix::from_rows({{0.0, 1.0}, {-1.0, 0.0}})}, std::nullopt, std::nullopt};
  const Verdict v = analyze(s, Analysis::ct_cqlf);
  EXPECT_EQ(v.outcome, Outcome::nonexistence_proven);
  expect_certified(s, v);

  NonexistenceCertificate manual;
  manual.analysis = Analysis::ct_cqlf;
  manual.mode_weights = {SymMatrix::identity(2)};
  manual.r0 = SymMatrix::zero(2);
  manual.normalization = 2.0;
  EXPECT_TRUE(verify_nonexistence(s, manual).passed);
}

TEST(Analyze, CtPairWithoutCommonLyapunovFunction) {
  const PolytopicSystem s{{Matrix::from_rows({{-0.1, 1.0}, {-10.0, -0.1}}),
                           Matrix::from_rows({{-0.1, 10.0}, {-1.0, -0.1}})},
                          std::nullopt,
                          std::nullopt};
  const Verdict v = analyze(s, Analysis::ct_cqlf);
  EXPECT_EQ(v.outcome, Outcome::nonexistence_proven);
  expect_certified(s, v);
}

TEST(Analyze, VertexOrderDoesNotChangeOutcome) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 40; ++trial) {
    PolytopicSystem s = random_system(rng, 2, 2, 1.0);
    const Verdict a = analyze(s, Analysis::stability);
    std::swap(s.vertices[0], s.vertices[1]);
    const Verdict b = analyze(s, Analysis::stability);
    EXPECT_EQ(a.outcome, b.outcome) << "trial " << trial;
  }
}

TEST(Analyze, ContractionPreservesExistence) {
  std::mt19937_64 rng(54);
  int seen = 0;
  for (int trial = 0; trial < 60 && seen < 15; ++trial) {
    const PolytopicSystem s = random_system(rng, 2, 2, 0.8);
    if (analyze(s, Analysis::stability).outcome != Outcome::existence_proven) continue;
    ++seen;
    for (double lambda : {0.9, 0.5, -0.7}) {
      PolytopicSystem t = s;
      for (auto& a : t.vertices) a = lambda * a;
      EXPECT_EQ(analyze(t, Analysis::stability).outcome, Outcome::existence_proven)
          << "trial " << trial << " lambda " << lambda;
    }
  }
  EXPECT_GE(seen, 10);
}

TEST(Analyze, AlternativesAreMutuallyExclusive) {
  std::mt19937_64 rng(55);
  AnalyzeOptions opts;
  for (int trial = 0; trial < 60; ++trial) {
    const PolytopicSystem s = random_system(rng, 2, 2, 1.5);
    const Verdict v = analyze(s, Analysis::stability, opts);
    SolveOptions other;
    other.max_iters = 20000;
    if (v.outcome == Outcome::existence_proven) {
      const SolveResult d = solve(build(s, Analysis::stability, Side::dual), other);
      EXPECT_FALSE(verify_nonexistence(s, nonexistence_from(s, Analysis::stability, d)).passed);
    } else if (v.outcome == Outcome::nonexistence_proven) {
      const SolveResult p = solve(build(s, Analysis::stability, Side::primal), other);
      EXPECT_FALSE(verify_existence(s, existence_from(s, Analysis::stability, p)).passed);
    }
  }
}

TEST(Analyze, DeterministicCertificates) {
  const PolytopicSystem s = daafouz_system();
  const Verdict a = analyze(s, Analysis::stability);
  const Verdict b = analyze(s, Analysis::stability);
  ASSERT_TRUE(a.nonexistence && b.nonexistence);
  EXPECT_EQ(a.nonexistence->blocks, b.nonexistence->blocks);
}
