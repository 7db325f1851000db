#include <gtest/gtest.h>

#include <random>

#include "cone_lpv/errors.hpp"
#include "cone_lpv/io.hpp"
#include "cone_lpv/model.hpp"
#include "test_support.hpp"

using namespace cone_lpv;
using namespace cone_lpv::testing_support;

TEST(FlatIndex, ColumnConvention) {
  EXPECT_EQ(flat_to_pair(1, 2), (VertexPair{1, 1}));
  EXPECT_EQ(flat_to_pair(2, 2), (VertexPair{2, 1}));
  EXPECT_EQ(flat_to_pair(3, 2), (VertexPair{1, 2}));
  EXPECT_EQ(flat_to_pair(4, 2), (VertexPair{2, 2}));
}

TEST(FlatIndex, RowConventionSwapsRoles) {
  EXPECT_EQ(flat_to_pair(2, 2, FlatConvention::row), (VertexPair{1, 2}));
  EXPECT_EQ(flat_to_pair(3, 2, FlatConvention::row), (VertexPair{2, 1}));
}

TEST(FlatIndex, Bijection) {
  for (int n = 1; n <= 6; ++n)
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) {
        EXPECT_EQ(flat_to_pair(pair_to_flat({i, j}, n), n), (VertexPair{i, j}));
        const int k = (j - 1) * n + i;
        EXPECT_EQ(pair_to_flat(flat_to_pair(k, n), n), k);
      }
}

TEST(FlatIndex, OutOfRangeThrows) {
  EXPECT_THROW(flat_to_pair(0, 2), ContractError);
  EXPECT_THROW(flat_to_pair(5, 2), ContractError);
  EXPECT_THROW(pair_to_flat({3, 1}, 2), ContractError);
}

TEST(Validate, WellFormed) { EXPECT_TRUE(validate(daafouz_system()).empty()); }

TEST(Validate, MismatchedVertex) {
  PolytopicSystem s = daafouz_system();
  s.vertices[1] = Matrix::identity(3);
  EXPECT_EQ(validate(s).size(), 1u);
}

TEST(Validate, BadInputMatrix) {
  PolytopicSystem s = daafouz_system();
  s.B = Matrix(3, 1);
  EXPECT_EQ(validate(s).size(), 1u);
}

TEST(Validate, NonFiniteAndEmpty) {
  PolytopicSystem s = daafouz_system();
  s.vertices[0](0, 0) = INFINITY;
  EXPECT_EQ(validate(s).size(), 1u);
  EXPECT_EQ(validate(PolytopicSystem{}).size(), 1u);
}

TEST(Supports, MissingMatricesAreContractErrors) {
  const PolytopicSystem s = daafouz_system();
  EXPECT_THROW(require_supports(s, Analysis::detectability), ContractError);
  EXPECT_THROW(require_supports(s, Analysis::stabilizability), ContractError);
  EXPECT_NO_THROW(require_supports(s, Analysis::stability));
  EXPECT_NO_THROW(require_supports(s, Analysis::ct_cqlf));
}

TEST(AnalysisNames, RoundTrip) {
  for (Analysis a : {Analysis::stability, Analysis::detectability, Analysis::stabilizability,
                     Analysis::ct_cqlf})
    EXPECT_EQ(parse_analysis(to_string(a)), a);
  EXPECT_EQ(parse_analysis("ct_cqlf"), Analysis::ct_cqlf);
  EXPECT_THROW(parse_analysis("controllability"), ContractError);
}

TEST(NonexistenceCertificate, ScaledTracksNormalization) {
  NonexistenceCertificate c;
  c.blocks.emplace(VertexPair{1, 1}, SymMatrix::identity(2));
  c.normalization = 2.0;
  const NonexistenceCertificate s = c.scaled(0.5);
  EXPECT_DOUBLE_EQ(s.total_trace(), 1.0);
  EXPECT_DOUBLE_EQ(s.normalization, 1.0);
}

TEST(Json, SystemRoundTripIsLossless) {
  std::mt19937_64 rng(31);
  PolytopicSystem s{{random_matrix(rng, 3, 3), random_matrix(rng, 3, 3)},
                    random_matrix(rng, 3, 2),
                    random_matrix(rng, 1, 3)};
  const io::json j = io::to_json(s);
  const PolytopicSystem back = io::system_from_json(io::json::parse(j.dump()));
  EXPECT_EQ(back.vertices, s.vertices);
  EXPECT_EQ(*back.B, *s.B);
  EXPECT_EQ(*back.C, *s.C);
}

TEST(Json, CertificateRoundTripIsLossless) {
  std::mt19937_64 rng(32);
  NonexistenceCertificate q;
  q.analysis = Analysis::stabilizability;
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) q.blocks.emplace(VertexPair{i, j}, random_psd(rng, 3));
  q.normalization = 0.37;
  const auto back = std::get<NonexistenceCertificate>(
      io::certificate_from_json(io::json::parse(io::to_json(q).dump()), 2));
  EXPECT_EQ(back.analysis, q.analysis);
  EXPECT_EQ(back.blocks, q.blocks);
  EXPECT_EQ(back.normalization, q.normalization);

  NonexistenceCertificate ct;
  ct.analysis = Analysis::ct_cqlf;
  ct.mode_weights = {random_psd(rng, 2), random_psd(rng, 2)};
  ct.r0 = random_psd(rng, 2);
  const auto ct_back = std::get<NonexistenceCertificate>(
      io::certificate_from_json(io::json::parse(io::to_json(ct).dump()), 2));
  EXPECT_EQ(ct_back.mode_weights, ct.mode_weights);
  EXPECT_EQ(*ct_back.r0, *ct.r0);

  const ExistenceCertificate p{Analysis::detectability, {random_psd(rng, 2), random_psd(rng, 2)}};
  const auto p_back = std::get<ExistenceCertificate>(
      io::certificate_from_json(io::json::parse(io::to_json(p).dump()), 2));
  EXPECT_EQ(p_back.analysis, p.analysis);
  EXPECT_EQ(p_back.matrices, p.matrices);
}

TEST(Json, FlatBlocksFollowIndexConvention) {
  io::json j = {{"analysis", "stability"},
                {"kind", "nonexistence"},
                {"blocks", {{{1.0}}, {{2.0}}, {{3.0}}, {{4.0}}}}};
  auto col = std::get<NonexistenceCertificate>(io::certificate_from_json(j, 2));
  EXPECT_EQ(col.blocks.at({2, 1})(0, 0), 2.0);
  j["index_convention"] = "row";
  auto row = std::get<NonexistenceCertificate>(io::certificate_from_json(j, 2));
  EXPECT_EQ(row.blocks.at({1, 2})(0, 0), 2.0);
  EXPECT_EQ(row.normalization, 1.0);
}

TEST(Json, MalformedInputsCarryFindings) {
  const io::json bad = {{"n_x", 2}, {"N", 2}, {"vertices", {{{1.0, 0.0}, {0.0, 1.0}}, {{1.0}}}}};
  try {
    io::system_from_json(bad);
    FAIL() << "expected InputError";
  } catch (const io::InputError& e) {
    EXPECT_FALSE(e.findings().empty());
  }
  EXPECT_THROW(io::system_from_json(io::json::parse(R"({"vertices": [[[1, 2]], [[1]]]})")), io::InputError);
  EXPECT_THROW(io::system_from_json(io::json::parse(R"({"N": 1})")), io::InputError);
  EXPECT_THROW(io::load_system("/nonexistent/system.json"), io::InputError);
}

TEST(Json, ShippedSystemsLoad) {
  const PolytopicSystem s = io::load_system(data_path("daafouz_counterexample.json"));
  EXPECT_EQ(s.vertices, daafouz_system().vertices);
  const PolytopicSystem b = io::load_system(data_path("lifted_system.json"));
  EXPECT_EQ(b.state_dim(), 4u);
  ASSERT_TRUE(b.B.has_value());
  EXPECT_EQ((*b.B)(1, 0), 1.0);
}
