// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#include <gtest/gtest.h>

#include <filesystem>

#include "clhgibbs/model.hpp"
#include "clhgibbs/model_io.hpp"
#include "test_support.hpp"

using namespace clhgibbs;

namespace {

int count_color(const CommutingHamiltonian& h, Color c) {
  int n = 0;
  for (const LocalTerm& t : h.terms) n += t.color == c;
  return n;
}

}  // namespace

TEST(Lattice, PlaquetteVerticesAreNwNeSeSw) {
  const Lattice2D lat = make_lattice(4, Topology::plane);
  const Plaquette* p = lat.plaquette(lat.site(1, 2));
  ASSERT_NE(p, nullptr);
  EXPECT_EQ(p->verts[0], lat.site(1, 3));  // NW
  EXPECT_EQ(p->verts[1], lat.site(2, 3));  // NE
  EXPECT_EQ(p->verts[2], lat.site(2, 2));  // SE
  EXPECT_EQ(p->verts[3], lat.site(1, 2));  // SW
  EXPECT_EQ(p->color, Color::black);       // x + y odd
  EXPECT_EQ(lat.plaquette(0)->color, Color::white);
}

TEST(Lattice, TorusWrapsVertices) {
  const Lattice2D lat = make_lattice(4, Topology::torus);
  const Plaquette* p = lat.plaquette(lat.site(3, 3));
  ASSERT_NE(p, nullptr);
  EXPECT_EQ(p->verts[0], lat.site(3, 0));
  EXPECT_EQ(p->verts[1], lat.site(0, 0));
  EXPECT_EQ(p->verts[2], lat.site(0, 3));
}

TEST(DefectedToric, TermCountsPerTopology) {
  EXPECT_EQ(build_defected_toric(5, {}, Topology::plane).terms.size(), 16u);
  EXPECT_EQ(build_defected_toric(3, {}, Topology::plane).terms.size(), 4u);
  const CommutingHamiltonian t = build_defected_toric(4, {}, Topology::torus);
  EXPECT_EQ(t.terms.size(), 16u);
  EXPECT_EQ(count_color(t, Color::white), 8);
  const CommutingHamiltonian p = build_defected_toric(6, {}, Topology::punctured);
  EXPECT_EQ(p.terms.size(), 34u);
  EXPECT_EQ(count_color(p, Color::white), 17);
}

TEST(DefectedToric, WhiteIsZAndBlackIsX) {
  const CommutingHamiltonian h = build_defected_toric(4, {}, Topology::plane);
  for (const LocalTerm& t : h.terms) {
    const std::string letters = t.pauli->letters(t.support);
    EXPECT_EQ(letters, t.color == Color::white ? "ZZZZ" : "XXXX");
    EXPECT_DOUBLE_EQ(t.coeff, -1.0);
  }
}

TEST(DefectedToric, CoefficientsAreHonored) {
  const CommutingHamiltonian h = build_defected_toric(4, {{5, 0.25}, {0, -2.0}}, Topology::torus, 0.5);
  EXPECT_DOUBLE_EQ(h.term(5).coeff, 0.25);
  EXPECT_DOUBLE_EQ(h.term(0).coeff, -2.0);
  EXPECT_DOUBLE_EQ(h.term(1).coeff, 0.5);
  EXPECT_THROW(build_defected_toric(4, {{99, 1.0}}, Topology::torus), ValidationError);
  EXPECT_THROW(build_defected_toric(4, {{3, 0.0}}, Topology::torus), ValidationError);
}

TEST(DefectedToric, AllTopologiesCommute) {
  for (Topology top : {Topology::plane, Topology::torus, Topology::punctured})
    for (int L : {4, 6}) {
      const CommutingHamiltonian h = build_defected_toric(L, {}, top);
      EXPECT_TRUE(verify_commuting(h).ok) << topology_name(top) << " L=" << L;
    }
  EXPECT_TRUE(verify_commuting(build_defected_toric(5, {}, Topology::plane)).ok);
}

TEST(DefectedToric, OddPeriodicLatticeIsRejected) {
  EXPECT_THROW(build_defected_toric(3, {}, Topology::torus), ValidationError);
  EXPECT_THROW(build_defected_toric(5, {}, Topology::punctured), ValidationError);
}

TEST(DefectedToric, PuncturedDefaultsRemoveFirstWhiteAndBlack) {
  const CommutingHamiltonian h = build_defected_toric(4, {}, Topology::punctured);
  EXPECT_EQ(h.lattice->missing_white, 0);
  EXPECT_EQ(h.lattice->missing_black, 1);
  EXPECT_THROW(h.term(0), ValidationError);
  EXPECT_THROW(build_defected_toric(4, {}, Topology::punctured, -1.0, 1, 0), ValidationError);
}

TEST(Ising, BuildersProduceDiagonalTerms) {
  const CommutingHamiltonian h1 = build_ising1d(8, 1.0);
  EXPECT_EQ(h1.terms.size(), 7u);
  const CommutingHamiltonian h2 = build_ising2d(3, -1.0, 0.2);
  EXPECT_EQ(h2.terms.size(), 18u + 9u);
  const Mat d = h2.dense();
  EXPECT_LT((d - Mat(d.diagonal().asDiagonal())).norm(), 1e-14);
}

TEST(Ising, DenseMatchesLiteralAssembly) {
  const CommutingHamiltonian h = build_ising1d(4, 0.7, -0.3, true);
  EXPECT_LT((h.dense() - clhgibbs::testing::dense_from_letters(h)).norm(), 1e-12);
}

TEST(CoarseGrain, PreservesSpectrumAndBecomesTwoLocal) {
  const CommutingHamiltonian h = build_ising1d(6, 0.8, 0.3);
  const CommutingHamiltonian g = coarse_grain_1d(h, 2);
  EXPECT_EQ(g.site_dims.size(), 3u);
  for (const LocalTerm& t : g.terms) EXPECT_LE(t.support.size(), 2u);
  // Grouping consecutive qubits keeps the tensor order, so H is unchanged.
  EXPECT_LT((g.dense() - h.dense()).norm(), 1e-12);
  EXPECT_THROW(coarse_grain_1d(h, 4), ValidationError);
}

TEST(ModelIo, JsonRoundTripIsStructurallyEqual) {
  for (Topology top : {Topology::plane, Topology::torus, Topology::punctured}) {
    const CommutingHamiltonian h = build_defected_toric(4, {{2, 0.3}}, top);
    const CommutingHamiltonian back = hamiltonian_from_json(hamiltonian_to_json(h));
    EXPECT_TRUE(structurally_equal(h, back));
  }
  CommutingHamiltonian dense;
  dense.site_dims = {{0, 3}, {1, 2}};
  Rng rng(1);
  dense.terms.push_back(LocalTerm::make_dense(0, {0, 1}, random_hermitian(6, rng)));
  EXPECT_TRUE(structurally_equal(dense, hamiltonian_from_json(hamiltonian_to_json(dense))));
}

TEST(ModelIo, FileRoundTrip) {
  const std::string path = (std::filesystem::temp_directory_path() / "clhgibbs_model_io.json").string();
  const CommutingHamiltonian h = build_ising1d(5, 1.0, 0.5);
  serialize_hamiltonian(h, path);
  EXPECT_TRUE(structurally_equal(h, parse_hamiltonian(path)));
  std::filesystem::remove(path);
}

TEST(ModelIo, MalformedInputIsRejected) {
  using nlohmann::json;
  const json no_sites = {{"terms", json::array()}};
  EXPECT_THROW(hamiltonian_from_json(no_sites), ValidationError);
  json j = hamiltonian_to_json(build_ising1d(3, 1.0));
  j["terms"][0]["support"] = {0, 7};
  EXPECT_THROW(hamiltonian_from_json(j), ValidationError);
  j = hamiltonian_to_json(build_ising1d(3, 1.0));
  j["terms"][0]["coeff"] = 0.0;
  EXPECT_THROW(hamiltonian_from_json(j), ValidationError);
  j = hamiltonian_to_json(build_ising1d(3, 1.0));
  j["terms"][1]["id"] = 0;
  EXPECT_THROW(hamiltonian_from_json(j), ValidationError);
}

TEST(ModelValidation, NonHermitianDenseTermIsRejected) {
  CommutingHamiltonian h;
  h.site_dims = {{0, 2}};
  Mat m(2, 2);
  m << 0, 1, 0, 0;
  h.terms.push_back(LocalTerm::make_dense(0, {0}, m));
  EXPECT_THROW(h.validate(), ValidationError);
}

TEST(Commutation, DetectsAnticommutingPair) {
  CommutingHamiltonian h;
  h.site_dims = {{0, 2}, {1, 2}};
  h.terms.push_back(LocalTerm::make_pauli(0, {0, 1}, "XZ", 1.0));
  h.terms.push_back(LocalTerm::make_pauli(1, {0}, "Z", 1.0));
  const CommutationReport r = verify_commuting(h);
  ASSERT_FALSE(r.ok);
  EXPECT_NEAR(r.violations[0].norm, 4.0, 1e-12);  // ||[XZ, ZI]||_F = 2 * sqrt(4)
}
