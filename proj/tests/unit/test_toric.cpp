// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#include <gtest/gtest.h>

#include "clhgibbs/algebra.hpp"
#include "clhgibbs/csampler.hpp"
#include "clhgibbs/toric.hpp"
#include "test_support.hpp"

using namespace clhgibbs;
using namespace clhgibbs::testing;

namespace {

// Group index of a qubit in the map.
int group_of(const ToricClassicalMap& m, SiteId q) {
  for (size_t g = 0; g < m.groups.size(); ++g)
    for (SiteId s : m.groups[g])
      if (s == q) return static_cast<int>(g);
  return -1;
}

const ToricTermMap& term_map(const ToricClassicalMap& m, TermId id) {
  for (const ToricTermMap& t : m.terms)
    if (t.term == id) return t;
  throw std::runtime_error("term not kept");
}

}  // namespace

TEST(VirtualBasis, ColumnsAreOrthonormal) {
  const VirtualBasis b = virtual_basis(10, 11, 12, 13);
  EXPECT_EQ(b.dim(), 16);
  EXPECT_LT((b.unitary.adjoint() * b.unitary - Mat::Identity(16, 16)).norm(), 1e-12);
}

TEST(VirtualBasis, StabilizersBecomeVirtualZ) {
  const VirtualBasis b = virtual_basis(0, 1, 2, 3);
  ASSERT_EQ(b.stabilizers.size(), 4u);
  EXPECT_EQ(b.stabilizers[0].letters({0, 1, 2, 3}), "ZZZZ");
  EXPECT_EQ(b.stabilizers[1].letters({0, 1, 2, 3}), "XXII");
  EXPECT_EQ(b.stabilizers[2].letters({0, 1, 2, 3}), "IXXI");
  EXPECT_EQ(b.stabilizers[3].letters({0, 1, 2, 3}), "IIXX");
  for (int i = 0; i < 4; ++i) {
    const Mat s = b.stabilizers[i].to_dense(b.qubits);
    const Mat c = b.unitary.adjoint() * s * b.unitary;
    for (int col = 0; col < 16; ++col) {
      const double expect = (col & b.bit(i)) ? -1.0 : 1.0;
      for (int row = 0; row < 16; ++row) EXPECT_NEAR(std::abs(c(row, col) - (row == col ? expect : 0.0)), 0.0, 1e-10);
    }
  }
}

TEST(VirtualBasis, DestabilizersPairWithTheirStabilizerOnly) {
  const VirtualBasis b = virtual_basis(0, 1, 2, 3);
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) EXPECT_EQ(b.destabilizers[i].commutes_with(b.stabilizers[j]), i != j);
}

TEST(VirtualBasis, AllPlusStateIsEvenWeightSuperposition) {
  const VirtualBasis b = virtual_basis(0, 1, 2, 3);
  Vec psi = Vec::Zero(16);
  for (int k = 0; k < 16; ++k)
    if (__builtin_popcount(k) % 2 == 0) psi(k) = 1.0 / std::sqrt(8.0);
  EXPECT_NEAR(std::abs(psi.dot(b.unitary.col(0))), 1.0, 1e-12);
}

TEST(VirtualBasis, XuXtauIsProductOfLastThreeStabilizers) {
  const VirtualBasis b = virtual_basis(0, 1, 2, 3);
  const PauliString xuxt = PauliString::from_letters({0, 3}, "XX");
  const auto m = stabilizer_mask(b, xuxt);
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->first, b.bit(1) | b.bit(2) | b.bit(3));
  EXPECT_EQ(m->second, 1);
  EXPECT_EQ(b.stabilizers[1] * b.stabilizers[2] * b.stabilizers[3], xuxt);
  EXPECT_FALSE(stabilizer_mask(b, PauliString::single(0, Pauli::X)).has_value());
}

TEST(StabilizerBasis, RejectsDependentStabilizers) {
  const PauliString z0 = PauliString::single(0, Pauli::Z);
  const PauliString x0 = PauliString::single(0, Pauli::X);
  EXPECT_THROW(stabilizer_basis({0}, {z0, z0}, {x0, x0}), ValidationError);
}

TEST(ToricClassicalize, WhiteTermReadsFirstVirtualBit) {
  const CommutingHamiltonian h = build_defected_toric(4, {{0, 0.7}}, Topology::plane);
  const ToricClassicalMap m = toric_classicalize(h, plan_removal(h));
  const ToricTermMap& t = term_map(m, 0);
  ASSERT_EQ(t.parts.size(), 1u);
  EXPECT_EQ(t.parts[0].second, 8);  // bit of virtual qubit 1
  EXPECT_DOUBLE_EQ(t.coeff, 0.7);
  SpinConfig y(m.groups.size(), 0);
  EXPECT_DOUBLE_EQ(t.value(y), 0.7);
  y[t.parts[0].first] = 8;
  EXPECT_DOUBLE_EQ(t.value(y), -0.7);
}

TEST(ToricClassicalize, BlackTermOrientations) {
  const CommutingHamiltonian h = build_defected_toric(4, {}, Topology::plane);
  const Lattice2D& lat = *h.lattice;
  const ToricClassicalMap m = toric_classicalize(h, plan_removal(h));
  const VirtualBasis& any = m.bases[0];
  // Horizontal black (1,0) between white (0,0) and (2,0): Z3 on left, Z2Z3Z4 on right.
  const ToricTermMap& hz = term_map(m, lat.site(1, 0));
  std::map<int, int> parts(hz.parts.begin(), hz.parts.end());
  EXPECT_EQ(parts.at(group_of(m, lat.site(0, 0))), any.bit(2));
  EXPECT_EQ(parts.at(group_of(m, lat.site(2, 0))), any.bit(1) | any.bit(2) | any.bit(3));
  // Vertical black (0,1) between white (0,0) below and (0,2) above: Z2 below, Z4 above.
  const ToricTermMap& vt = term_map(m, lat.site(0, 1));
  parts = std::map<int, int>(vt.parts.begin(), vt.parts.end());
  EXPECT_EQ(parts.at(group_of(m, lat.site(0, 0))), any.bit(1));
  EXPECT_EQ(parts.at(group_of(m, lat.site(0, 2))), any.bit(3));
}

TEST(ToricClassicalize, StatesAreEigenvectorsOfKeptTerms) {
  const CommutingHamiltonian h = build_defected_toric(3, {{0, 0.4}, {1, -1.3}, {3, 0.9}}, Topology::plane);
  const RemovalPlan plan = plan_removal(h);
  const ToricClassicalMap m = toric_classicalize(h, plan);
  ASSERT_EQ(m.groups.size(), 4u);
  Mat kept = Mat::Zero(512, 512);
  for (TermId id : plan.kept) kept += h.embedded(h.term(id));
  const long long n = m.classical.num_configs();
  for (long long i = 0; i < n; i += 7) {
    const SpinConfig y = config_from_index(i, m.classical.dims());
    const Vec phi = m.state(y);
    EXPECT_NEAR(phi.norm(), 1.0, 1e-12);
    EXPECT_LT((kept * phi - m.energy(y) * phi).norm(), 1e-10);
    EXPECT_NEAR(m.energy(y), m.classical.energy(y), 1e-12);
  }
}

TEST(ToricClassicalize, SymbolicReconstructionOnL5) {
  // Each kept Pauli restricted to its groups has expectation +-1 on every
  // product basis state, and the sign matches lambda_p(y) / c_p.
  const CommutingHamiltonian h = build_defected_toric(5, {}, Topology::plane);
  const RemovalPlan plan = plan_removal(h);
  const ToricClassicalMap m = toric_classicalize(h, plan);
  for (const ToricTermMap& t : m.terms) {
    const LocalTerm& term = h.term(t.term);
    std::vector<int> groups;
    for (SiteId q : term.support) {
      const int g = group_of(m, q);
      if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
    }
    ASSERT_LE(groups.size(), 2u);
    std::vector<Mat> local;
    for (int g : groups) {
      PauliString r;
      for (const auto& [q, letter] : term.pauli->factors())
        if (group_of(m, q) == g) r *= PauliString::single(q, letter);
      local.push_back(r.to_dense(m.bases[g].qubits));
    }
    const int d0 = m.bases[groups[0]].dim();
    const int d1 = groups.size() > 1 ? m.bases[groups[1]].dim() : 1;
    for (int a = 0; a < d0; ++a)
      for (int b = 0; b < d1; ++b) {
        SpinConfig y(m.groups.size(), 0);
        y[groups[0]] = a;
        double expect = (m.bases[groups[0]].unitary.col(a).adjoint() * local[0] * m.bases[groups[0]].unitary.col(a))(0, 0).real();
        if (groups.size() > 1) {
          y[groups[1]] = b;
          expect *= (m.bases[groups[1]].unitary.col(b).adjoint() * local[1] * m.bases[groups[1]].unitary.col(b))(0, 0).real();
        }
        ASSERT_NEAR(std::abs(expect), 1.0, 1e-10);
        ASSERT_NEAR(term.coeff * term.pauli->phase_value().real() * expect, t.value(y), 1e-10) << "term " << t.term;
      }
  }
}

TEST(ToricClassicalize, AgreesWithGenericClassicalization) {
  const CommutingHamiltonian h = build_defected_toric(3, {{0, 0.5}, {1, -0.8}, {3, 1.1}}, Topology::plane);
  const RemovalPlan plan = plan_removal(h);
  const ToricClassicalMap m = toric_classicalize(h, plan);
  const Classicalization generic = classicalize_2local(group_hamiltonian(h, plan));
  for (double beta : {0.3, 1.7}) {
    std::vector<double> a = exact_distribution(m.classical, beta).probs;
    std::vector<double> b = exact_distribution(generic.classical, beta).probs;
    ASSERT_EQ(a.size(), b.size());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double tv = 0.0;
    for (size_t i = 0; i < a.size(); ++i) tv += 0.5 * std::abs(a[i] - b[i]);
    EXPECT_LT(tv, 1e-12);
  }
}
