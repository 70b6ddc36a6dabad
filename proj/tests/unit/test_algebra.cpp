// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#include <gtest/gtest.h>

#include "clhgibbs/algebra.hpp"
#include "clhgibbs/csampler.hpp"
#include "test_support.hpp"

using namespace clhgibbs;
using namespace clhgibbs::testing;

namespace {

// Sum over configurations of E(x) |psi(x)><psi(x)|.
Mat reconstruct(const Classicalization& cl) {
  const long long n = cl.classical.num_configs();
  Mat out;
  for (long long i = 0; i < n; ++i) {
    const SpinConfig x = config_from_index(i, cl.classical.dims());
    const Vec psi = cl.map.state(x);
    if (out.size() == 0) out = Mat::Zero(psi.size(), psi.size());
    out += cl.classical.energy(x) * psi * psi.adjoint();
  }
  return out;
}

bool is_in_span(const Mat& m, const std::vector<Mat>& basis) {
  Mat r = m;
  for (const Mat& b : basis) r -= b * (b.adjoint() * m).trace() / (b.adjoint() * b).trace();
  return r.norm() < 1e-8 * std::max(1.0, m.norm());
}

}  // namespace

TEST(InducedAlgebra, PauliTermsGiveCommutativePairs) {
  const LocalTerm zz = LocalTerm::make_pauli(0, {0, 1}, "ZX", 1.0);
  const std::map<SiteId, int> dims = {{0, 2}, {1, 2}};
  const InducedAlgebra a = induced_algebra(zz, 0, dims);
  EXPECT_EQ(a.basis.size(), 2u);
  EXPECT_FALSE(a.trivial);
  EXPECT_TRUE(is_in_span(literal('Z'), a.basis));
  EXPECT_FALSE(is_in_span(literal('X'), a.basis));
  const InducedAlgebra b = induced_algebra(zz, 1, dims);
  EXPECT_TRUE(is_in_span(literal('X'), b.basis));
}

TEST(InducedAlgebra, GenericTermGivesFullMatrixAlgebra) {
  Rng rng(3);
  const LocalTerm t = LocalTerm::make_dense(0, {0, 1}, random_hermitian(6, rng));
  const InducedAlgebra a = induced_algebra(t, 1, {{0, 2}, {1, 3}});
  EXPECT_EQ(a.basis.size(), 9u);
  EXPECT_EQ(algebra_center(a).size(), 1u);  // only the identity
}

TEST(InducedAlgebra, BasisIsHilbertSchmidtOrthonormal) {
  Rng rng(4);
  const InducedAlgebra a = generate_algebra(0, 4, {kron(literal('Z'), literal('I')), kron(literal('X'), literal('Z'))});
  for (size_t i = 0; i < a.basis.size(); ++i)
    for (size_t j = 0; j < a.basis.size(); ++j)
      EXPECT_NEAR(std::abs((a.basis[i].adjoint() * a.basis[j]).trace()), i == j ? 1.0 : 0.0, 1e-10);
  // ZI and XZ anti-commute; products close on {II, ZI, XZ, YZ}.
  EXPECT_EQ(a.basis.size(), 4u);
  EXPECT_EQ(algebra_center(a).size(), 1u);
}

TEST(AlgebraCenter, DirectSumHasTwoDimensionalCenter) {
  Mat p0 = Mat::Zero(3, 3);
  p0(0, 0) = 1.0;
  // Two non-commuting generators on the lower block give C (+) M_2.
  Mat m = Mat::Zero(3, 3), k = Mat::Zero(3, 3);
  m(1, 2) = m(2, 1) = 1.0;
  m(1, 1) = 0.3;
  k(1, 1) = 1.0;
  k(2, 2) = -1.0;
  const InducedAlgebra a = generate_algebra(0, 3, {p0, m, k});
  EXPECT_EQ(a.basis.size(), 5u);
  const std::vector<Mat> z = algebra_center(a);
  EXPECT_EQ(z.size(), 2u);
  for (const Mat& c : z)
    for (const Mat& b : a.basis) EXPECT_LT((c * b - b * c).norm(), 1e-9);
}

TEST(StructureDecompose, BlocksAreOrthonormalAndComplete) {
  Rng rng(5);
  for (const CommutingHamiltonian& h : {random_factor_instance(rng), random_direct_sum_instance(rng)}) {
    std::vector<InducedAlgebra> incident;
    for (const LocalTerm& t : h.terms) incident.push_back(induced_algebra(t, 1, h.site_dims));
    const BlockDecomposition d = structure_decompose(1, 4, incident);
    const Mat u = d.unitary();
    EXPECT_LT((u.adjoint() * u - Mat::Identity(4, 4)).norm(), 1e-9);
    int total = 0;
    for (const Block& b : d.blocks) {
      int prod = b.free_dim;
      for (int f : b.factor_dims) prod *= f;
      EXPECT_EQ(prod, b.block_dim());
      total += b.block_dim();
    }
    EXPECT_EQ(total, 4);
    for (int v = 0; v < 4; ++v) EXPECT_EQ(d.encode(d.decode(v)), v);
  }
}

TEST(StructureDecompose, FactorInstanceSplitsIntoTwoQubitFactors) {
  Rng rng(6);
  const CommutingHamiltonian h = random_factor_instance(rng);
  std::vector<InducedAlgebra> incident;
  for (const LocalTerm& t : h.terms) incident.push_back(induced_algebra(t, 1, h.site_dims));
  const BlockDecomposition d = structure_decompose(1, 4, incident);
  ASSERT_EQ(d.blocks.size(), 1u);
  EXPECT_EQ(d.blocks[0].factor_dims, (std::vector<int>{2, 2}));
}

TEST(StructureDecompose, DirectSumInstanceSplitsIntoTwoBlocks) {
  Rng rng(7);
  const CommutingHamiltonian h = random_direct_sum_instance(rng);
  std::vector<InducedAlgebra> incident;
  for (const LocalTerm& t : h.terms) incident.push_back(induced_algebra(t, 1, h.site_dims));
  const BlockDecomposition d = structure_decompose(1, 4, incident);
  ASSERT_EQ(d.blocks.size(), 2u);
  for (const Block& b : d.blocks) EXPECT_EQ(b.block_dim(), 2);
}

TEST(StructureDecompose, NonCommutingIncidentAlgebrasAreRejected) {
  const LocalTerm a = LocalTerm::make_pauli(0, {0, 1}, "ZZ", 1.0);
  const LocalTerm b = LocalTerm::make_pauli(1, {1, 2}, "XX", 1.0);
  const std::map<SiteId, int> dims = {{0, 2}, {1, 2}, {2, 2}};
  EXPECT_THROW(structure_decompose(1, 2, {induced_algebra(a, 1, dims), induced_algebra(b, 1, dims)}),
               ValidationError);
}

TEST(Classicalize2Local, ReconstructsHamiltonianOnSuite) {
  for (const CommutingHamiltonian& h : two_local_suite(2026)) {
    if (h.total_dim() > 256) continue;  // the reconstruction sum is O(d^3)
    const Classicalization cl = classicalize_2local(h);
    EXPECT_LT((reconstruct(cl) - h.dense()).norm(), 1e-8);
  }
}

TEST(Classicalize2Local, StatesAreOrthonormalProductStates) {
  Rng rng(8);
  const CommutingHamiltonian h = random_direct_sum_instance(rng);
  const Classicalization cl = classicalize_2local(h);
  const long long n = cl.classical.num_configs();
  ASSERT_EQ(n, h.total_dim());
  Mat g(n, n);
  std::vector<Vec> states;
  for (long long i = 0; i < n; ++i) states.push_back(cl.map.state(config_from_index(i, cl.classical.dims())));
  for (long long i = 0; i < n; ++i)
    for (long long j = 0; j < n; ++j) g(i, j) = states[i].dot(states[j]);
  EXPECT_LT((g - Mat::Identity(n, n)).norm(), 1e-9);
}

TEST(Classicalize2Local, ExactMixtureMatchesMatrixExponential) {
  Rng rng(9);
  for (const CommutingHamiltonian& h :
       {random_pauli_chain(rng, 4, true), random_conjugated_diagonal(rng, {2, 3, 2}, false),
        random_factor_instance(rng)}) {
    const Classicalization cl = classicalize_2local(h);
    for (double beta : {0.0, 0.7, 2.5}) {
      const GibbsDistribution d = exact_distribution(cl.classical, beta);
      EXPECT_LT(trace_norm_distance(cl.map.mixture(d.probs), gibbs_by_expm(h.dense(), beta)), 1e-9);
    }
  }
}

TEST(Classicalize2Local, DiagonalInputGivesIdentityMap) {
  const CommutingHamiltonian h = build_ising1d(4, -1.0, 0.3);
  const Classicalization cl = classicalize_2local(h);
  for (const BlockDecomposition& d : cl.map.decomps)
    EXPECT_LT((d.unitary() - Mat::Identity(2, 2)).norm(), 1e-12);
  // Value 0 is spin up, so the energy of all-zero is -J*(n-1) + h*n.
  EXPECT_NEAR(cl.classical.energy({0, 0, 0, 0}), -3.0 + 1.2, 1e-12);
}

TEST(Classicalize2Local, RejectsThreeSiteTerms) {
  CommutingHamiltonian h;
  h.site_dims = {{0, 2}, {1, 2}, {2, 2}};
  h.terms.push_back(LocalTerm::make_pauli(0, {0, 1, 2}, "ZZZ", 1.0));
  EXPECT_THROW(classicalize_2local(h), ValidationError);
}

TEST(QubitCases, NamesAndClassification) {
  const LocalTerm a = LocalTerm::make_pauli(0, {0, 1}, "IX", 0.5);
  const LocalTerm b = LocalTerm::make_pauli(1, {0, 1}, "YI", 0.5);
  const LocalTerm c = LocalTerm::make_pauli(2, {0, 1}, "XZ", 0.5);
  EXPECT_EQ(qubit_case_classify(a).kind, QubitCase::trivial_on_a);
  EXPECT_EQ(qubit_case_classify(b).kind, QubitCase::trivial_on_b);
  EXPECT_EQ(qubit_case_classify(c).kind, QubitCase::jointly_diagonal);
  EXPECT_EQ(qubit_case_name(QubitCase::jointly_diagonal), "jointly-diagonal");
  // XZ: basis on a diagonalizes X, descending eigenvalue first.
  const Mat ua = qubit_case_classify(c).ua;
  const Mat dx = ua.adjoint() * literal('X') * ua;
  EXPECT_NEAR(dx(0, 0).real(), 1.0, 1e-12);
  EXPECT_NEAR(dx(1, 1).real(), -1.0, 1e-12);
}

TEST(QubitCases, NonClhTermIsRejected) {
  // XX + ZZ induces the full matrix algebra on each qubit.
  Mat m = kron(literal('X'), literal('X')) + kron(literal('Z'), literal('Z'));
  EXPECT_THROW(qubit_case_classify(LocalTerm::make_dense(0, {0, 1}, m)), ValidationError);
}

TEST(QubitCases, ClassicalizationOfRotatedIsingMatchesOracle) {
  // ZZ couplings rotated by a fixed single-qubit unitary on every site.
  Rng rng(10);
  const Mat u = random_unitary(2, rng);
  CommutingHamiltonian h;
  for (int i = 0; i < 4; ++i) h.site_dims[i] = 2;
  const Mat uu = kron(u, u);
  const Mat zz = uu * kron(literal('Z'), literal('Z')) * uu.adjoint();
  for (int i = 0; i < 3; ++i) h.terms.push_back(LocalTerm::make_dense(i, {i, i + 1}, -0.8 * zz));
  h.terms.push_back(LocalTerm::make_dense(3, {0}, 0.4 * u * literal('Z') * u.adjoint()));
  const QubitClassicalization q = classicalize_qubit_2local(h);
  const GibbsDistribution d = exact_distribution(q.classical, 0.9);
  EXPECT_LT(trace_norm_distance(q.mixture(d.probs), gibbs_by_expm(h.dense(), 0.9)), 1e-9);
}
