// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#include <gtest/gtest.h>

#include <set>

#include "clhgibbs/reduction.hpp"
#include "clhgibbs/toric.hpp"
#include "test_support.hpp"

using namespace clhgibbs;
using namespace clhgibbs::testing;

namespace {

// Oracle: independent anti-commutation count over all terms.
std::vector<TermId> anticommuting_ids(const CommutingHamiltonian& h, const PauliString& p) {
  std::vector<TermId> out;
  for (const LocalTerm& t : h.terms)
    if (!t.pauli->commutes_with(p)) out.push_back(t.id);
  return out;
}

double minus_probability(double beta, double c) { return std::exp(beta * c) / (std::exp(beta * c) + std::exp(-beta * c)); }

// Parity-constrained Boltzmann weights over one colour, built by direct
// enumeration (independent of syndrome_distribution).
std::vector<double> constrained_oracle(const std::vector<double>& c, double beta) {
  const int k = static_cast<int>(c.size());
  std::vector<double> w(1u << k, 0.0);
  double z = 0.0;
  for (unsigned idx = 0; idx < w.size(); ++idx) {
    if (__builtin_popcount(idx) % 2) continue;
    double e = 0.0;
    for (int j = 0; j < k; ++j) e += c[j] * (((idx >> (k - 1 - j)) & 1) ? -1.0 : 1.0);
    w[idx] = std::exp(-beta * e);
    z += w[idx];
  }
  for (double& v : w) v /= z;
  return w;
}

}  // namespace

// ---------------------------------------------------------------- planning

TEST(PlanRemoval, L5PlaneRemovesOddRowWhiteTerms) {
  const CommutingHamiltonian h = build_defected_toric(5, {}, Topology::plane);
  const RemovalPlan plan = plan_removal(h);
  std::vector<TermId> expect;
  for (const Plaquette& p : h.lattice->plaquettes)
    if (p.color == Color::white && p.y % 2 == 1) expect.push_back(p.id);
  EXPECT_EQ(plan.removed, expect);
  EXPECT_EQ(plan.kept.size() + plan.removed.size(), h.terms.size());
  EXPECT_FALSE(plan.torus);
  int plaquette_groups = 0;
  for (const auto& g : plan.groups) plaquette_groups += g.size() == 4;
  EXPECT_EQ(plaquette_groups, 4);
  std::set<SiteId> covered;
  for (const auto& g : plan.groups) covered.insert(g.begin(), g.end());
  EXPECT_EQ(covered.size(), 25u);
}

TEST(PlanRemoval, KeptTermsAreTwoLocalUnderGrouping) {
  for (int L : {3, 4, 5, 6}) {
    const CommutingHamiltonian h = build_defected_toric(L, {}, Topology::plane);
    const RemovalPlan plan = plan_removal(h);
    for (TermId id : plan.kept) {
      std::set<int> g;
      for (SiteId q : h.term(id).support) g.insert(plan.group_of(q));
      EXPECT_LE(g.size(), 2u) << "L=" << L << " term " << id;
    }
  }
}

TEST(PlanRemoval, EvenPlaneTilesWithPlaquetteGroups) {
  const RemovalPlan plan = plan_removal(build_defected_toric(6, {}, Topology::plane));
  for (const auto& g : plan.groups) EXPECT_EQ(g.size(), 4u);
}

TEST(PlanRemoval, L3PlaneStillValid) {
  const CommutingHamiltonian h = build_defected_toric(3, {}, Topology::plane);
  const RemovalPlan plan = plan_removal(h);
  EXPECT_EQ(plan.removed, std::vector<TermId>{4});
  EXPECT_EQ(plan.groups.size(), 4u);
}

TEST(PlanRemoval, TorusDefersToTorusPathway) {
  const RemovalPlan plan = plan_removal(build_defected_toric(4, {}, Topology::torus));
  EXPECT_TRUE(plan.torus);
  EXPECT_TRUE(plan.removed.empty());
}

TEST(PlanRemoval, ClassicalQubitIsRejectedWithSiteId) {
  CommutingHamiltonian h;
  for (int i = 0; i < 3; ++i) h.site_dims[i] = 2;
  h.terms.push_back(LocalTerm::make_pauli(0, {0, 1}, "ZZ", 1.0));
  h.terms.push_back(LocalTerm::make_pauli(1, {1, 2}, "ZX", 1.0));
  try {
    check_no_classical_qubits(h);
    FAIL() << "expected OutOfScopeError";
  } catch (const OutOfScopeError& e) {
    EXPECT_NE(std::string(e.what()).find("site 1"), std::string::npos);
  }
}

TEST(PlanRemoval, DenseQuditClassicalSiteIsRejected) {
  CommutingHamiltonian h;
  h.site_dims = {{0, 2}, {1, 3}, {2, 2}};
  Mat d = Mat::Zero(3, 3);
  d(0, 0) = 1.0;
  d(2, 2) = -1.0;
  h.terms.push_back(LocalTerm::make_dense(0, {0, 1}, kron(literal('X'), d)));
  h.terms.push_back(LocalTerm::make_dense(1, {1, 2}, kron(d * d, literal('Z'))));
  EXPECT_THROW(check_no_classical_qubits(h), OutOfScopeError);
}

TEST(PlanRemoval, ToricLatticesHaveNoClassicalQubits) {
  for (Topology t : {Topology::plane, Topology::torus, Topology::punctured})
    EXPECT_NO_THROW(check_no_classical_qubits(build_defected_toric(4, {}, t)));
}

// ---------------------------------------------------------------- corrections

TEST(Corrections, EverySingleOutTheirTermOnL5) {
  const CommutingHamiltonian h = build_defected_toric(5, {{6, 0.3}}, Topology::plane);
  for (const LocalTerm& t : h.terms) {
    const CorrectionOperator c = find_correction(h, t.id);
    EXPECT_EQ(anticommuting_ids(h, c.op), std::vector<TermId>{t.id});
    const Pauli letter = t.color == Color::white ? Pauli::X : Pauli::Z;
    for (const auto& [q, l] : c.op.factors()) EXPECT_EQ(l, letter);
  }
}

TEST(Corrections, AdjacentToPunctureHasLengthOne) {
  const CommutingHamiltonian h = build_defected_toric(6, {}, Topology::punctured);
  const Lattice2D& lat = *h.lattice;
  // White (1,1) shares vertex (1,1) with the missing white plaquette (0,0).
  const CorrectionOperator c = find_correction(h, lat.site(1, 1));
  EXPECT_EQ(c.path.size(), 1u);
  EXPECT_EQ(c.op.weight(), 1u);
}

TEST(Corrections, BoundaryTermNeedsOneQubit) {
  const CommutingHamiltonian h = build_defected_toric(5, {}, Topology::plane);
  const Lattice2D& lat = *h.lattice;
  // White (1,3) touches the top boundary.
  EXPECT_EQ(find_correction(h, lat.site(1, 3)).op.weight(), 1u);
}

TEST(Corrections, TorusHasNoSingleTermCorrection) {
  const CommutingHamiltonian h = build_defected_toric(4, {}, Topology::torus);
  try {
    find_correction(h, 0);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("torus_sample"), std::string::npos);
  }
}

TEST(Corrections, PathsAreShortestOnPuncturedLattice) {
  // Distance in the same-colour term graph grows away from the puncture.
  const CommutingHamiltonian h = build_defected_toric(6, {}, Topology::punctured);
  const Lattice2D& lat = *h.lattice;
  EXPECT_LE(find_correction(h, lat.site(1, 1)).path.size(), find_correction(h, lat.site(3, 3)).path.size());
}

TEST(Corrections, TwoEigenvalueCheck) {
  EXPECT_TRUE(has_two_eigenvalues(LocalTerm::make_pauli(0, {0, 1}, "ZZ", 0.5)));
  Mat m = Mat::Zero(4, 4);
  m(0, 0) = m(1, 1) = 0.5;
  m(2, 2) = m(3, 3) = -0.5;
  EXPECT_TRUE(has_two_eigenvalues(LocalTerm::make_dense(1, {0, 1}, m)));
  m(3, 3) = 0.5;
  EXPECT_FALSE(has_two_eigenvalues(LocalTerm::make_dense(2, {0, 1}, m)));
}

// ---------------------------------------------------------------- channel

TEST(Orc, CorrectionProbabilityClosedForm) {
  EXPECT_DOUBLE_EQ(correction_probability(0.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(correction_probability(0.0, -3.0), 0.5);
  EXPECT_NEAR(correction_probability(0.7, -1.0), std::exp(-0.7) / (std::exp(-0.7) + std::exp(0.7)), 1e-15);
  EXPECT_NEAR(correction_probability(1000.0, 1.0), 1.0, 1e-15);
}

TEST(Orc, ChannelMapsGibbsOfKeptToGibbsOfAll) {
  const CommutingHamiltonian h = build_defected_toric(3, {{0, 0.6}, {1, -1.1}, {3, 0.8}, {4, -0.9}}, Topology::plane);
  const RemovalPlan plan = plan_removal(h);
  const CommutingHamiltonian kept = restrict_terms(h, plan.kept);
  const DensityMatrixState space = maximally_mixed_state(h);
  const LocalTerm& p = h.term(plan.removed[0]);
  const CorrectionOperator c = find_correction(h, p.id);
  for (double beta : {0.0, 0.5, 2.0}) {
    const Mat in = gibbs_by_expm(kept.dense(), beta);
    const Mat out = orc_channel(space, in, p, c, beta);
    EXPECT_LT(trace_norm_distance(out, gibbs_by_expm(h.dense(), beta)), 1e-9) << "beta " << beta;
  }
}

TEST(Orc, ChannelDoesNotIncreaseDistance) {
  const CommutingHamiltonian h = build_defected_toric(3, {}, Topology::plane);
  const RemovalPlan plan = plan_removal(h);
  const DensityMatrixState space = maximally_mixed_state(h);
  const LocalTerm& p = h.term(plan.removed[0]);
  const CorrectionOperator c = find_correction(h, p.id);
  const double beta = 0.8;
  const Mat target_in = gibbs_by_expm(restrict_terms(h, plan.kept).dense(), beta);
  const Mat target_out = orc_channel(space, target_in, p, c, beta);
  Rng rng(4);
  for (int trial = 0; trial < 3; ++trial) {
    Mat noise = random_hermitian(512, rng);
    noise -= noise.trace() / 512.0 * Mat::Identity(512, 512);
    const Mat perturbed = target_in + 1e-4 * noise / noise.norm();
    const double before = trace_norm_distance(perturbed, target_in);
    const double after = trace_norm_distance(orc_channel(space, perturbed, p, c, beta), target_out);
    EXPECT_LE(after, before + 1e-12);
  }
}

TEST(Orc, CorrectionIdentitiesOnL3Plane) {
  const CommutingHamiltonian h = build_defected_toric(3, {{1, 0.4}, {4, -1.7}}, Topology::plane);
  std::vector<TermId> all;
  for (const LocalTerm& t : h.terms) all.push_back(t.id);
  const IdentityReport r = correction_identities(h, all);
  EXPECT_EQ(r.terms, 4);
  EXPECT_EQ(r.projectors, 4 * 8);
  EXPECT_LT(r.symmetry_residual, 1e-9);
  EXPECT_LT(r.trace_residual, 1e-8);
}

TEST(Orc, EmptyRemovalLeavesStateUnchanged) {
  const CommutingHamiltonian h = build_defected_toric(3, {}, Topology::plane);
  RemovalPlan plan = plan_removal(h);
  plan.removed.clear();
  DensityMatrixState s = exact_gibbs_state(h, 0.4);
  const Mat before = s.rho;
  Rng rng(1);
  orc_run(s, h, plan, {}, 0.4, rng);
  EXPECT_EQ((s.rho - before).norm(), 0.0);
}

TEST(Orc, MissingCorrectionIsReported) {
  const CommutingHamiltonian h = build_defected_toric(3, {}, Topology::plane);
  const RemovalPlan plan = plan_removal(h);
  DensityMatrixState s = maximally_mixed_state(h);
  Rng rng(1);
  EXPECT_THROW(orc_run(s, h, plan, {}, 0.4, rng), ValidationError);
}

// ---------------------------------------------------------------- samplers

TEST(PuncturedSample, InfiniteTemperatureIsUniform) {
  const CommutingHamiltonian h = build_defected_toric(4, {}, Topology::punctured);
  const auto ss = punctured_sample(h, 0.0, 20000, 5);
  for (size_t j = 0; j < h.terms.size(); ++j) {
    double m = 0.0;
    for (const Syndrome& s : ss) m += s[j] < 0;
    EXPECT_NEAR(m / 20000.0, 0.5, 0.015);
  }
}

TEST(PuncturedSample, SingleTermMarginalMatchesClosedForm) {
  // c_p = 1, beta = 1: P(eigenvalue -1) = e / (e + 1/e) = 0.880797...
  const CommutingHamiltonian h = build_defected_toric(4, {}, Topology::plane, 1.0);
  const auto ss = punctured_sample(h, 1.0, 40000, 6);
  EXPECT_NEAR(minus_probability(1.0, 1.0), 0.8807970779778823, 1e-15);
  for (size_t j = 0; j < h.terms.size(); ++j) {
    double m = 0.0;
    for (const Syndrome& s : ss) m += s[j] < 0;
    EXPECT_NEAR(m / 40000.0, 0.8807970779778823, 0.01);
  }
}

TEST(PuncturedSample, ThreadCountDoesNotChangeOutput) {
  const CommutingHamiltonian h = build_defected_toric(4, {}, Topology::punctured);
  EXPECT_EQ(punctured_sample(h, 0.7, 500, 9, 1), punctured_sample(h, 0.7, 500, 9, 3));
}

TEST(PuncturedSample, RejectsTorus) {
  EXPECT_THROW(punctured_sample(build_defected_toric(4, {}, Topology::torus), 0.5, 10, 1), ValidationError);
}

TEST(TorusSample, ChainMapStringsFlipConsecutivePair) {
  const CommutingHamiltonian h = build_defected_toric(4, {}, Topology::torus);
  for (Color c : {Color::white, Color::black}) {
    const TorusChainMap m = torus_chain_map(h, c);
    const int k = static_cast<int>(m.order.size());
    ASSERT_EQ(k, 8);
    for (int i = 0; i < k; ++i) {
      std::vector<TermId> expect = {h.terms[m.order[(i + k - 1) % k]].id, h.terms[m.order[i]].id};
      std::sort(expect.begin(), expect.end());
      EXPECT_EQ(anticommuting_ids(h, m.strings[i].op), expect);
    }
  }
}

TEST(TorusSample, ParityHoldsAndInfiniteTemperatureIsUniform) {
  const CommutingHamiltonian h = build_defected_toric(4, {}, Topology::torus);
  TorusOptions o;
  o.n_samples = 20000;
  o.thinning = 2;
  o.seed = 3;
  const auto ss = torus_sample(h, 0.0, o);
  for (const Syndrome& s : ss) {
    int pw = 1, pb = 1;
    for (size_t j = 0; j < s.size(); ++j) (h.terms[j].color == Color::white ? pw : pb) *= s[j];
    ASSERT_EQ(pw, 1);
    ASSERT_EQ(pb, 1);
  }
  for (size_t j = 0; j < h.terms.size(); ++j) {
    double m = 0.0;
    for (const Syndrome& s : ss) m += s[j] < 0;
    EXPECT_NEAR(m / 20000.0, 0.5, 0.03);
  }
}

TEST(TorusSample, MatchesConstrainedBoltzmann) {
  std::map<TermId, double> coeffs;
  for (int i = 0; i < 16; ++i) coeffs[i] = -1.0 + 0.1 * (i % 5);
  const CommutingHamiltonian h = build_defected_toric(4, coeffs, Topology::torus);
  TorusOptions o;
  o.n_samples = 40000;
  o.thinning = 5;
  o.seed = 8;
  const double beta = 0.5;
  const auto ss = torus_sample(h, beta, o);
  for (Color col : {Color::white, Color::black}) {
    std::vector<int> idx;
    std::vector<double> c;
    for (size_t j = 0; j < h.terms.size(); ++j)
      if (h.terms[j].color == col) {
        idx.push_back(static_cast<int>(j));
        c.push_back(h.terms[j].coeff);
      }
    const std::vector<double> oracle = constrained_oracle(c, beta);
    const std::vector<double> lib = syndrome_distribution(h, beta, idx, true);
    for (size_t i = 0; i < oracle.size(); ++i) ASSERT_NEAR(lib[i], oracle[i], 1e-14);
    std::vector<double> emp(oracle.size(), 0.0);
    for (const Syndrome& s : ss) {
      unsigned k = 0;
      for (int j : idx) k = k * 2 + (s[j] < 0);
      emp[k] += 1.0 / ss.size();
    }
    double tv = 0.0;
    for (size_t i = 0; i < emp.size(); ++i) tv += 0.5 * std::abs(emp[i] - oracle[i]);
    // 128 allowed syndromes at 4e4 correlated samples.
    EXPECT_LT(tv, 0.04) << color_name(col);
  }
}

TEST(SyndromeDistribution, ProductFormWithoutConstraint) {
  const CommutingHamiltonian h = build_defected_toric(3, {{0, 0.3}, {1, -0.5}}, Topology::plane);
  const std::vector<double> d = syndrome_distribution(h, 0.9, {0, 1}, false);
  const double a = minus_probability(0.9, 0.3), b = minus_probability(0.9, -0.5);
  EXPECT_NEAR(d[0], (1 - a) * (1 - b), 1e-14);
  EXPECT_NEAR(d[1], (1 - a) * b, 1e-14);
  EXPECT_NEAR(d[3], a * b, 1e-14);
}

// ---------------------------------------------------------------- dispatch

TEST(Dispatch, IsingChainTakesTwoLocalPathway) {
  GibbsOptions o;
  o.classical.n_samples = 100;
  const GibbsRun r = sample_gibbs_clh(build_ising1d(6, -1.0), 0.5, o);
  EXPECT_EQ(r.pathway, Pathway::two_local);
  EXPECT_EQ(r.configs.size(), 100u);
  EXPECT_EQ(pathway_name(r.pathway), "two-local");
}

TEST(Dispatch, PlaneTakesCorrectionPathwayAndMatchesProductForm) {
  const CommutingHamiltonian h = build_defected_toric(4, {{0, 0.5}, {4, -0.7}}, Topology::plane);
  GibbsOptions o;
  o.classical.n_samples = 60000;
  o.classical.seed = 12;
  const double beta = 0.6;
  const GibbsRun r = sample_gibbs_clh(h, beta, o);
  EXPECT_EQ(r.pathway, Pathway::orc);
  ASSERT_TRUE(r.plan.has_value());
  for (size_t j = 0; j < h.terms.size(); ++j) {
    double m = 0.0;
    for (const Syndrome& s : r.syndromes) m += s[j] < 0;
    EXPECT_NEAR(m / 60000.0, minus_probability(beta, h.terms[j].coeff), 0.012) << "term " << h.terms[j].id;
  }
}

TEST(Dispatch, TorusRejectsDenseBackend) {
  GibbsOptions o;
  o.backend = Backend::dense;
  EXPECT_THROW(sample_gibbs_clh(build_defected_toric(4, {}, Topology::torus), 0.5, o), ValidationError);
}

TEST(Dispatch, DenseBackendAgreesWithExactSyndromeLaw) {
  const CommutingHamiltonian h = build_defected_toric(3, {{0, 0.5}, {1, -0.4}, {3, 0.9}, {4, -0.6}}, Topology::plane);
  GibbsOptions o;
  o.backend = Backend::dense;
  o.classical.kind = SamplerKind::exact;
  o.classical.n_samples = 600;
  o.classical.seed = 4;
  const double beta = 0.7;
  const GibbsRun r = sample_gibbs_clh(h, beta, o);
  const std::vector<double> exact = syndrome_distribution(h, beta, {0, 1, 2, 3}, false);
  std::vector<double> emp(16, 0.0);
  for (const Syndrome& s : r.syndromes) {
    int k = 0;
    for (int v : s) k = k * 2 + (v < 0);
    emp[k] += 1.0 / 600.0;
  }
  double tv = 0.0;
  for (int i = 0; i < 16; ++i) tv += 0.5 * std::abs(emp[i] - exact[i]);
  // 16 outcomes at 600 samples: expected TV about 0.05.
  EXPECT_LT(tv, 0.12);
}

TEST(Dispatch, ClassicalQubitsAreOutOfScope) {
  CommutingHamiltonian h;
  for (int i = 0; i < 4; ++i) h.site_dims[i] = 2;
  h.terms.push_back(LocalTerm::make_pauli(0, {0, 1, 2}, "ZZZ", 1.0));
  h.terms.push_back(LocalTerm::make_pauli(1, {1, 2, 3}, "ZZX", 1.0));
  EXPECT_THROW(sample_gibbs_clh(h, 0.5, GibbsOptions{}), OutOfScopeError);
}

TEST(Dispatch, NonCommutingInputIsRejected) {
  CommutingHamiltonian h;
  h.site_dims = {{0, 2}, {1, 2}};
  h.terms.push_back(LocalTerm::make_pauli(0, {0, 1}, "XZ", 1.0));
  h.terms.push_back(LocalTerm::make_pauli(1, {0}, "Z", 1.0));
  EXPECT_THROW(sample_gibbs_clh(h, 0.5, GibbsOptions{}), ValidationError);
}
