// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#ifndef CLHGIBBS_REDUCTION_HPP
#define CLHGIBBS_REDUCTION_HPP

#include <optional>
#include <vector>

#include "clhgibbs/algebra.hpp"
#include "clhgibbs/csampler.hpp"
#include "clhgibbs/qsim.hpp"

namespace clhgibbs {

// ---------------------------------------------------------------- planning

struct RemovalPlan {
  std::vector<TermId> kept;
  std::vector<TermId> removed;              // correction order (row-major)
  std::vector<std::vector<SiteId>> groups;  // grouped qudit -> qubits, ascending
  bool torus = false;                       // handled by torus_sample instead

  // Group id = smallest qubit of the group.
  SiteId group_id(int g) const { return groups[g].front(); }
  int group_of(SiteId qubit) const;
};

// Throws OutOfScopeError naming the first site that carries at least two
// incident terms whose induced algebras all commute.
void check_no_classical_qubits(const CommutingHamiltonian& h);

// White terms on odd rows are removed; kept white plaquettes become 16-dim
// qudits and leftover qubits are grouped per kept black term.
RemovalPlan plan_removal(const CommutingHamiltonian& h);

// Sub-Hamiltonian on the same sites containing only the listed terms.
CommutingHamiltonian restrict_terms(const CommutingHamiltonian& h, const std::vector<TermId>& ids);

// Kept terms as dense terms on grouped qudits (qubits ascending within a
// group, first most significant).
CommutingHamiltonian group_hamiltonian(const CommutingHamiltonian& h, const RemovalPlan& plan);

// Permutes a state over `order` qubits into ascending qubit order.
Vec reorder_qubits(const Vec& psi, const std::vector<SiteId>& order);

// ---------------------------------------------------------------- corrections

struct CorrectionOperator {
  TermId term = 0;
  std::vector<SiteId> path;
  PauliString op;
};

// Shortest string (BFS over same-colour terms, edges in ascending vertex id)
// from p to a vertex contained in no other same-colour term. The result
// anti-commutes with exactly p among the terms of h.
CorrectionOperator find_correction(const CommutingHamiltonian& h, TermId p);

// Pauli term with nonzero coefficient, or dense term with spectrum {+c, -c}
// at equal multiplicity.
bool has_two_eigenvalues(const LocalTerm& t, double tol = 1e-9);

// ---------------------------------------------------------------- measure and correct

// Probability of applying the correction after observing eigenvalue lambda.
double correction_probability(double beta, double lambda);

void orc_step(DensityMatrixState& state, const LocalTerm& p, const CorrectionOperator& c, double beta, Rng& rng);
void orc_step(PauliFrameState& state, int term_index, double coeff, const std::vector<int>& flips, double beta,
              Rng& rng);

// Exact average of orc_step over outcomes and coin flips.
Mat orc_channel(const DensityMatrixState& space, const Mat& rho, const LocalTerm& p, const CorrectionOperator& c,
                double beta);

void orc_run(DensityMatrixState& state, const CommutingHamiltonian& h, const RemovalPlan& plan,
             const std::vector<CorrectionOperator>& corrections, double beta, Rng& rng);

struct IdentityReport {
  int terms = 0;
  int projectors = 0;
  double symmetry_residual = 0.0;  // max Frobenius
  double trace_residual = 0.0;     // max absolute
};

// Dense checks of the correction symmetry and trace balance for each term in
// `terms` against every joint eigenprojector of all other terms.
IdentityReport correction_identities(const CommutingHamiltonian& h, const std::vector<TermId>& terms);

// ---------------------------------------------------------------- samplers

// Per trajectory: +-1 eigenvalues of each term's Pauli, in term order.
using Syndrome = std::vector<int>;

// Uniform frame, then measure and obliviously correct every term in order.
// Trajectory t uses the stream stream_seed(seed, t).
std::vector<Syndrome> punctured_sample(const CommutingHamiltonian& h, double beta, long n_samples, uint64_t seed,
                                       int threads = 1);

struct TorusChainMap {
  Color color = Color::white;
  std::vector<int> order;      // term indices p_0..p_{k-1}
  std::vector<double> coeffs;  // c_i
  std::vector<CorrectionOperator> strings;  // string i flips p_{i-1} and p_i
  std::vector<std::vector<int>> flips;      // anti-commuting term indices
  ClassicalHamiltonian ring;   // sum_i c_i Z_i Z_{i+1}
};

TorusChainMap torus_chain_map(const CommutingHamiltonian& h, Color color);

struct TorusOptions {
  long burn_in = -1;   // sweeps per colour; default 100 k
  long thinning = 10;  // sweeps per colour between snapshots
  long n_samples = 0;
  uint64_t seed = 0;
};

std::vector<Syndrome> torus_sample(const CommutingHamiltonian& h, double beta, const TorusOptions& options);

// Product over colours of the parity-constrained Boltzmann weights; `terms`
// selects a subset of term indices (one colour). Entry index bit j set
// means eigenvalue -1 on terms[j] (first term most significant).
std::vector<double> syndrome_distribution(const CommutingHamiltonian& h, double beta, const std::vector<int>& terms,
                                          bool parity_constrained);

struct TwoLocalSample {
  Classicalization cl;
  std::vector<SpinConfig> samples;
  std::optional<GibbsDistribution> exact;  // set for the exact sampler
};

TwoLocalSample sample_2local(const CommutingHamiltonian& h2, double beta, const SampleOptions& options,
                             int chains = 1, int threads = 1);

// ---------------------------------------------------------------- dispatch

enum class Pathway { two_local, orc, torus };
std::string pathway_name(Pathway p);

enum class Backend { frame, dense };
Backend backend_from_name(const std::string& s);
std::string backend_name(Backend b);

struct GibbsOptions {
  SampleOptions classical;  // sampler for the classical stage
  Backend backend = Backend::frame;
  long torus_burn_in = -1;
  long torus_thinning = 10;
  int chains = 1;   // independent classical / torus chains (changes output)
  int threads = 1;  // parallelism only (never changes output)
};

struct GibbsRun {
  Pathway pathway = Pathway::two_local;
  std::optional<RemovalPlan> plan;
  std::vector<SiteId> classical_sites;  // two_local: columns of `configs`
  std::vector<SpinConfig> configs;      // two_local
  std::vector<TermId> term_ids;         // orc / torus: columns of `syndromes`
  std::vector<Syndrome> syndromes;      // orc / torus
};

GibbsRun sample_gibbs_clh(const CommutingHamiltonian& h, double beta, const GibbsOptions& options);

}  // namespace clhgibbs

#endif  // CLHGIBBS_REDUCTION_HPP
