// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#ifndef CLHGIBBS_QSIM_HPP
#define CLHGIBBS_QSIM_HPP

#include <map>
#include <optional>
#include <vector>

#include "clhgibbs/model.hpp"

namespace clhgibbs {

// ---------------------------------------------------------------- dense

struct DensityMatrixState {
  std::vector<SiteId> sites;  // tensor order, first most significant
  std::vector<int> dims;
  Mat rho;

  int position(SiteId s) const;
  Mat embed(const Mat& local, const std::vector<SiteId>& support) const;
};

// Refuses total dimension above 4096.
DensityMatrixState exact_gibbs_state(const CommutingHamiltonian& h, double beta);
DensityMatrixState maximally_mixed_state(const CommutingHamiltonian& h);

struct MeasurementOutcome {
  TermId term = 0;
  double value = 0.0;  // eigenvalue of the term
  int sector = 0;      // index of the eigenvalue cluster, ascending
};

// Born-rule measurement, rho -> Pi rho Pi / tr. Eigenvalues of dense payloads
// are clustered with gap 1e-8.
MeasurementOutcome measure_term(DensityMatrixState& state, const LocalTerm& term, Rng& rng);

// rho -> P rho P^dagger.
void apply_pauli(DensityMatrixState& state, const PauliString& p);

// Spectral projectors of a term embedded in the state's space.
struct SpectralProjector {
  double value;
  Mat projector;
};
std::vector<SpectralProjector> term_projectors(const DensityMatrixState& space, const LocalTerm& term);

double trace_distance(const DensityMatrixState& a, const DensityMatrixState& b);

// Qubit-register fast paths for a Hermitian Pauli P on the space of `space`:
// P rho P and Pi rho Pi with Pi = (I + sign * P) / 2.
Mat pauli_conjugate(const DensityMatrixState& space, const Mat& rho, const PauliString& p);
Mat pauli_project(const DensityMatrixState& space, const Mat& rho, const PauliString& p, int sign);

// ---------------------------------------------------------------- frame

// Product relation: prod over `members` (ascending) of generators = sign * I.
struct FrameConstraint {
  std::vector<int> members;
  int sign = 1;
};

// Finds a basis of all product relations among `generators` by F2 linear
// algebra. Throws if some generators anti-commute or a relation has phase
// +-i.
std::vector<FrameConstraint> frame_relations(const std::vector<PauliString>& generators);

// Joint eigenvalue record over commuting Hermitian Pauli generators.
class PauliFrameState {
 public:
  PauliFrameState() = default;
  PauliFrameState(std::vector<PauliString> generators, std::vector<FrameConstraint> constraints);

  const std::vector<PauliString>& generators() const { return generators_; }
  const std::vector<FrameConstraint>& constraints() const { return constraints_; }
  const std::vector<int>& eigenvalues() const { return eig_; }
  int eigenvalue(int generator) const { return eig_[generator]; }
  void set_eigenvalues(std::vector<int> eig);
  bool satisfies_constraints() const;

  // Index of a generator equal to p up to sign, or -1.
  int find_generator(const PauliString& p) const;

  // Eigenvalue (+-1) of the Hermitian Pauli p on the current sector; throws
  // ValidationError if p is not a signed product of generators.
  int readout(const PauliString& p) const;

  // Flips the eigenvalue of every generator anti-commuting with p.
  void apply_pauli(const PauliString& p);
  // Flips exactly the listed generators (precomputed anti-commutation).
  void flip(const std::vector<int>& indices) {
    for (int i : indices) eig_[i] = -eig_[i];
  }
  std::vector<int> anticommuting(const PauliString& p) const;

 private:
  std::vector<PauliString> generators_;
  std::vector<FrameConstraint> constraints_;
  std::vector<int> eig_;
  mutable std::map<std::vector<std::pair<int, int>>, std::vector<int>> decomposition_cache_;
};

// Uniform over eigenvalue vectors satisfying all product relations and the
// `fixed` assignments (generator index -> +-1).
PauliFrameState frame_initialize_mixed(const std::vector<PauliString>& generators,
                                       const std::vector<FrameConstraint>& constraints, Rng& rng,
                                       const std::map<int, int>& fixed = {});

// Frame over all terms of a Pauli Hamiltonian (generator i = normalized
// Pauli of term i).
std::vector<PauliString> hamiltonian_generators(const CommutingHamiltonian& h);

// Deterministic readout: value = coeff * eigenvalue.
MeasurementOutcome measure_term(const PauliFrameState& state, const LocalTerm& term);
void apply_pauli(PauliFrameState& state, const PauliString& p);

// ---------------------------------------------------------------- programs

// measure: record the outcome sign of `term`.
// apply: apply `pauli`.
// orc: measure `term` with eigenvalue lambda, then apply `pauli` with
//      probability exp(beta*lambda) / (exp(beta*lambda) + exp(-beta*lambda));
//      records the outcome sign and the branch bit.
struct ProgramOp {
  enum class Kind { measure, apply, orc };
  Kind kind = Kind::measure;
  int term = -1;  // index into the Hamiltonian's term list
  PauliString pauli;
  double beta = 0.0;
};

struct Program {
  std::vector<ProgramOp> ops;
};

// Trajectory record: +1/-1 for outcome signs, 0/1 for branch bits.
using Trajectory = std::vector<int>;

Trajectory run_program_dense(const Program& prog, const CommutingHamiltonian& h, DensityMatrixState state, Rng& rng);
Trajectory run_program_frame(const Program& prog, const CommutingHamiltonian& h, PauliFrameState state, Rng& rng);

double trajectory_tv(const std::map<Trajectory, long>& a, long na, const std::map<Trajectory, long>& b, long nb);

}  // namespace clhgibbs

#endif  // CLHGIBBS_QSIM_HPP
