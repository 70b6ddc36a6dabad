// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#ifndef CLHGIBBS_TORIC_HPP
#define CLHGIBBS_TORIC_HPP

#include <optional>
#include <utility>
#include <vector>

#include "clhgibbs/classical.hpp"
#include "clhgibbs/reduction.hpp"

namespace clhgibbs {

// Basis of a qubit group adapted to k independent commuting Hermitian Pauli
// stabilizers. Column b of `unitary` is T_1^{b_1} ... T_k^{b_k} |0*>, where
// |0*> is the joint +1 eigenvector and b_1 is the most significant bit, so
// S_i has eigenvalue (-1)^{b_i} on column b.
struct VirtualBasis {
  std::vector<SiteId> qubits;  // tensor order of `unitary` rows
  std::vector<PauliString> stabilizers;
  std::vector<PauliString> destabilizers;  // T_i anti-commutes with S_i only
  Mat unitary;

  int dim() const { return static_cast<int>(unitary.cols()); }
  // Bit of virtual qubit i (0-based) inside a basis index.
  int bit(int i) const { return 1 << (static_cast<int>(stabilizers.size()) - 1 - i); }
};

VirtualBasis stabilizer_basis(std::vector<SiteId> qubits, std::vector<PauliString> stabilizers,
                              std::vector<PauliString> destabilizers);

// Plaquette basis with S1 = Z^p, S2 = X_u X_v, S3 = X_v X_w, S4 = X_w X_tau
// and qubit order u, v, w, tau.
VirtualBasis virtual_basis(SiteId u, SiteId v, SiteId w, SiteId tau);

// p = sign * prod_i S_i^{m_i}; returns (mask, sign) with mask bits as in
// VirtualBasis::bit, or nothing if p is not in the stabilizer group.
std::optional<std::pair<int, int>> stabilizer_mask(const VirtualBasis& basis, const PauliString& p);

// lambda_p(y) = coeff * prod over parts of (-1)^{popcount(mask & y_site)}.
struct ToricTermMap {
  TermId term = 0;
  double coeff = 0.0;  // c_p times the stabilizer sign
  std::vector<std::pair<int, int>> parts;  // (classical site, mask)

  int sign(const SpinConfig& y) const;
  double value(const SpinConfig& y) const { return coeff * sign(y); }
};

struct ToricClassicalMap {
  ClassicalHamiltonian classical;
  std::vector<std::vector<SiteId>> groups;  // plan groups, classical site order
  std::vector<VirtualBasis> bases;          // one per group
  std::vector<ToricTermMap> terms;          // kept terms, plan order

  double energy(const SpinConfig& y) const;
  // |phi(y)> over the ascending qubits of all groups; dense, small cases.
  Vec state(const SpinConfig& y) const;
};

// Classical Hamiltonian of the kept terms of a removal plan, over virtual
// qubit configurations of the grouped sites.
ToricClassicalMap toric_classicalize(const CommutingHamiltonian& h, const RemovalPlan& plan);

}  // namespace clhgibbs

#endif  // CLHGIBBS_TORIC_HPP
