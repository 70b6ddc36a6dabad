// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#ifndef CLHGIBBS_PAULI_HPP
#define CLHGIBBS_PAULI_HPP

#include <map>
#include <string>
#include <vector>

#include "clhgibbs/core.hpp"

namespace clhgibbs {

enum class Pauli : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_letter(Pauli p);
Pauli pauli_from_letter(char c);

// phase * (tensor product of factors). Identity factors are never stored.
class PauliString {
 public:
  PauliString() = default;

  // Letters are assigned to `qubits` in order; 'I' entries are dropped.
  static PauliString from_letters(const std::vector<int>& qubits, const std::string& letters, int phase = 0);
  static PauliString single(int qubit, Pauli p);
  // Same letter on every listed qubit.
  static PauliString uniform(const std::vector<int>& qubits, Pauli p);

  // Phase as a power of i, in [0, 4).
  int phase() const { return phase_; }
  cplx phase_value() const;
  const std::map<int, Pauli>& factors() const { return factors_; }
  Pauli at(int qubit) const;
  std::vector<int> support() const;
  size_t weight() const { return factors_.size(); }
  bool is_identity() const { return factors_.empty(); }
  bool is_hermitian() const { return phase_ % 2 == 0; }

  PauliString operator*(const PauliString& other) const;
  PauliString& operator*=(const PauliString& other);
  bool operator==(const PauliString& other) const = default;

  bool commutes_with(const PauliString& other) const;
  PauliString with_phase(int phase) const;

  // Dense matrix on `qubits` (first qubit most significant).
  Mat to_dense(const std::vector<int>& qubits) const;

  // Letters over `qubits`, including 'I' for absent entries.
  std::string letters(const std::vector<int>& qubits) const;
  std::string str() const;

 private:
  int phase_ = 0;
  std::map<int, Pauli> factors_;
};

}  // namespace clhgibbs

#endif  // CLHGIBBS_PAULI_HPP
