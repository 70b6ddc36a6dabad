// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#include "clhgibbs/pauli.hpp"

namespace clhgibbs {

namespace {

// Single-qubit product a*b = i^phase * result.
struct SingleProduct {
  Pauli result;
  int phase;
};

SingleProduct multiply(Pauli a, Pauli b) {
  if (a == Pauli::I) return {b, 0};
  if (b == Pauli::I) return {a, 0};
  if (a == b) return {Pauli::I, 0};
  const int ia = static_cast<int>(a);
  const int ib = static_cast<int>(b);
  const int ic = 6 - ia - ib;
  // Cyclic X->Y->Z gives +i.
  const bool cyclic = (ib - ia + 3) % 3 == 1;
  return {static_cast<Pauli>(ic), cyclic ? 1 : 3};
}

}  // namespace

char pauli_letter(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

Pauli pauli_from_letter(char c) {
  switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: throw ValidationError(std::string("unknown Pauli letter '") + c + "'");
  }
}

PauliString PauliString::from_letters(const std::vector<int>& qubits, const std::string& letters, int phase) {
  if (qubits.size() != letters.size())
    throw ValidationError("Pauli string length does not match support size");
  PauliString out;
  out.phase_ = ((phase % 4) + 4) % 4;
  for (size_t i = 0; i < qubits.size(); ++i) {
    const Pauli p = pauli_from_letter(letters[i]);
    if (out.factors_.count(qubits[i])) throw ValidationError("Pauli string has a repeated qubit");
    if (p != Pauli::I) out.factors_[qubits[i]] = p;
  }
  return out;
}

PauliString PauliString::single(int qubit, Pauli p) {
  PauliString out;
  if (p != Pauli::I) out.factors_[qubit] = p;
  return out;
}

PauliString PauliString::uniform(const std::vector<int>& qubits, Pauli p) {
  PauliString out;
  for (int q : qubits) out *= single(q, p);
  return out;
}

cplx PauliString::phase_value() const {
  static const cplx table[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  return table[phase_];
}

Pauli PauliString::at(int qubit) const {
  auto it = factors_.find(qubit);
  return it == factors_.end() ? Pauli::I : it->second;
}

std::vector<int> PauliString::support() const {
  std::vector<int> out;
  out.reserve(factors_.size());
  for (const auto& [q, p] : factors_) out.push_back(q);
  return out;
}

PauliString PauliString::operator*(const PauliString& other) const {
  PauliString out = *this;
  out *= other;
  return out;
}

PauliString& PauliString::operator*=(const PauliString& other) {
  phase_ = (phase_ + other.phase_) % 4;
  for (const auto& [q, p] : other.factors_) {
    auto it = factors_.find(q);
    if (it == factors_.end()) {
      factors_[q] = p;
      continue;
    }
    const SingleProduct sp = multiply(it->second, p);
    phase_ = (phase_ + sp.phase) % 4;
    if (sp.result == Pauli::I)
      factors_.erase(it);
    else
      it->second = sp.result;
  }
  return *this;
}

bool PauliString::commutes_with(const PauliString& other) const {
  int anti = 0;
  const auto& small = factors_.size() <= other.factors_.size() ? factors_ : other.factors_;
  const PauliString& big = factors_.size() <= other.factors_.size() ? other : *this;
  for (const auto& [q, p] : small) {
    const Pauli o = big.at(q);
    if (o != Pauli::I && o != p) ++anti;
  }
  return anti % 2 == 0;
}

PauliString PauliString::with_phase(int phase) const {
  PauliString out = *this;
  out.phase_ = ((phase % 4) + 4) % 4;
  return out;
}

Mat PauliString::to_dense(const std::vector<int>& qubits) const {
  for (const auto& [q, p] : factors_) {
    bool found = false;
    for (int x : qubits) found |= (x == q);
    if (!found) throw ValidationError("Pauli string acts outside the requested qubits");
  }
  Mat out = Mat::Identity(1, 1) * phase_value();
  for (int q : qubits) out = kron(out, pauli_matrix(pauli_letter(at(q))));
  return out;
}

std::string PauliString::letters(const std::vector<int>& qubits) const {
  std::string s;
  for (int q : qubits) s.push_back(pauli_letter(at(q)));
  return s;
}

std::string PauliString::str() const {
  static const char* prefix[4] = {"+", "+i", "-", "-i"};
  std::string s = prefix[phase_];
  if (factors_.empty()) return s + "I";
  for (const auto& [q, p] : factors_) {
    s.push_back(pauli_letter(p));
    s += std::to_string(q);
  }
  return s;
}

}  // namespace clhgibbs
