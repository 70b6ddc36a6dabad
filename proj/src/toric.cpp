// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#include "clhgibbs/toric.hpp"

#include <algorithm>
#include <set>

namespace clhgibbs {

namespace {

Pauli partner(Pauli p) { return p == Pauli::X ? Pauli::Z : Pauli::X; }

PauliString restrict_to(const PauliString& p, const std::vector<SiteId>& qubits) {
  return PauliString::from_letters(qubits, p.letters(qubits));
}

bool same_up_to_phase(const PauliString& a, const PauliString& b) { return a.factors() == b.factors(); }

// Basis for a leftover group of one or two qubits carrying at most one
// distinct restricted term.
VirtualBasis leftover_basis(const std::vector<SiteId>& qubits, const std::vector<PauliString>& restrictions) {
  std::vector<PauliString> distinct;
  for (const PauliString& r : restrictions) {
    if (r.is_identity()) continue;
    bool seen = false;
    for (const PauliString& d : distinct) seen |= same_up_to_phase(d, r);
    if (!seen) distinct.push_back(r);
  }
  if (qubits.size() > 2 || distinct.size() > 1)
    throw OutOfScopeError("no virtual basis for the qubit group starting at " + std::to_string(qubits.front()));
  std::vector<PauliString> s, t;
  if (qubits.size() == 1) {
    const Pauli a = distinct.empty() ? Pauli::Z : distinct[0].at(qubits[0]);
    s.push_back(PauliString::single(qubits[0], a));
    t.push_back(PauliString::single(qubits[0], partner(a)));
    return stabilizer_basis(qubits, s, t);
  }
  const SiteId qa = qubits[0], qb = qubits[1];
  Pauli a = Pauli::Z, b = Pauli::I;
  if (!distinct.empty()) {
    a = distinct[0].at(qa);
    b = distinct[0].at(qb);
  }
  if (a == Pauli::I || b == Pauli::I) {
    // Weight-one restriction: product basis.
    const Pauli la = a == Pauli::I ? Pauli::Z : a;
    const Pauli lb = b == Pauli::I ? Pauli::Z : b;
    s = {PauliString::single(qa, la), PauliString::single(qb, lb)};
    t = {PauliString::single(qa, partner(la)), PauliString::single(qb, partner(lb))};
  } else {
    s = {PauliString::single(qa, a) * PauliString::single(qb, b),
         PauliString::single(qa, partner(a)) * PauliString::single(qb, partner(b))};
    t = {PauliString::single(qa, partner(a)), PauliString::single(qa, a)};
  }
  return stabilizer_basis(qubits, s, t);
}

}  // namespace

VirtualBasis stabilizer_basis(std::vector<SiteId> qubits, std::vector<PauliString> stabilizers,
                              std::vector<PauliString> destabilizers) {
  const size_t k = stabilizers.size();
  if (k != qubits.size() || destabilizers.size() != k)
    throw ValidationError("stabilizer_basis needs one stabilizer and one destabilizer per qubit");
  for (size_t i = 0; i < k; ++i) {
    if (!stabilizers[i].is_hermitian()) throw ValidationError("stabilizers must be Hermitian");
    for (size_t j = 0; j < k; ++j) {
      if (!stabilizers[i].commutes_with(stabilizers[j])) throw ValidationError("stabilizers must commute");
      if (destabilizers[i].commutes_with(stabilizers[j]) == (i == j))
        throw ValidationError("destabilizer T_" + std::to_string(i + 1) + " must anti-commute with S_" +
                              std::to_string(i + 1) + " only");
    }
  }
  VirtualBasis vb;
  vb.qubits = std::move(qubits);
  vb.stabilizers = std::move(stabilizers);
  vb.destabilizers = std::move(destabilizers);
  const long d = 1L << k;
  Mat proj = Mat::Identity(d, d);
  for (const PauliString& s : vb.stabilizers) proj = proj * (0.5 * (Mat::Identity(d, d) + s.to_dense(vb.qubits)));
  Eigen::Index best = 0;
  proj.colwise().norm().maxCoeff(&best);
  Vec zero = proj.col(best);
  zero /= zero.norm();
  fix_phase(zero);
  std::vector<Mat> t;
  for (const PauliString& p : vb.destabilizers) t.push_back(p.to_dense(vb.qubits));
  vb.unitary.resize(d, d);
  for (long b = 0; b < d; ++b) {
    Vec col = zero;
    for (int i = static_cast<int>(k) - 1; i >= 0; --i)
      if ((b >> (k - 1 - i)) & 1) col = t[i] * col;
    vb.unitary.col(b) = col;
  }
  return vb;
}

VirtualBasis virtual_basis(SiteId u, SiteId v, SiteId w, SiteId tau) {
  const std::vector<SiteId> q = {u, v, w, tau};
  if (std::set<SiteId>(q.begin(), q.end()).size() != 4) throw ValidationError("plaquette qubits must be distinct");
  std::vector<PauliString> s = {PauliString::uniform(q, Pauli::Z), PauliString::uniform({u, v}, Pauli::X),
                                PauliString::uniform({v, w}, Pauli::X), PauliString::uniform({w, tau}, Pauli::X)};
  std::vector<PauliString> t = {PauliString::single(u, Pauli::X), PauliString::single(u, Pauli::Z),
                                PauliString::uniform({u, v}, Pauli::Z), PauliString::uniform({u, v, w}, Pauli::Z)};
  return stabilizer_basis(q, std::move(s), std::move(t));
}

std::optional<std::pair<int, int>> stabilizer_mask(const VirtualBasis& basis, const PauliString& p) {
  const int k = static_cast<int>(basis.stabilizers.size());
  if (!p.is_hermitian()) return std::nullopt;
  for (int mask = 0; mask < (1 << k); ++mask) {
    PauliString prod;
    for (int i = 0; i < k; ++i)
      if (mask & basis.bit(i)) prod *= basis.stabilizers[i];
    if (!same_up_to_phase(prod, p)) continue;
    const int diff = ((p.phase() - prod.phase()) % 4 + 4) % 4;
    if (diff % 2) return std::nullopt;
    return std::make_pair(mask, diff == 0 ? 1 : -1);
  }
  return std::nullopt;
}

int ToricTermMap::sign(const SpinConfig& y) const {
  int parity = 0;
  for (const auto& [site, mask] : parts) parity ^= __builtin_popcount(static_cast<unsigned>(y[site] & mask)) & 1;
  return parity ? -1 : 1;
}

double ToricClassicalMap::energy(const SpinConfig& y) const {
  double e = 0.0;
  for (const ToricTermMap& t : terms) e += t.value(y);
  return e;
}

Vec ToricClassicalMap::state(const SpinConfig& y) const {
  Vec psi = Vec::Ones(1);
  std::vector<SiteId> order;
  for (size_t g = 0; g < bases.size(); ++g) {
    const Vec col = bases[g].unitary.col(y[g]);
    Vec next(psi.size() * col.size());
    for (Eigen::Index a = 0; a < psi.size(); ++a) next.segment(a * col.size(), col.size()) = psi(a) * col;
    psi = std::move(next);
    order.insert(order.end(), bases[g].qubits.begin(), bases[g].qubits.end());
  }
  return reorder_qubits(psi, order);
}

ToricClassicalMap toric_classicalize(const CommutingHamiltonian& h, const RemovalPlan& plan) {
  if (!h.lattice) throw ValidationError("toric_classicalize needs a lattice Hamiltonian");
  if (plan.groups.empty()) throw ValidationError("toric_classicalize needs a grouped removal plan");
  ToricClassicalMap out;
  out.groups = plan.groups;
  const int ng = static_cast<int>(plan.groups.size());

  // Restriction of every kept term to every group it touches.
  std::vector<std::vector<PauliString>> restrictions(ng);
  std::vector<std::vector<int>> touched(plan.kept.size());
  for (size_t k = 0; k < plan.kept.size(); ++k) {
    const LocalTerm& t = h.term(plan.kept[k]);
    if (!t.is_pauli()) throw OutOfScopeError("toric_classicalize needs Pauli terms");
    for (SiteId q : t.support) {
      const int g = plan.group_of(q);
      if (std::find(touched[k].begin(), touched[k].end(), g) == touched[k].end()) touched[k].push_back(g);
    }
    std::sort(touched[k].begin(), touched[k].end());
    if (touched[k].size() > 2)
      throw ValidationError("term " + std::to_string(t.id) + " is not 2-local under the plan's grouping");
    for (int g : touched[k]) restrictions[g].push_back(restrict_to(*t.pauli, plan.groups[g]));
  }

  for (int g = 0; g < ng; ++g) {
    const std::vector<SiteId>& qs = plan.groups[g];
    const Plaquette* cell = qs.size() == 4 ? h.lattice->plaquette(qs.front()) : nullptr;
    bool plaquette_group = false;
    if (cell && cell->color == Color::white) {
      std::vector<SiteId> verts(cell->verts.begin(), cell->verts.end());
      std::sort(verts.begin(), verts.end());
      plaquette_group = verts == qs;
    }
    if (plaquette_group)
      out.bases.push_back(virtual_basis(cell->verts[0], cell->verts[1], cell->verts[2], cell->verts[3]));
    else
      out.bases.push_back(leftover_basis(qs, restrictions[g]));
  }

  std::vector<int> dims;
  std::vector<SiteId> ids;
  for (int g = 0; g < ng; ++g) {
    dims.push_back(out.bases[g].dim());
    ids.push_back(plan.group_id(g));
  }
  out.classical = ClassicalHamiltonian(dims, ids);
  for (size_t k = 0; k < plan.kept.size(); ++k) {
    const LocalTerm& t = h.term(plan.kept[k]);
    ToricTermMap m;
    m.term = t.id;
    m.coeff = t.coeff * (t.pauli->phase() == 2 ? -1.0 : 1.0);
    for (int g : touched[k]) {
      const auto mask = stabilizer_mask(out.bases[g], restrict_to(*t.pauli, plan.groups[g]));
      if (!mask)
        throw InternalError("term " + std::to_string(t.id) + " is not diagonal in the virtual basis of group " +
                            std::to_string(plan.group_id(g)));
      m.parts.emplace_back(g, mask->first);
      m.coeff *= mask->second;
    }
    ClassicalTerm ct;
    ct.support = touched[k];
    std::vector<int> sub;
    for (int g : ct.support) sub.push_back(dims[g]);
    SpinConfig y(ng, 0);
    long count = 1;
    for (int d : sub) count *= d;
    for (long v = 0; v < count; ++v) {
      const SpinConfig c = config_from_index(v, sub);
      for (size_t i = 0; i < ct.support.size(); ++i) y[ct.support[i]] = c[i];
      ct.table.push_back(m.value(y));
    }
    out.classical.add_term(std::move(ct));
    out.terms.push_back(std::move(m));
  }
  return out;
}

}  // namespace clhgibbs
