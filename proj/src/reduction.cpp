// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#include "clhgibbs/reduction.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <deque>
#include <set>

#include "clhgibbs/toric.hpp"

namespace clhgibbs {

namespace {

using SpMat = Eigen::SparseMatrix<cplx>;

// Single letter of a uniform Pauli term (e.g. ZZZZ -> Z), or I.
Pauli uniform_letter(const LocalTerm& t) {
  if (!t.is_pauli() || t.pauli->is_identity()) return Pauli::I;
  const Pauli first = t.pauli->factors().begin()->second;
  for (const auto& [q, l] : t.pauli->factors())
    if (l != first) return Pauli::I;
  if (t.pauli->weight() != t.support.size()) return Pauli::I;
  return first;
}

// Term indices of the same uniform letter, and per vertex the terms of that
// class containing it.
struct ColourGraph {
  std::vector<int> members;
  std::map<SiteId, std::vector<int>> at_vertex;
};

ColourGraph colour_graph(const CommutingHamiltonian& h, Pauli letter) {
  ColourGraph g;
  for (int i = 0; i < static_cast<int>(h.terms.size()); ++i) {
    if (uniform_letter(h.terms[i]) != letter) continue;
    g.members.push_back(i);
    for (SiteId q : h.terms[i].support) g.at_vertex[q].push_back(i);
  }
  return g;
}

// BFS from term index `start` to term index `target`, or to a vertex
// contained in only one term of the class when target < 0. Returns the
// vertices whose flips connect the two.
std::optional<std::vector<SiteId>> colour_path(const CommutingHamiltonian& h, const ColourGraph& g, int start,
                                               int target) {
  std::map<int, std::pair<int, SiteId>> parent;  // node -> (previous node, via vertex)
  std::deque<int> queue = {start};
  parent[start] = {-1, -1};
  auto unwind = [&](int node, SiteId last) {
    std::vector<SiteId> path;
    if (last >= 0) path.push_back(last);
    while (parent[node].first >= 0) {
      path.push_back(parent[node].second);
      node = parent[node].first;
    }
    std::reverse(path.begin(), path.end());
    return path;
  };
  while (!queue.empty()) {
    const int node = queue.front();
    queue.pop_front();
    std::vector<SiteId> verts = h.terms[node].support;
    std::sort(verts.begin(), verts.end());
    for (SiteId v : verts) {
      const std::vector<int>& owners = g.at_vertex.at(v);
      if (owners.size() == 1) {
        if (target < 0) return unwind(node, v);
        continue;
      }
      if (owners.size() != 2) continue;
      const int next = owners[0] == node ? owners[1] : owners[0];
      if (parent.count(next)) continue;
      parent[next] = {node, v};
      if (next == target) return unwind(next, -1);
      queue.push_back(next);
    }
  }
  return std::nullopt;
}

std::vector<int> anticommuting_terms(const CommutingHamiltonian& h, const PauliString& op) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(h.terms.size()); ++i) {
    const LocalTerm& t = h.terms[i];
    if (!t.is_pauli()) throw OutOfScopeError("correction strings need Pauli terms");
    if (!t.pauli->commutes_with(op)) out.push_back(i);
  }
  return out;
}

SpMat pauli_sparse(const PauliString& p, const std::vector<SiteId>& qubits) {
  const int n = static_cast<int>(qubits.size());
  const long dim = 1L << n;
  long xmask = 0, zmask = 0;
  int ny = 0;
  for (const auto& [q, letter] : p.factors()) {
    const long pos = std::find(qubits.begin(), qubits.end(), q) - qubits.begin();
    if (pos == n) throw ValidationError("Pauli acts outside the register");
    const long bit = 1L << (n - 1 - pos);
    if (letter == Pauli::X || letter == Pauli::Y) xmask |= bit;
    if (letter == Pauli::Z || letter == Pauli::Y) zmask |= bit;
    if (letter == Pauli::Y) ++ny;
  }
  static const cplx ipow[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(dim);
  for (long i = 0; i < dim; ++i) {
    const int minus = __builtin_popcountl(i & zmask) & 1;
    trip.emplace_back(i ^ xmask, i, ipow[(p.phase() + ny + 2 * minus) % 4]);
  }
  SpMat m(dim, dim);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SpMat sparse_identity(long d) {
  SpMat m(d, d);
  m.setIdentity();
  return m;
}

double sparse_trace(const SpMat& m) {
  cplx t = 0.0;
  for (long k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      if (it.row() == it.col()) t += it.value();
  return t.real();
}

}  // namespace

// ---------------------------------------------------------------- planning

int RemovalPlan::group_of(SiteId qubit) const {
  for (size_t g = 0; g < groups.size(); ++g)
    if (std::find(groups[g].begin(), groups[g].end(), qubit) != groups[g].end()) return static_cast<int>(g);
  throw ValidationError("qubit " + std::to_string(qubit) + " is not covered by the plan");
}

void check_no_classical_qubits(const CommutingHamiltonian& h) {
  std::map<SiteId, std::vector<int>> incident;
  for (int i = 0; i < static_cast<int>(h.terms.size()); ++i)
    for (SiteId s : h.terms[i].support) incident[s].push_back(i);
  for (const auto& [site, list] : incident) {
    if (h.all_pauli()) {
      std::set<Pauli> letters;
      for (int i : list) {
        const Pauli l = h.terms[i].pauli->at(site);
        if (l != Pauli::I) letters.insert(l);
      }
      int nontrivial = 0;
      for (int i : list) nontrivial += h.terms[i].pauli->at(site) != Pauli::I;
      if (nontrivial >= 2 && letters.size() == 1)
        throw OutOfScopeError("classical qubit at site " + std::to_string(site) +
                              ": all incident terms act diagonally in one basis; the classical-qubit pathway is not "
                              "implemented");
      continue;
    }
    std::vector<InducedAlgebra> algs;
    for (int i : list) {
      InducedAlgebra a = induced_algebra(h.terms[i], site, h.site_dims);
      if (!a.trivial) algs.push_back(std::move(a));
    }
    if (algs.size() < 2) continue;
    bool abelian = true;
    for (size_t a = 0; a < algs.size() && abelian; ++a)
      for (size_t b = a; b < algs.size() && abelian; ++b) abelian = algebras_commute(algs[a], algs[b]);
    if (abelian)
      throw OutOfScopeError("classical qubit at site " + std::to_string(site) +
                            ": incident induced algebras are jointly commutative; the classical-qubit pathway is not "
                            "implemented");
  }
}

RemovalPlan plan_removal(const CommutingHamiltonian& h) {
  if (!h.lattice) throw ValidationError("plan_removal needs a lattice Hamiltonian");
  if (!h.all_pauli() || !h.all_qubits())
    throw OutOfScopeError("removal planning supports Pauli-presented qubit lattice Hamiltonians only");
  for (const LocalTerm& t : h.terms)
    if (t.color == Color::none || !h.lattice->plaquette(t.id))
      throw OutOfScopeError("term " + std::to_string(t.id) + " is not a coloured plaquette term");
  check_no_classical_qubits(h);
  const Lattice2D& lat = *h.lattice;
  RemovalPlan plan;
  plan.torus = lat.topology == Topology::torus;
  for (const LocalTerm& t : h.terms) {
    const Plaquette* p = lat.plaquette(t.id);
    const bool remove = !plan.torus && t.color == Color::white && p->y % 2 == 1;
    (remove ? plan.removed : plan.kept).push_back(t.id);
    if (remove && !has_two_eigenvalues(t)) throw ValidationError("term " + std::to_string(t.id) + " has c_p = 0");
  }
  std::sort(plan.removed.begin(), plan.removed.end());
  std::sort(plan.kept.begin(), plan.kept.end());
  if (plan.torus) return plan;  // no grouping: every term stays

  std::vector<bool> used(lat.num_sites(), false);
  for (const Plaquette& p : lat.plaquettes) {
    if (p.color != Color::white || p.y % 2 != 0) continue;
    std::vector<SiteId> g(p.verts.begin(), p.verts.end());
    bool free = true;
    for (SiteId q : g) free &= !used[q];
    if (!free) continue;
    for (SiteId q : g) used[q] = true;
    std::sort(g.begin(), g.end());
    plan.groups.push_back(g);
  }
  for (TermId id : plan.kept) {
    std::vector<SiteId> g;
    for (SiteId q : h.term(id).support)
      if (!used[q]) g.push_back(q);
    if (g.empty()) continue;
    for (SiteId q : g) used[q] = true;
    std::sort(g.begin(), g.end());
    plan.groups.push_back(g);
  }
  for (SiteId q = 0; q < lat.num_sites(); ++q)
    if (!used[q]) plan.groups.push_back({q});
  std::sort(plan.groups.begin(), plan.groups.end());

  for (TermId id : plan.kept) {
    std::set<int> touched;
    for (SiteId q : h.term(id).support) touched.insert(plan.group_of(q));
    if (touched.size() > 2) throw InternalError("kept term " + std::to_string(id) + " is not 2-local under grouping");
  }
  return plan;
}

CommutingHamiltonian restrict_terms(const CommutingHamiltonian& h, const std::vector<TermId>& ids) {
  CommutingHamiltonian out;
  out.site_dims = h.site_dims;
  out.lattice = h.lattice;
  out.chain = h.chain;
  for (TermId id : ids) out.terms.push_back(h.term(id));
  return out;
}

CommutingHamiltonian group_hamiltonian(const CommutingHamiltonian& h, const RemovalPlan& plan) {
  CommutingHamiltonian out;
  for (size_t g = 0; g < plan.groups.size(); ++g)
    out.site_dims[plan.group_id(static_cast<int>(g))] = 1 << plan.groups[g].size();
  for (TermId id : plan.kept) {
    const LocalTerm& t = h.term(id);
    std::set<int> touched;
    for (SiteId q : t.support) touched.insert(plan.group_of(q));
    std::vector<SiteId> support, qubits;
    for (int g : touched) {
      support.push_back(plan.group_id(g));
      qubits.insert(qubits.end(), plan.groups[g].begin(), plan.groups[g].end());
    }
    out.terms.push_back(LocalTerm::make_dense(id, support, t.coeff * t.pauli->to_dense(qubits), t.color));
  }
  return out;
}

Vec reorder_qubits(const Vec& psi, const std::vector<SiteId>& order) {
  const int n = static_cast<int>(order.size());
  if (psi.size() != (1L << n)) throw ValidationError("reorder_qubits: state size does not match the qubit list");
  std::vector<SiteId> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> shift(n);
  for (int k = 0; k < n; ++k)
    shift[k] = n - 1 - static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), order[k]) - sorted.begin());
  Vec out(psi.size());
  for (long i = 0; i < psi.size(); ++i) {
    long j = 0;
    for (int k = 0; k < n; ++k)
      if ((i >> (n - 1 - k)) & 1) j |= 1L << shift[k];
    out(j) = psi(i);
  }
  return out;
}

// ---------------------------------------------------------------- corrections

CorrectionOperator find_correction(const CommutingHamiltonian& h, TermId p) {
  const int idx = h.term_index(p);
  const Pauli letter = uniform_letter(h.terms[idx]);
  if (letter != Pauli::X && letter != Pauli::Z)
    throw OutOfScopeError("term " + std::to_string(p) + " is not a uniform X or Z plaquette; no correction string");
  const ColourGraph g = colour_graph(h, letter);
  const auto path = colour_path(h, g, idx, -1);
  if (!path)
    throw ValidationError("no correction path for term " + std::to_string(p) +
                          ": the lattice has no boundary or puncture of this colour; use torus_sample");
  CorrectionOperator c;
  c.term = p;
  c.path = *path;
  c.op = PauliString::uniform(c.path, letter == Pauli::Z ? Pauli::X : Pauli::Z);
  const std::vector<int> anti = anticommuting_terms(h, c.op);
  if (anti != std::vector<int>{idx})
    throw InternalError("correction string for term " + std::to_string(p) + " does not single out that term");
  return c;
}

bool has_two_eigenvalues(const LocalTerm& t, double tol) {
  if (t.is_pauli()) return t.coeff != 0.0 && !t.pauli->is_identity();
  const HermitianEig e = hermitian_eig(t.matrix());
  const std::vector<int> starts = cluster_sorted(e.values, tol);
  if (starts.size() != 3) return false;
  const double lo = e.values(0), hi = e.values(e.values.size() - 1);
  const int n_lo = starts[1] - starts[0], n_hi = starts[2] - starts[1];
  return hi > tol && std::abs(lo + hi) <= tol * std::max(1.0, hi) && n_lo == n_hi;
}

// ---------------------------------------------------------------- measure and correct

double correction_probability(double beta, double lambda) { return sigmoid(2.0 * beta * lambda); }

void orc_step(DensityMatrixState& state, const LocalTerm& p, const CorrectionOperator& c, double beta, Rng& rng) {
  const MeasurementOutcome m = measure_term(state, p, rng);
  if (rng.bernoulli(correction_probability(beta, m.value))) apply_pauli(state, c.op);
}

void orc_step(PauliFrameState& state, int term_index, double coeff, const std::vector<int>& flips, double beta,
              Rng& rng) {
  const double lambda = coeff * state.eigenvalue(term_index);
  if (rng.bernoulli(correction_probability(beta, lambda))) state.flip(flips);
}

Mat orc_channel(const DensityMatrixState& space, const Mat& rho, const LocalTerm& p, const CorrectionOperator& c,
                double beta) {
  Mat out = Mat::Zero(rho.rows(), rho.cols());
  if (p.is_pauli()) {
    for (int s : {1, -1}) {
      const Mat sector = pauli_project(space, rho, *p.pauli, s);
      const double q = correction_probability(beta, p.coeff * s);
      out += (1.0 - q) * sector + q * pauli_conjugate(space, sector, c.op);
    }
    return out;
  }
  for (const SpectralProjector& sp : term_projectors(space, p)) {
    const Mat sector = sp.projector * rho * sp.projector;
    const double q = correction_probability(beta, sp.value);
    out += (1.0 - q) * sector + q * pauli_conjugate(space, sector, c.op);
  }
  return out;
}

void orc_run(DensityMatrixState& state, const CommutingHamiltonian& h, const RemovalPlan& plan,
             const std::vector<CorrectionOperator>& corrections, double beta, Rng& rng) {
  for (TermId id : plan.removed) {
    auto it = std::find_if(corrections.begin(), corrections.end(), [&](const CorrectionOperator& c) { return c.term == id; });
    if (it == corrections.end()) throw ValidationError("missing correction operator for term " + std::to_string(id));
    orc_step(state, h.term(id), *it, beta, rng);
  }
}

IdentityReport correction_identities(const CommutingHamiltonian& h, const std::vector<TermId>& terms) {
  if (!h.all_pauli() || !h.all_qubits()) throw OutOfScopeError("correction_identities needs a Pauli qubit Hamiltonian");
  const std::vector<SiteId> qubits = h.sites();
  if (qubits.size() > 12) throw OutOfScopeError("correction_identities is limited to 12 qubits");
  const long d = 1L << qubits.size();
  const SpMat id = sparse_identity(d);
  IdentityReport rep;
  for (TermId pid : terms) {
    const int pi = h.term_index(pid);
    const LocalTerm& p = h.terms[pi];
    if (!has_two_eigenvalues(p)) throw ValidationError("term " + std::to_string(pid) + " does not have two eigenvalues");
    const CorrectionOperator c = find_correction(h, pid);
    const SpMat pm = pauli_sparse(*p.pauli, qubits);
    const SpMat lm = pauli_sparse(c.op, qubits);
    const SpMat plus = 0.5 * (id + pm), minus = 0.5 * (id - pm);
    std::vector<PauliString> q;
    for (int i = 0; i < static_cast<int>(h.terms.size()); ++i)
      if (i != pi) q.push_back(*h.terms[i].pauli);
    const int m = static_cast<int>(q.size());
    if (m > 16) throw OutOfScopeError("correction_identities is limited to 16 complementary terms");
    for (long lam = 0; lam < (1L << m); ++lam) {
      // Pi^Q = 2^-m sum_S prod_{q in S} s_q q.
      SpMat proj = id;
      for (int k = 0; k < m; ++k) {
        const double s = (lam >> k) & 1 ? -1.0 : 1.0;
        proj = SpMat(proj * (0.5 * (id + s * pauli_sparse(q[k], qubits))));
        proj.prune(cplx(0.0), 1e-14);
      }
      const SpMat lhs = lm * plus * proj * plus * lm.adjoint();
      const SpMat rhs = minus * proj * minus;
      rep.symmetry_residual = std::max(rep.symmetry_residual, SpMat(lhs - rhs).norm());
      const SpMat half = plus * proj * plus;
      rep.trace_residual = std::max(rep.trace_residual, std::abs(sparse_trace(half) - 0.5 * sparse_trace(proj)));
      ++rep.projectors;
    }
    ++rep.terms;
  }
  return rep;
}

// ---------------------------------------------------------------- samplers

std::vector<Syndrome> punctured_sample(const CommutingHamiltonian& h, double beta, long n_samples, uint64_t seed,
                                       int threads) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be finite and nonnegative");
  if (h.lattice && h.lattice->topology == Topology::torus)
    throw ValidationError("punctured_sample needs a boundary or puncture; use torus_sample on a torus");
  const std::vector<PauliString> gens = hamiltonian_generators(h);
  const std::vector<FrameConstraint> constraints = frame_relations(gens);
  const int k = static_cast<int>(gens.size());
  std::vector<std::vector<int>> flips(k);
  for (int i = 0; i < k; ++i) flips[i] = anticommuting_terms(h, find_correction(h, h.terms[i].id).op);
  std::vector<Syndrome> out(n_samples);
  parallel_for(n_samples, threads, [&](long b, long e) {
    for (long t = b; t < e; ++t) {
      Rng rng(stream_seed(seed, static_cast<uint64_t>(t)));
      PauliFrameState frame = frame_initialize_mixed(gens, constraints, rng);
      for (int i = 0; i < k; ++i) orc_step(frame, i, h.terms[i].coeff, flips[i], beta, rng);
      out[t] = frame.eigenvalues();
    }
  });
  return out;
}

TorusChainMap torus_chain_map(const CommutingHamiltonian& h, Color color) {
  if (!h.lattice || h.lattice->topology != Topology::torus) throw ValidationError("torus_sample needs torus topology");
  TorusChainMap m;
  m.color = color;
  const Pauli letter = color == Color::white ? Pauli::Z : Pauli::X;
  const ColourGraph g = colour_graph(h, letter);
  std::vector<std::pair<TermId, int>> ordered;
  for (int i : g.members)
    if (h.terms[i].color == color) ordered.emplace_back(h.terms[i].id, i);
  std::sort(ordered.begin(), ordered.end());
  for (const auto& [id, i] : ordered) {
    m.order.push_back(i);
    m.coeffs.push_back(h.terms[i].coeff);
  }
  const int k = static_cast<int>(m.order.size());
  if (k < 2) throw ValidationError("torus chain needs at least two terms per colour");
  for (int i = 0; i < k; ++i) {
    const int prev = m.order[(i + k - 1) % k], cur = m.order[i];
    const auto path = colour_path(h, g, prev, cur);
    if (!path) throw ValidationError("no string between torus terms " + std::to_string(h.terms[prev].id) + " and " +
                                     std::to_string(h.terms[cur].id));
    CorrectionOperator c;
    c.term = h.terms[cur].id;
    c.path = *path;
    c.op = PauliString::uniform(c.path, letter == Pauli::Z ? Pauli::X : Pauli::Z);
    std::vector<int> anti = anticommuting_terms(h, c.op);
    std::vector<int> expect = {prev, cur};
    std::sort(expect.begin(), expect.end());
    if (anti != expect) throw InternalError("torus string does not flip exactly two neighbouring chain terms");
    m.flips.push_back(anti);
    m.strings.push_back(std::move(c));
  }
  m.ring = ClassicalHamiltonian(std::vector<int>(k, 2));
  for (int i = 0; i < k; ++i) {
    ClassicalTerm t;
    t.support = {i, (i + 1) % k};
    const double c = m.coeffs[i];
    t.table = {c, -c, -c, c};
    m.ring.add_term(std::move(t));
  }
  return m;
}

std::vector<Syndrome> torus_sample(const CommutingHamiltonian& h, double beta, const TorusOptions& options) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be finite and nonnegative");
  if (options.n_samples < 0 || options.thinning < 1) throw ValidationError("torus_sample: invalid schedule");
  const std::vector<PauliString> gens = hamiltonian_generators(h);
  const std::vector<FrameConstraint> constraints = frame_relations(gens);
  for (const FrameConstraint& c : constraints)
    if (c.sign != 1) throw ValidationError("torus_sample needs colour products equal to +I");
  std::vector<TorusChainMap> maps = {torus_chain_map(h, Color::white), torus_chain_map(h, Color::black)};
  Rng rng(options.seed);
  PauliFrameState frame = frame_initialize_mixed(gens, constraints, rng);
  std::vector<ChainState> chains;
  for (size_t c = 0; c < maps.size(); ++c) {
    const TorusChainMap& m = maps[c];
    const int k = static_cast<int>(m.order.size());
    ChainState st;
    st.rng = Rng(stream_seed(options.seed, c + 1));
    st.config.assign(k, 0);
    st.config[0] = static_cast<int>(rng.below(2));
    for (int i = 0; i + 1 < k; ++i) st.config[i + 1] = st.config[i] ^ (frame.eigenvalue(m.order[i]) < 0 ? 1 : 0);
    st.energy = m.ring.energy(st.config);
    chains.push_back(std::move(st));
  }
  auto check = [&]() {
    for (size_t c = 0; c < maps.size(); ++c) {
      const TorusChainMap& m = maps[c];
      const int k = static_cast<int>(m.order.size());
      for (int i = 0; i < k; ++i) {
        const int lam = (chains[c].config[i] ^ chains[c].config[(i + 1) % k]) ? -1 : 1;
        if (frame.eigenvalue(m.order[i]) != lam) throw InternalError("torus chain and frame eigenvalues disagree");
      }
    }
    if (!frame.satisfies_constraints()) throw InternalError("torus frame violates a parity constraint");
  };
  check();
  auto sweep = [&]() {
    for (size_t c = 0; c < maps.size(); ++c) {
      const TorusChainMap& m = maps[c];
      const int k = static_cast<int>(m.order.size());
      for (int s = 0; s < k; ++s) {
        int site = -1;
        if (glauber_step(chains[c], m.ring, beta, &site)) frame.flip(m.flips[site]);
      }
    }
  };
  long kmax = 0;
  for (const TorusChainMap& m : maps) kmax = std::max<long>(kmax, static_cast<long>(m.order.size()));
  const long burn = options.burn_in < 0 ? 100 * kmax : options.burn_in;
  for (long s = 0; s < burn; ++s) sweep();
  std::vector<Syndrome> out;
  out.reserve(options.n_samples);
  for (long n = 0; n < options.n_samples; ++n) {
    for (long s = 0; s < options.thinning; ++s) sweep();
    check();
    out.push_back(frame.eigenvalues());
  }
  return out;
}

std::vector<double> syndrome_distribution(const CommutingHamiltonian& h, double beta, const std::vector<int>& terms,
                                          bool parity_constrained) {
  const int m = static_cast<int>(terms.size());
  if (m > 20) throw OutOfScopeError("syndrome enumeration refuses more than 20 terms");
  int required = 1;
  if (parity_constrained) {
    PauliString prod;
    for (int i : terms) prod *= *h.terms[i].pauli;
    if (!prod.is_identity() || !prod.is_hermitian()) throw ValidationError("terms do not multiply to +-I");
    required = prod.phase() == 0 ? 1 : -1;
  }
  std::vector<double> logw(1L << m);
  for (long s = 0; s < (1L << m); ++s) {
    double e = 0.0;
    int parity = 1;
    for (int j = 0; j < m; ++j) {
      const int eig = (s >> (m - 1 - j)) & 1 ? -1 : 1;
      parity *= eig;
      e += h.terms[terms[j]].coeff * eig;
    }
    logw[s] = parity_constrained && parity != required ? -INFINITY : -beta * e;
  }
  const double logz = log_sum_exp(logw);
  std::vector<double> p(logw.size());
  for (size_t s = 0; s < p.size(); ++s) p[s] = std::exp(logw[s] - logz);
  return p;
}

TwoLocalSample sample_2local(const CommutingHamiltonian& h2, double beta, const SampleOptions& options, int chains,
                             int threads) {
  TwoLocalSample out;
  out.cl = classicalize_2local(h2);
  out.samples = sample_chains(out.cl.classical, beta, options, chains, threads);
  if (options.kind == SamplerKind::exact) out.exact = exact_distribution(out.cl.classical, beta);
  return out;
}

// ---------------------------------------------------------------- dispatch

std::string pathway_name(Pathway p) {
  switch (p) {
    case Pathway::two_local: return "two-local";
    case Pathway::orc: return "oblivious-correction";
    default: return "torus";
  }
}

Backend backend_from_name(const std::string& s) {
  if (s == "frame") return Backend::frame;
  if (s == "dense") return Backend::dense;
  throw ValidationError("unknown backend '" + s + "'");
}

std::string backend_name(Backend b) { return b == Backend::frame ? "frame" : "dense"; }

GibbsRun sample_gibbs_clh(const CommutingHamiltonian& h, double beta, const GibbsOptions& options) {
  h.validate();
  const CommutationReport rep = verify_commuting(h);
  if (!rep.ok)
    throw ValidationError("terms " + std::to_string(h.terms[rep.violations[0].i].id) + " and " +
                          std::to_string(h.terms[rep.violations[0].j].id) + " do not commute");
  GibbsRun run;
  bool two_local = true;
  for (const LocalTerm& t : h.terms) two_local &= t.support.size() <= 2;
  if (two_local) {
    run.pathway = Pathway::two_local;
    TwoLocalSample s = sample_2local(h, beta, options.classical, options.chains, options.threads);
    run.classical_sites = s.cl.map.sites;
    run.configs = std::move(s.samples);
    return run;
  }
  if (!h.lattice) throw OutOfScopeError("terms on more than two sites need lattice geometry");
  RemovalPlan plan = plan_removal(h);
  for (const LocalTerm& t : h.terms) run.term_ids.push_back(t.id);
  if (plan.torus) {
    if (options.backend == Backend::dense) throw ValidationError("the torus pathway runs on the frame backend only");
    run.pathway = Pathway::torus;
    TorusOptions to;
    to.burn_in = options.torus_burn_in;
    to.thinning = options.torus_thinning;
    const int chains = std::max(1, options.chains);
    std::vector<std::vector<Syndrome>> parts(chains);
    parallel_for(chains, options.threads, [&](long b, long e) {
      for (long c = b; c < e; ++c) {
        TorusOptions o = to;
        o.seed = options.classical.seed + static_cast<uint64_t>(c);
        o.n_samples = options.classical.n_samples * (c + 1) / chains - options.classical.n_samples * c / chains;
        parts[c] = torus_sample(h, beta, o);
      }
    });
    for (auto& p : parts) run.syndromes.insert(run.syndromes.end(), p.begin(), p.end());
    run.plan = std::move(plan);
    return run;
  }
  run.pathway = Pathway::orc;
  const ToricClassicalMap tmap = toric_classicalize(h, plan);
  const std::vector<SpinConfig> ys =
      sample_chains(tmap.classical, beta, options.classical, options.chains, options.threads);
  std::vector<CorrectionOperator> corrections;
  for (TermId id : plan.removed) corrections.push_back(find_correction(h, id));
  const long n = static_cast<long>(ys.size());
  run.syndromes.resize(n);
  const uint64_t orc_seed = stream_seed(options.classical.seed, 0x6f7263ULL);
  if (options.backend == Backend::dense) {
    const DensityMatrixState space = maximally_mixed_state(h);
    parallel_for(n, options.threads, [&](long b, long e) {
      for (long t = b; t < e; ++t) {
        Rng rng(stream_seed(orc_seed, static_cast<uint64_t>(t)));
        DensityMatrixState st = space;
        const Vec psi = tmap.state(ys[t]);
        st.rho = psi * psi.adjoint();
        orc_run(st, h, plan, corrections, beta, rng);
        Syndrome syn;
        for (const LocalTerm& term : h.terms) syn.push_back(measure_term(st, term, rng).value * term.coeff > 0 ? 1 : -1);
        run.syndromes[t] = std::move(syn);
      }
    });
  } else {
    const std::vector<PauliString> gens = hamiltonian_generators(h);
    const std::vector<FrameConstraint> constraints = frame_relations(gens);
    std::vector<int> kept_index;
    for (const ToricTermMap& m : tmap.terms) kept_index.push_back(h.term_index(m.term));
    std::vector<std::pair<int, std::vector<int>>> steps;
    for (const CorrectionOperator& c : corrections) {
      const int i = h.term_index(c.term);
      steps.emplace_back(i, anticommuting_terms(h, c.op));
    }
    parallel_for(n, options.threads, [&](long b, long e) {
      for (long t = b; t < e; ++t) {
        Rng rng(stream_seed(orc_seed, static_cast<uint64_t>(t)));
        std::map<int, int> fixed;
        for (size_t k = 0; k < tmap.terms.size(); ++k) {
          const double value = tmap.terms[k].value(ys[t]);
          fixed[kept_index[k]] = value / h.terms[kept_index[k]].coeff > 0 ? 1 : -1;
        }
        PauliFrameState frame = frame_initialize_mixed(gens, constraints, rng, fixed);
        for (const auto& [i, flips] : steps) orc_step(frame, i, h.terms[i].coeff, flips, beta, rng);
        run.syndromes[t] = frame.eigenvalues();
      }
    });
  }
  run.plan = std::move(plan);
  return run;
}

}  // namespace clhgibbs
