// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#include "clhgibbs/qsim.hpp"

#include <algorithm>
#include <set>

namespace clhgibbs {

namespace {

constexpr long kMaxDenseDim = 4096;
constexpr double kClusterGap = 1e-8;

using Bits = std::vector<uint8_t>;

// Action of a Pauli string on computational basis states of a qubit
// register: P|i> = phase[i] |perm[i]>.
struct SignedPermutation {
  std::vector<long> perm;
  std::vector<cplx> phase;
};

std::optional<SignedPermutation> signed_permutation(const DensityMatrixState& s, const PauliString& p) {
  for (int d : s.dims)
    if (d != 2) return std::nullopt;
  const int n = static_cast<int>(s.sites.size());
  const long dim = 1L << n;
  long xmask = 0, zmask = 0, ymask = 0;
  for (const auto& [q, letter] : p.factors()) {
    const int pos = s.position(q);
    const long bit = 1L << (n - 1 - pos);
    if (letter == Pauli::X || letter == Pauli::Y) xmask |= bit;
    if (letter == Pauli::Z || letter == Pauli::Y) zmask |= bit;
    if (letter == Pauli::Y) ymask |= bit;
  }
  static const cplx ipow[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  const int ny = __builtin_popcountl(ymask);
  SignedPermutation sp;
  sp.perm.resize(dim);
  sp.phase.resize(dim);
  for (long i = 0; i < dim; ++i) {
    sp.perm[i] = i ^ xmask;
    // Z contributes (-1)^bit; Y = i X Z contributes i * (-1)^bit.
    const int minus = __builtin_popcountl(i & zmask) & 1;
    sp.phase[i] = ipow[(p.phase() + ny + 2 * minus) % 4];
  }
  return sp;
}

// Returns P rho P^dagger via the signed permutation.
Mat conjugate(const Mat& rho, const SignedPermutation& sp) {
  const long d = rho.rows();
  Mat out(d, d);
  for (long j = 0; j < d; ++j)
    for (long i = 0; i < d; ++i) out(sp.perm[i], sp.perm[j]) = sp.phase[i] * rho(i, j) * std::conj(sp.phase[j]);
  return out;
}

// Returns (rho + s P rho + s rho P + P rho P^dagger) / 4; perm is an involution.
Mat project(const Mat& rho, const SignedPermutation& sp, int s) {
  const long d = rho.rows();
  Mat out(d, d);
  for (long b = 0; b < d; ++b) {
    const long pb = sp.perm[b];
    const cplx phb = sp.phase[b], cpb = std::conj(sp.phase[pb]);
    for (long a = 0; a < d; ++a) {
      const long pa = sp.perm[a];
      const cplx pha = sp.phase[pa];
      out(a, b) = 0.25 * (rho(a, b) + static_cast<double>(s) * (pha * rho(pa, b) + rho(a, pb) * phb) +
                          pha * rho(pa, pb) * cpb);
    }
  }
  return out;
}

// Gaussian elimination helpers over F2.
void xor_into(Bits& a, const Bits& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] ^= b[i];
}

// Symplectic (x | z) vector of p over the qubit index map.
Bits symplectic(const PauliString& p, const std::map<int, int>& index, bool& outside) {
  const size_t m = index.size();
  Bits v(2 * m, 0);
  outside = false;
  for (const auto& [q, letter] : p.factors()) {
    auto it = index.find(q);
    if (it == index.end()) {
      outside = true;
      continue;
    }
    if (letter == Pauli::X || letter == Pauli::Y) v[it->second] = 1;
    if (letter == Pauli::Z || letter == Pauli::Y) v[m + it->second] = 1;
  }
  return v;
}

std::map<int, int> qubit_index(const std::vector<PauliString>& gens) {
  std::set<int> qs;
  for (const PauliString& g : gens)
    for (const auto& [q, l] : g.factors()) qs.insert(q);
  std::map<int, int> index;
  for (int q : qs) index[q] = static_cast<int>(index.size());
  return index;
}

int sign_of_phase(int phase) {
  if (phase == 0) return 1;
  if (phase == 2) return -1;
  throw ValidationError("product of generators has phase +-i");
}

}  // namespace

// ---------------------------------------------------------------- dense

int DensityMatrixState::position(SiteId s) const {
  auto it = std::find(sites.begin(), sites.end(), s);
  if (it == sites.end()) throw ValidationError("site " + std::to_string(s) + " is not part of the state");
  return static_cast<int>(it - sites.begin());
}

Mat DensityMatrixState::embed(const Mat& local, const std::vector<SiteId>& support) const {
  std::vector<int> pos;
  for (SiteId s : support) pos.push_back(position(s));
  return embed_operator(local, pos, dims);
}

DensityMatrixState maximally_mixed_state(const CommutingHamiltonian& h) {
  const long d = h.total_dim();
  if (d > kMaxDenseDim) throw OutOfScopeError("dense backend refuses total dimension above 4096");
  DensityMatrixState s;
  s.sites = h.sites();
  for (SiteId x : s.sites) s.dims.push_back(h.site_dims.at(x));
  s.rho = Mat::Identity(d, d) / static_cast<double>(d);
  return s;
}

DensityMatrixState exact_gibbs_state(const CommutingHamiltonian& h, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be finite and nonnegative");
  DensityMatrixState s = maximally_mixed_state(h);
  const HermitianEig e = hermitian_eig(h.dense());
  std::vector<double> logw(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) logw[i] = -beta * e.values(i);
  const double logz = log_sum_exp(logw);
  RealVec w(e.values.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = std::exp(logw[i] - logz);
  s.rho = e.vectors * w.asDiagonal() * e.vectors.adjoint();
  return s;
}

std::vector<SpectralProjector> term_projectors(const DensityMatrixState& space, const LocalTerm& term) {
  std::vector<SpectralProjector> out;
  if (term.is_pauli()) {
    const Mat p = space.embed(term.pauli->to_dense(term.support), term.support);
    const Mat id = Mat::Identity(p.rows(), p.cols());
    // Ascending: eigenvalue -|c| first.
    const double c = std::abs(term.coeff);
    const int s = term.coeff > 0 ? 1 : -1;
    out.push_back({-c, 0.5 * (id - s * p)});
    out.push_back({c, 0.5 * (id + s * p)});
    return out;
  }
  const HermitianEig e = hermitian_eig(term.matrix());
  const std::vector<int> starts = cluster_sorted(e.values, kClusterGap);
  for (size_t k = 0; k + 1 < starts.size(); ++k) {
    const int a = starts[k], b = starts[k + 1];
    const Mat v = e.vectors.middleCols(a, b - a);
    out.push_back({e.values.segment(a, b - a).mean(), space.embed(v * v.adjoint(), term.support)});
  }
  return out;
}

MeasurementOutcome measure_term(DensityMatrixState& state, const LocalTerm& term, Rng& rng) {
  MeasurementOutcome out;
  out.term = term.id;
  if (term.is_pauli()) {
    if (auto sp = signed_permutation(state, *term.pauli)) {
      // <P> = sum_j phase[j] rho(j, perm[j]).
      cplx expect = 0.0;
      const long d = state.rho.rows();
      for (long j = 0; j < d; ++j) expect += sp->phase[j] * state.rho(j, sp->perm[j]);
      const double p_plus = std::clamp(0.5 * (1.0 + expect.real()), 0.0, 1.0);
      const int s = rng.bernoulli(p_plus) ? 1 : -1;
      Mat next = project(state.rho, *sp, s);
      const double tr = next.trace().real();
      if (tr <= 0.0) throw InternalError("measurement produced a zero-probability branch");
      state.rho = next / tr;
      out.value = term.coeff * s;
      out.sector = out.value > 0 ? 1 : 0;
      return out;
    }
  }
  const std::vector<SpectralProjector> projs = term_projectors(state, term);
  std::vector<double> probs;
  for (const SpectralProjector& p : projs) probs.push_back(std::max(0.0, (p.projector * state.rho).trace().real()));
  double total = 0.0;
  for (double p : probs) total += p;
  double u = rng.uniform() * total;
  size_t k = 0;
  while (k + 1 < probs.size() && u >= probs[k]) u -= probs[k++];
  state.rho = projs[k].projector * state.rho * projs[k].projector / probs[k];
  out.value = projs[k].value;
  out.sector = static_cast<int>(k);
  return out;
}

void apply_pauli(DensityMatrixState& state, const PauliString& p) {
  if (auto sp = signed_permutation(state, p)) {
    state.rho = conjugate(state.rho, *sp);
    return;
  }
  std::vector<SiteId> support = p.support();
  if (support.empty()) return;
  const Mat m = state.embed(p.to_dense(support), support);
  state.rho = m * state.rho * m.adjoint();
}

double trace_distance(const DensityMatrixState& a, const DensityMatrixState& b) { return trace_distance(a.rho, b.rho); }

Mat pauli_conjugate(const DensityMatrixState& space, const Mat& rho, const PauliString& p) {
  const auto sp = signed_permutation(space, p);
  if (!sp) {
    const Mat m = space.embed(p.to_dense(p.support()), p.support());
    return m * rho * m.adjoint();
  }
  return conjugate(rho, *sp);
}

Mat pauli_project(const DensityMatrixState& space, const Mat& rho, const PauliString& p, int sign) {
  const auto sp = signed_permutation(space, p);
  if (!sp) {
    const Mat m = space.embed(p.to_dense(p.support()), p.support());
    const Mat proj = 0.5 * (Mat::Identity(m.rows(), m.cols()) + static_cast<double>(sign) * m);
    return proj * rho * proj;
  }
  return project(rho, *sp, sign);
}

// ---------------------------------------------------------------- frame

std::vector<FrameConstraint> frame_relations(const std::vector<PauliString>& generators) {
  const int k = static_cast<int>(generators.size());
  for (int i = 0; i < k; ++i) {
    if (!generators[i].is_hermitian()) throw ValidationError("frame generators must be Hermitian");
    for (int j = i + 1; j < k; ++j)
      if (!generators[i].commutes_with(generators[j]))
        throw ValidationError("frame generators " + std::to_string(i) + " and " + std::to_string(j) + " anti-commute");
  }
  const std::map<int, int> index = qubit_index(generators);
  std::vector<Bits> rows(k), tags(k, Bits(k, 0));
  bool outside = false;
  for (int i = 0; i < k; ++i) {
    rows[i] = symplectic(generators[i], index, outside);
    tags[i][i] = 1;
  }
  const size_t width = 2 * index.size();
  int rank = 0;
  for (size_t col = 0; col < width && rank < k; ++col) {
    int piv = -1;
    for (int r = rank; r < k; ++r)
      if (rows[r][col]) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[rank]);
    std::swap(tags[piv], tags[rank]);
    for (int r = 0; r < k; ++r)
      if (r != rank && rows[r][col]) {
        xor_into(rows[r], rows[rank]);
        xor_into(tags[r], tags[rank]);
      }
    ++rank;
  }
  std::vector<FrameConstraint> out;
  for (int r = rank; r < k; ++r) {
    FrameConstraint c;
    PauliString prod;
    for (int i = 0; i < k; ++i)
      if (tags[r][i]) {
        c.members.push_back(i);
        prod *= generators[i];
      }
    if (!prod.is_identity()) throw InternalError("frame relation does not multiply to identity");
    c.sign = sign_of_phase(prod.phase());
    out.push_back(std::move(c));
  }
  return out;
}

PauliFrameState::PauliFrameState(std::vector<PauliString> generators, std::vector<FrameConstraint> constraints)
    : generators_(std::move(generators)), constraints_(std::move(constraints)), eig_(generators_.size(), 1) {}

void PauliFrameState::set_eigenvalues(std::vector<int> eig) {
  if (eig.size() != generators_.size()) throw ValidationError("eigenvalue vector length mismatch");
  for (int e : eig)
    if (e != 1 && e != -1) throw ValidationError("frame eigenvalues must be +-1");
  eig_ = std::move(eig);
}

bool PauliFrameState::satisfies_constraints() const {
  for (const FrameConstraint& c : constraints_) {
    int prod = 1;
    for (int i : c.members) prod *= eig_[i];
    if (prod != c.sign) return false;
  }
  return true;
}

int PauliFrameState::find_generator(const PauliString& p) const {
  for (size_t i = 0; i < generators_.size(); ++i)
    if (generators_[i].factors() == p.factors()) return static_cast<int>(i);
  return -1;
}

int PauliFrameState::readout(const PauliString& p) const {
  if (!p.is_hermitian()) throw ValidationError("readout needs a Hermitian Pauli string");
  if (p.is_identity()) return sign_of_phase(p.phase());
  const int g = find_generator(p);
  if (g >= 0) return eig_[g] * sign_of_phase((p.phase() - generators_[g].phase() + 4) % 4);

  std::vector<std::pair<int, int>> key;
  for (const auto& [q, l] : p.factors()) key.push_back({q, static_cast<int>(l)});
  auto cached = decomposition_cache_.find(key);
  std::vector<int> members;
  if (cached != decomposition_cache_.end()) {
    members = cached->second;
  } else {
    const std::map<int, int> index = qubit_index(generators_);
    bool outside = false;
    Bits target = symplectic(p, index, outside);
    if (outside) throw ValidationError("term is not expressible in the frame's generator set");
    const int k = static_cast<int>(generators_.size());
    std::vector<Bits> rows(k), tags(k, Bits(k, 0));
    bool dummy = false;
    for (int i = 0; i < k; ++i) {
      rows[i] = symplectic(generators_[i], index, dummy);
      tags[i][i] = 1;
    }
    Bits combo(k, 0);
    int rank = 0;
    for (size_t col = 0; col < target.size() && rank < k; ++col) {
      int piv = -1;
      for (int r = rank; r < k; ++r)
        if (rows[r][col]) {
          piv = r;
          break;
        }
      if (piv < 0) continue;
      std::swap(rows[piv], rows[rank]);
      std::swap(tags[piv], tags[rank]);
      for (int r = 0; r < k; ++r)
        if (r != rank && rows[r][col]) {
          xor_into(rows[r], rows[rank]);
          xor_into(tags[r], tags[rank]);
        }
      if (target[col]) {
        xor_into(target, rows[rank]);
        xor_into(combo, tags[rank]);
      }
      ++rank;
    }
    if (std::any_of(target.begin(), target.end(), [](uint8_t b) { return b != 0; }))
      throw ValidationError("term is not expressible in the frame's generator set");
    for (int i = 0; i < k; ++i)
      if (combo[i]) members.push_back(i);
    decomposition_cache_[key] = members;
  }
  PauliString prod;
  int value = 1;
  for (int i : members) {
    prod *= generators_[i];
    value *= eig_[i];
  }
  if (prod.factors() != p.factors()) throw InternalError("frame decomposition mismatch");
  return value * sign_of_phase((p.phase() - prod.phase() + 4) % 4);
}

std::vector<int> PauliFrameState::anticommuting(const PauliString& p) const {
  std::vector<int> out;
  for (size_t i = 0; i < generators_.size(); ++i)
    if (!generators_[i].commutes_with(p)) out.push_back(static_cast<int>(i));
  return out;
}

void PauliFrameState::apply_pauli(const PauliString& p) { flip(anticommuting(p)); }

PauliFrameState frame_initialize_mixed(const std::vector<PauliString>& generators,
                                       const std::vector<FrameConstraint>& constraints, Rng& rng,
                                       const std::map<int, int>& fixed) {
  const int k = static_cast<int>(generators.size());
  // Unknowns e_i with eigenvalue (-1)^{e_i}; last column is the right side.
  std::vector<Bits> eq;
  for (const FrameConstraint& c : constraints) {
    Bits row(k + 1, 0);
    for (int i : c.members) row[i] ^= 1;
    row[k] = c.sign < 0 ? 1 : 0;
    eq.push_back(row);
  }
  for (const auto& [i, v] : fixed) {
    if (i < 0 || i >= k || (v != 1 && v != -1)) throw ValidationError("invalid fixed frame assignment");
    Bits row(k + 1, 0);
    row[i] = 1;
    row[k] = v < 0 ? 1 : 0;
    eq.push_back(row);
  }
  std::vector<int> pivot_col;
  int rank = 0;
  for (int col = 0; col < k && rank < static_cast<int>(eq.size()); ++col) {
    int piv = -1;
    for (int r = rank; r < static_cast<int>(eq.size()); ++r)
      if (eq[r][col]) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(eq[piv], eq[rank]);
    for (int r = 0; r < static_cast<int>(eq.size()); ++r)
      if (r != rank && eq[r][col]) xor_into(eq[r], eq[rank]);
    pivot_col.push_back(col);
    ++rank;
  }
  for (int r = rank; r < static_cast<int>(eq.size()); ++r)
    if (eq[r][k]) throw ValidationError("inconsistent frame constraints");
  std::vector<uint8_t> e(k, 0);
  std::vector<bool> is_pivot(k, false);
  for (int c : pivot_col) is_pivot[c] = true;
  for (int i = 0; i < k; ++i)
    if (!is_pivot[i]) e[i] = rng.bernoulli(0.5) ? 1 : 0;
  for (int r = 0; r < rank; ++r) {
    uint8_t v = eq[r][k];
    for (int i = 0; i < k; ++i)
      if (i != pivot_col[r] && eq[r][i]) v ^= e[i];
    e[pivot_col[r]] = v;
  }
  PauliFrameState state(generators, constraints);
  std::vector<int> eig(k);
  for (int i = 0; i < k; ++i) eig[i] = e[i] ? -1 : 1;
  state.set_eigenvalues(std::move(eig));
  return state;
}

std::vector<PauliString> hamiltonian_generators(const CommutingHamiltonian& h) {
  std::vector<PauliString> gens;
  for (const LocalTerm& t : h.terms) {
    if (!t.is_pauli()) throw ValidationError("frame backend needs Pauli terms");
    gens.push_back(*t.pauli);
  }
  return gens;
}

MeasurementOutcome measure_term(const PauliFrameState& state, const LocalTerm& term) {
  if (!term.is_pauli()) throw ValidationError("frame backend can only measure Pauli terms");
  const int s = state.readout(*term.pauli);
  MeasurementOutcome out;
  out.term = term.id;
  out.value = term.coeff * s;
  out.sector = out.value > 0 ? 1 : 0;
  return out;
}

void apply_pauli(PauliFrameState& state, const PauliString& p) { state.apply_pauli(p); }

// ---------------------------------------------------------------- programs

namespace {

double orc_apply_probability(double beta, double lambda) { return sigmoid(2.0 * beta * lambda); }

template <typename Measure, typename Apply>
Trajectory run_ops(const Program& prog, const CommutingHamiltonian& h, Rng& rng, Measure measure, Apply apply) {
  Trajectory t;
  for (const ProgramOp& op : prog.ops) {
    switch (op.kind) {
      case ProgramOp::Kind::measure: {
        const MeasurementOutcome m = measure(h.terms.at(op.term));
        t.push_back(m.value > 0 ? 1 : -1);
        break;
      }
      case ProgramOp::Kind::apply:
        apply(op.pauli);
        break;
      case ProgramOp::Kind::orc: {
        const MeasurementOutcome m = measure(h.terms.at(op.term));
        t.push_back(m.value > 0 ? 1 : -1);
        const bool correct = rng.bernoulli(orc_apply_probability(op.beta, m.value));
        if (correct) apply(op.pauli);
        t.push_back(correct ? 1 : 0);
        break;
      }
    }
  }
  return t;
}

}  // namespace

Trajectory run_program_dense(const Program& prog, const CommutingHamiltonian& h, DensityMatrixState state, Rng& rng) {
  return run_ops(
      prog, h, rng, [&](const LocalTerm& term) { return measure_term(state, term, rng); },
      [&](const PauliString& p) { apply_pauli(state, p); });
}

Trajectory run_program_frame(const Program& prog, const CommutingHamiltonian& h, PauliFrameState state, Rng& rng) {
  return run_ops(
      prog, h, rng, [&](const LocalTerm& term) { return measure_term(state, term); },
      [&](const PauliString& p) { apply_pauli(state, p); });
}

double trajectory_tv(const std::map<Trajectory, long>& a, long na, const std::map<Trajectory, long>& b, long nb) {
  double s = 0.0;
  for (const auto& [t, c] : a) {
    auto it = b.find(t);
    const double q = it == b.end() ? 0.0 : static_cast<double>(it->second) / nb;
    s += std::abs(static_cast<double>(c) / na - q);
  }
  for (const auto& [t, c] : b)
    if (!a.count(t)) s += static_cast<double>(c) / nb;
  return 0.5 * s;
}

}  // namespace clhgibbs
