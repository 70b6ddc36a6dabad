// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#include "clhgibbs/algebra.hpp"

#include <algorithm>
#include <numeric>

namespace clhgibbs {

namespace {

constexpr double kSchmidtTol = 1e-10;
constexpr double kSpanTol = 1e-9;
constexpr double kCommuteTol = 1e-9;
constexpr double kBlockGap = 1e-7;
constexpr double kFactorResidual = 1e-8;

cplx hs_inner(const Mat& a, const Mat& b) { return (a.adjoint() * b).trace(); }

// Adds the component of m orthogonal to `basis`; returns whether it grew.
bool add_to_span(std::vector<Mat>& basis, const Mat& m) {
  const double norm = m.norm();
  if (norm < 1e-14) return false;
  Mat v = m;
  for (int pass = 0; pass < 2; ++pass)
    for (const Mat& b : basis) v -= hs_inner(b, v) * b;
  const double rest = v.norm();
  if (rest <= kSpanTol * norm) return false;
  basis.push_back(v / rest);
  return true;
}

long product(const std::vector<int>& dims) {
  long p = 1;
  for (int d : dims) p *= d;
  return p;
}

std::vector<long> strides_of(const std::vector<int>& dims) {
  std::vector<long> s(dims.size());
  long acc = 1;
  for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
    s[i] = acc;
    acc *= dims[i];
  }
  return s;
}

// Tr_{other legs}(r) / dim(other legs), kept legs in the order of `keep`.
Mat reduce_to_legs(const Mat& r, const std::vector<int>& legs, const std::vector<int>& keep) {
  const std::vector<long> stride = strides_of(legs);
  std::vector<int> other;
  for (int i = 0; i < static_cast<int>(legs.size()); ++i)
    if (std::find(keep.begin(), keep.end(), i) == keep.end()) other.push_back(i);
  std::vector<int> kd, od;
  for (int k : keep) kd.push_back(legs[k]);
  for (int o : other) od.push_back(legs[o]);
  const long nk = product(kd), no = product(od);
  auto offset = [&](long idx, const std::vector<int>& which, const std::vector<int>& d) {
    const std::vector<long> s = strides_of(d);
    long off = 0;
    for (size_t i = 0; i < which.size(); ++i) off += ((idx / s[i]) % d[i]) * stride[which[i]];
    return off;
  };
  std::vector<long> koff(nk), ooff(no);
  for (long i = 0; i < nk; ++i) koff[i] = offset(i, keep, kd);
  for (long i = 0; i < no; ++i) ooff[i] = offset(i, other, od);
  Mat out = Mat::Zero(nk, nk);
  for (long a = 0; a < nk; ++a)
    for (long b = 0; b < nk; ++b) {
      cplx s = 0.0;
      for (long o = 0; o < no; ++o) s += r(koff[a] + ooff[o], koff[b] + ooff[o]);
      out(a, b) = s / static_cast<double>(no);
    }
  return out;
}

// Tensor mode product: replaces leg `mode` (dimension W.cols()) by W.rows().
Vec apply_mode(const Vec& t, const std::vector<int>& dims, int mode, const Mat& w) {
  long pre = 1, post = 1;
  for (int i = 0; i < mode; ++i) pre *= dims[i];
  for (int i = mode + 1; i < static_cast<int>(dims.size()); ++i) post *= dims[i];
  const long din = w.cols(), dout = w.rows();
  Vec out = Vec::Zero(pre * dout * post);
  for (long a = 0; a < pre; ++a)
    for (long b = 0; b < din; ++b)
      for (long c = 0; c < post; ++c) {
        const cplx v = t(a * din * post + b * post + c);
        if (v == cplx(0.0)) continue;
        for (long r = 0; r < dout; ++r) out(a * dout * post + r * post + c) += w(r, b) * v;
      }
  return out;
}

Mat random_hermitian_element(const std::vector<Mat>& basis, Rng& rng) {
  Mat h = Mat::Zero(basis[0].rows(), basis[0].cols());
  for (const Mat& b : basis) {
    h += rng.normal() * 0.5 * (b + b.adjoint());
    h += rng.normal() * cplx(0, -0.5) * (b - b.adjoint());
  }
  return h;
}

Mat random_element(const std::vector<Mat>& basis, Rng& rng) {
  Mat g = Mat::Zero(basis[0].rows(), basis[0].cols());
  for (const Mat& b : basis) g += cplx(rng.normal(), rng.normal()) * b;
  return g;
}

struct Peeled {
  Mat unitary;
  std::vector<int> factor_dims;
  int free_dim = 1;
};

// Splits an m-dimensional space into factor (x) ... (x) free such that
// algebra i acts as a full matrix algebra on factor i only.
Peeled peel_factors(std::vector<std::vector<Mat>> algs, int m, Rng& rng) {
  Peeled out;
  out.unitary = Mat::Identity(m, m);
  long prefix = 1;
  int cur = m;
  for (size_t idx = 0; idx < algs.size(); ++idx) {
    const std::vector<Mat>& a = algs[idx];
    const HermitianEig e = hermitian_eig(random_hermitian_element(a, rng));
    const std::vector<int> starts = cluster_sorted(e.values, kBlockGap);
    const int f = static_cast<int>(starts.size()) - 1;
    if (cur % f != 0) throw InternalError("factor peeling: unequal eigenvalue multiplicities");
    const int r = cur / f;
    for (int k = 0; k < f; ++k)
      if (starts[k + 1] - starts[k] != r) throw InternalError("factor peeling: unequal eigenvalue multiplicities");
    out.factor_dims.push_back(f);
    if (f == 1) continue;

    Mat u(cur, cur);
    u.leftCols(r) = e.vectors.leftCols(r);
    for (int c = 0; c < r; ++c) fix_phase(u.col(c));
    bool aligned = false;
    for (int attempt = 0; attempt < 16 && !aligned; ++attempt) {
      const Mat g = random_element(a, rng);
      aligned = true;
      for (int k = 1; k < f; ++k) {
        const Mat ek = e.vectors.middleCols(starts[k], r);
        const Mat tk = ek.adjoint() * g * u.leftCols(r);
        const double nrm = tk.norm();
        if (nrm < 1e-6 * g.norm()) {
          aligned = false;
          break;
        }
        u.middleCols(k * r, r) = ek * tk * (std::sqrt(static_cast<double>(r)) / nrm);
      }
    }
    if (!aligned) throw InternalError("factor peeling: could not align multiplicity spaces");

    // Remaining algebras act as I_f (x) c in the new coordinates.
    for (size_t l = idx + 1; l < algs.size(); ++l) {
      for (Mat& b : algs[l]) {
        const Mat conj = u.adjoint() * b * u;
        Mat c = Mat::Zero(r, r);
        for (int k = 0; k < f; ++k) c += conj.block(k * r, k * r, r, r);
        b = c / static_cast<double>(f);
      }
    }
    Mat lift = Mat::Zero(prefix * cur, prefix * cur);
    for (long p = 0; p < prefix; ++p) lift.block(p * cur, p * cur, cur, cur) = u;
    out.unitary = out.unitary * lift;
    prefix *= f;
    cur = r;
  }
  out.free_dim = cur;
  return out;
}

Mat apply_basis(const Mat& m, const Mat& u) { return u.adjoint() * m * u; }

// Traceless Hermitian generator of a 2-dim qubit algebra with the sign
// convention documented on qubit_case_classify.
Mat qubit_generator(const InducedAlgebra& a) {
  Mat b = a.basis.at(1);
  Mat h = b + b.adjoint();
  if (h.norm() < 1e-8) h = cplx(0, 1) * (b - b.adjoint());
  h -= (h.trace() / 2.0) * Mat::Identity(2, 2);
  const double nz = (h * pauli_matrix('Z')).trace().real();
  const double nx = (h * pauli_matrix('X')).trace().real();
  const double ny = (h * pauli_matrix('Y')).trace().real();
  double dominant = nz;
  if (std::abs(nx) > std::abs(dominant) + 1e-12) dominant = nx;
  if (std::abs(ny) > std::abs(dominant) + 1e-12 && std::abs(ny) > std::abs(nx) + 1e-12) dominant = ny;
  if (dominant < 0) h = -h;
  return h / h.norm();
}

// Columns ordered by descending eigenvalue, phases fixed.
Mat descending_basis(const Mat& h) {
  const HermitianEig e = hermitian_eig(h);
  Mat u(2, 2);
  u.col(0) = e.vectors.col(1);
  u.col(1) = e.vectors.col(0);
  fix_phase(u.col(0));
  fix_phase(u.col(1));
  return u;
}

double offdiag_norm(const Mat& m) {
  Mat d = m;
  d.diagonal().setZero();
  return d.norm();
}

}  // namespace

InducedAlgebra generate_algebra(SiteId site, int dim, const std::vector<Mat>& generators, TermId provenance) {
  InducedAlgebra a;
  a.site = site;
  a.dim = dim;
  a.provenance = provenance;
  a.basis.push_back(Mat::Identity(dim, dim) / std::sqrt(static_cast<double>(dim)));
  for (const Mat& g : generators) {
    if (add_to_span(a.basis, g)) a.generators.push_back(g);
    add_to_span(a.basis, g.adjoint());
  }
  // Close under products; the span dimension is bounded by dim^2.
  bool grew = true;
  while (grew) {
    grew = false;
    const size_t n = a.basis.size();
    for (size_t i = 1; i < n && a.basis.size() < static_cast<size_t>(dim * dim); ++i)
      for (size_t j = 1; j < n && a.basis.size() < static_cast<size_t>(dim * dim); ++j)
        grew |= add_to_span(a.basis, a.basis[i] * a.basis[j]);
  }
  a.trivial = a.basis.size() == 1;
  return a;
}

InducedAlgebra induced_algebra(const LocalTerm& term, SiteId site, const std::map<SiteId, int>& site_dims) {
  const auto it = std::find(term.support.begin(), term.support.end(), site);
  if (it == term.support.end()) throw ValidationError("induced_algebra: site is not in the term's support");
  const int p = static_cast<int>(it - term.support.begin());
  std::vector<int> dims;
  for (SiteId s : term.support) dims.push_back(site_dims.at(s));
  const int d = dims[p];
  const long dr = product(dims) / d;
  const Mat m = term.matrix();
  const std::vector<long> stride = strides_of(dims);
  // Realign M[(a, rest), (a', rest')] as R[(a, a'), (rest, rest')].
  Mat r(d * d, dr * dr);
  const long total = product(dims);
  std::vector<long> rest_index(total), site_digit(total);
  for (long i = 0; i < total; ++i) {
    site_digit[i] = (i / stride[p]) % d;
    const long high = i / (stride[p] * d);
    const long low = i % stride[p];
    rest_index[i] = high * stride[p] + low;
  }
  for (long i = 0; i < total; ++i)
    for (long j = 0; j < total; ++j) r(site_digit[i] * d + site_digit[j], rest_index[i] * dr + rest_index[j]) = m(i, j);
  Eigen::BDCSVD<Mat> svd(r, Eigen::ComputeThinU);
  const RealVec& sv = svd.singularValues();
  std::vector<Mat> factors;
  const double smax = sv.size() ? sv(0) : 0.0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) <= kSchmidtTol * std::max(1.0, smax)) break;
    Mat f(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) f(a, b) = svd.matrixU()(a * d + b, k);
    factors.push_back(f);
  }
  return generate_algebra(site, d, factors, term.id);
}

std::vector<Mat> algebra_center(const InducedAlgebra& a) {
  const int k = static_cast<int>(a.basis.size());
  std::vector<Mat> gens = a.generators;
  for (const Mat& g : a.generators) gens.push_back(g.adjoint());
  // Gram matrix of x -> ([x, g])_g restricted to the basis.
  Mat gram = Mat::Zero(k, k);
  std::vector<std::vector<Mat>> comm(k);
  for (int i = 0; i < k; ++i)
    for (const Mat& g : gens) comm[i].push_back(a.basis[i] * g - g * a.basis[i]);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      cplx s = 0.0;
      for (size_t t = 0; t < gens.size(); ++t) s += hs_inner(comm[i][t], comm[j][t]);
      gram(i, j) = s;
      gram(j, i) = std::conj(s);
    }
  const HermitianEig e = hermitian_eig(gram);
  const double scale = std::max(1.0, e.values.cwiseAbs().maxCoeff());
  std::vector<Mat> center;
  for (int c = 0; c < k; ++c) {
    if (e.values(c) > 1e-10 * scale) continue;
    Mat x = Mat::Zero(a.dim, a.dim);
    for (int i = 0; i < k; ++i) x += e.vectors(i, c) * a.basis[i];
    // Parts at rounding level relative to x carry no direction.
    const double floor = 1e-8 * x.norm();
    const Mat re = 0.5 * (x + x.adjoint());
    const Mat im = cplx(0, -0.5) * (x - x.adjoint());
    if (re.norm() > floor) add_to_span(center, re);
    if (im.norm() > floor) add_to_span(center, im);
  }
  // Orthonormal complex span of Hermitian elements; re-Hermitize.
  for (Mat& z : center) {
    Mat h = 0.5 * (z + z.adjoint());
    if (h.norm() < 1e-8) h = cplx(0, -0.5) * (z - z.adjoint());
    z = h / h.norm();
  }
  return center;
}

bool algebras_commute(const InducedAlgebra& a, const InducedAlgebra& b, double tol) {
  for (const Mat& x : a.basis)
    for (const Mat& y : b.basis)
      if ((x * y - y * x).norm() > tol) return false;
  return true;
}

Mat BlockDecomposition::unitary() const {
  Mat u(dim, dim);
  int col = 0;
  for (const Block& b : blocks) {
    u.middleCols(col, b.block_dim()) = b.isometry;
    col += b.block_dim();
  }
  return u;
}

BlockDecomposition::Label BlockDecomposition::decode(int value) const {
  Label l;
  for (const Block& b : blocks) {
    if (value < b.block_dim()) {
      std::vector<int> legs = b.factor_dims;
      legs.push_back(b.free_dim);
      const SpinConfig digits = config_from_index(value, legs);
      l.factors.assign(digits.begin(), digits.end() - 1);
      l.free = digits.back();
      return l;
    }
    value -= b.block_dim();
    ++l.block;
  }
  throw ValidationError("classical value out of range for site " + std::to_string(site));
}

int BlockDecomposition::encode(const Label& label) const {
  int offset = 0;
  for (int j = 0; j < label.block; ++j) offset += blocks[j].block_dim();
  const Block& b = blocks.at(label.block);
  std::vector<int> legs = b.factor_dims;
  legs.push_back(b.free_dim);
  SpinConfig digits = label.factors;
  digits.push_back(label.free);
  return offset + static_cast<int>(config_index(digits, legs));
}

BlockDecomposition structure_decompose(SiteId site, int dim, const std::vector<InducedAlgebra>& incident,
                                       uint64_t seed) {
  for (size_t i = 0; i < incident.size(); ++i) {
    if (incident[i].dim != dim) throw ValidationError("structure_decompose: algebra dimension mismatch");
    for (size_t j = i + 1; j < incident.size(); ++j)
      if (!algebras_commute(incident[i], incident[j], kCommuteTol))
        throw ValidationError("structure_decompose: incident algebras of terms " +
                              std::to_string(incident[i].provenance) + " and " +
                              std::to_string(incident[j].provenance) + " do not commute on site " +
                              std::to_string(site));
  }
  BlockDecomposition out;
  out.site = site;
  out.dim = dim;
  for (const InducedAlgebra& a : incident) out.incident.push_back(a.provenance);

  std::vector<Mat> central;
  for (const InducedAlgebra& a : incident)
    for (const Mat& z : algebra_center(a)) central.push_back(z);
  Rng rng(stream_seed(seed, static_cast<uint64_t>(site)));
  std::vector<Mat> spaces;
  if (central.empty()) {
    spaces.push_back(Mat::Identity(dim, dim));
  } else {
    auto sample_center = [&]() {
      Mat z = Mat::Zero(dim, dim);
      for (const Mat& c : central) z += rng.normal() * c;
      return z;
    };
    const HermitianEig e = hermitian_eig(sample_center());
    const std::vector<int> starts = cluster_sorted(e.values, kBlockGap);
    for (size_t k = 0; k + 1 < starts.size(); ++k)
      spaces.push_back(e.vectors.middleCols(starts[k], starts[k + 1] - starts[k]));
    // A second central sample must be scalar on every block.
    const Mat z2 = sample_center();
    for (const Mat& v : spaces) {
      const Mat r = v.adjoint() * z2 * v;
      const cplx mean = r.trace() / static_cast<double>(r.rows());
      const Mat leak = z2 * v - v * r;
      if ((r - mean * Mat::Identity(r.rows(), r.cols())).norm() > 1e-7 || leak.norm() > 1e-7)
        throw InternalError("structure_decompose: block decomposition is not stable");
    }
  }
  // Canonical order: by first row carrying weight, heavier weight first on ties.
  auto order_key = [](const Mat& v) {
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      const double w = v.row(r).squaredNorm();
      if (w > 1e-6) return std::make_pair(static_cast<double>(r), -w);
    }
    return std::make_pair(static_cast<double>(v.rows()), 0.0);
  };
  std::stable_sort(spaces.begin(), spaces.end(),
                   [&](const Mat& a, const Mat& b) { return order_key(a) < order_key(b); });
  for (const Mat& v : spaces) {
    std::vector<std::vector<Mat>> restricted;
    for (const InducedAlgebra& a : incident) {
      std::vector<Mat> rb;
      for (const Mat& b : a.basis) rb.push_back(v.adjoint() * b * v);
      restricted.push_back(std::move(rb));
    }
    const Peeled p = peel_factors(restricted, static_cast<int>(v.cols()), rng);
    Block b;
    b.isometry = v * p.unitary;
    b.factor_dims = p.factor_dims;
    b.free_dim = p.free_dim;
    out.blocks.push_back(std::move(b));
  }
  return out;
}

double EigenbasisMap::term_energy(int t, const SpinConfig& x) const {
  const TermSlots& ts = terms[t];
  std::vector<int> blocks;
  int index = 0;
  const EdgeSpectrum* spec = nullptr;
  std::vector<BlockDecomposition::Label> labels;
  for (int p : ts.positions) {
    labels.push_back(decomps[p].decode(x[p]));
    blocks.push_back(labels.back().block);
  }
  spec = &ts.spectra.at(blocks);
  for (size_t i = 0; i < ts.positions.size(); ++i) {
    const Block& b = decomps[ts.positions[i]].blocks[blocks[i]];
    index = index * b.factor_dims[ts.slots[i]] + labels[i].factors[ts.slots[i]];
  }
  return spec->values(index);
}

double EigenbasisMap::energy(const SpinConfig& x) const {
  double e = 0.0;
  for (size_t t = 0; t < terms.size(); ++t) e += term_energy(static_cast<int>(t), x);
  return e;
}

Vec EigenbasisMap::state(const SpinConfig& x) const {
  const int n = static_cast<int>(sites.size());
  std::vector<BlockDecomposition::Label> labels(n);
  std::vector<std::vector<int>> legs(n);
  std::vector<int> local_dims(n);
  for (int i = 0; i < n; ++i) {
    labels[i] = decomps[i].decode(x[i]);
    const Block& b = decomps[i].blocks[labels[i].block];
    legs[i] = b.factor_dims;
    legs[i].push_back(b.free_dim);
    local_dims[i] = b.block_dim();
  }
  // Per-term eigenvector column selected by the configuration.
  struct Active {
    const Vec* vec;
    std::vector<int> positions, slots, fdims;
    Vec col;
  };
  std::vector<Active> active;
  for (const TermSlots& ts : terms) {
    Active a;
    std::vector<int> blocks;
    int index = 0;
    for (size_t k = 0; k < ts.positions.size(); ++k) {
      const int p = ts.positions[k];
      blocks.push_back(labels[p].block);
      const int fd = legs[p][ts.slots[k]];
      a.fdims.push_back(fd);
      index = index * fd + labels[p].factors[ts.slots[k]];
    }
    a.col = ts.spectra.at(blocks).vectors.col(index);
    a.positions = ts.positions;
    a.slots = ts.slots;
    active.push_back(std::move(a));
  }
  const long total = product(local_dims);
  Vec psi = Vec::Zero(total);
  std::vector<std::vector<int>> leg_digits(n);
  for (long idx = 0; idx < total; ++idx) {
    const SpinConfig local = config_from_index(idx, local_dims);
    bool zero = false;
    for (int i = 0; i < n && !zero; ++i) {
      const SpinConfig d = config_from_index(local[i], legs[i]);
      leg_digits[i].assign(d.begin(), d.end());
      zero = leg_digits[i].back() != labels[i].free;
    }
    if (zero) continue;
    cplx amp = 1.0;
    for (const Active& a : active) {
      int row = 0;
      for (size_t k = 0; k < a.positions.size(); ++k) row = row * a.fdims[k] + leg_digits[a.positions[k]][a.slots[k]];
      amp *= a.col(row);
      if (amp == cplx(0.0)) break;
    }
    psi(idx) = amp;
  }
  std::vector<int> cur = local_dims;
  for (int i = 0; i < n; ++i) {
    psi = apply_mode(psi, cur, i, decomps[i].blocks[labels[i].block].isometry);
    cur[i] = dims[i];
  }
  return psi;
}

Mat EigenbasisMap::mixture(const std::vector<double>& probs) const {
  const long d = product(dims);
  std::vector<Vec> cols;
  for (size_t k = 0; k < probs.size(); ++k)
    if (probs[k] > 0.0) cols.push_back(std::sqrt(probs[k]) * state(config_from_index(static_cast<long long>(k), dims)));
  Mat psi(d, static_cast<long>(cols.size()));
  for (size_t k = 0; k < cols.size(); ++k) psi.col(static_cast<long>(k)) = cols[k];
  return psi * psi.adjoint();
}

Classicalization classicalize_2local(const CommutingHamiltonian& h2, uint64_t seed) {
  for (const LocalTerm& t : h2.terms)
    if (t.support.size() > 2) throw ValidationError("classicalize_2local: term " + std::to_string(t.id) + " is not 2-local");
  const CommutationReport rep = verify_commuting(h2);
  if (!rep.ok)
    throw ValidationError("classicalize_2local: terms " + std::to_string(h2.terms[rep.violations[0].i].id) + " and " +
                          std::to_string(h2.terms[rep.violations[0].j].id) + " do not commute");
  Classicalization out;
  EigenbasisMap& map = out.map;
  map.sites = h2.sites();
  const int n = static_cast<int>(map.sites.size());
  std::map<SiteId, int> pos;
  for (int i = 0; i < n; ++i) {
    pos[map.sites[i]] = i;
    map.dims.push_back(h2.site_dims.at(map.sites[i]));
  }
  std::vector<std::vector<int>> incident(n);
  for (size_t t = 0; t < h2.terms.size(); ++t)
    for (SiteId s : h2.terms[t].support) incident[pos[s]].push_back(static_cast<int>(t));
  for (int i = 0; i < n; ++i) {
    std::vector<InducedAlgebra> algs;
    for (int t : incident[i]) algs.push_back(induced_algebra(h2.terms[t], map.sites[i], h2.site_dims));
    map.decomps.push_back(structure_decompose(map.sites[i], map.dims[i], algs, seed));
  }

  out.classical = ClassicalHamiltonian(map.dims, map.sites);
  for (size_t t = 0; t < h2.terms.size(); ++t) {
    const LocalTerm& term = h2.terms[t];
    EigenbasisMap::TermSlots ts;
    ts.id = term.id;
    for (SiteId s : term.support) {
      const int p = pos[s];
      ts.positions.push_back(p);
      ts.slots.push_back(static_cast<int>(std::find(incident[p].begin(), incident[p].end(), static_cast<int>(t)) -
                                          incident[p].begin()));
    }
    const Mat m = term.matrix();
    const int k = static_cast<int>(ts.positions.size());
    std::vector<int> nblocks;
    for (int p : ts.positions) nblocks.push_back(static_cast<int>(map.decomps[p].blocks.size()));
    for (long combo = 0; combo < product(nblocks); ++combo) {
      const SpinConfig blocks = config_from_index(combo, nblocks);
      Mat w = Mat::Identity(1, 1);
      std::vector<int> legs, keep;
      for (int i = 0; i < k; ++i) {
        const Block& b = map.decomps[ts.positions[i]].blocks[blocks[i]];
        w = kron(w, b.isometry);
        keep.push_back(static_cast<int>(legs.size()) + ts.slots[i]);
        legs.insert(legs.end(), b.factor_dims.begin(), b.factor_dims.end());
        legs.push_back(b.free_dim);
      }
      const Mat r = w.adjoint() * m * w;
      const Mat he = reduce_to_legs(r, legs, keep);
      const double residual = (r - embed_operator(he, keep, legs)).norm();
      if (residual > kFactorResidual * std::max(1.0, r.norm()))
        throw InternalError("classicalize_2local: term " + std::to_string(term.id) +
                            " does not restrict to a single factor pair (residual " + fmt17(residual) + ")");
      const HermitianEig e = hermitian_eig(he);
      EdgeSpectrum spec{e.values, e.vectors};
      for (Eigen::Index c = 0; c < spec.vectors.cols(); ++c) fix_phase(spec.vectors.col(c));
      ts.spectra[std::vector<int>(blocks.begin(), blocks.end())] = std::move(spec);
    }
    map.terms.push_back(std::move(ts));
  }
  for (size_t t = 0; t < map.terms.size(); ++t) {
    ClassicalTerm ct;
    ct.support = map.terms[t].positions;
    std::vector<int> sub;
    for (int p : ct.support) sub.push_back(map.dims[p]);
    SpinConfig x(n, 0);
    for (long v = 0; v < product(sub); ++v) {
      const SpinConfig c = config_from_index(v, sub);
      for (size_t i = 0; i < ct.support.size(); ++i) x[ct.support[i]] = c[i];
      ct.table.push_back(map.term_energy(static_cast<int>(t), x));
    }
    out.classical.add_term(std::move(ct));
  }
  return out;
}

std::string qubit_case_name(QubitCase c) {
  switch (c) {
    case QubitCase::trivial_on_a: return "trivial-on-a";
    case QubitCase::trivial_on_b: return "trivial-on-b";
    default: return "jointly-diagonal";
  }
}

QubitCaseResult qubit_case_classify(const LocalTerm& h) {
  if (h.support.size() != 2) throw ValidationError("qubit_case_classify needs a two-site term");
  const std::map<SiteId, int> dims = {{h.support[0], 2}, {h.support[1], 2}};
  const Mat m = h.matrix();
  if (m.rows() != 4) throw ValidationError("qubit_case_classify needs qubit sites");
  const InducedAlgebra aa = induced_algebra(h, h.support[0], dims);
  const InducedAlgebra ab = induced_algebra(h, h.support[1], dims);
  if (aa.basis.size() > 2 || ab.basis.size() > 2)
    throw ValidationError("non-CLH input: term " + std::to_string(h.id) +
                          " induces a non-commutative algebra on a qubit");
  QubitCaseResult out;
  if (!aa.trivial) out.ua = descending_basis(qubit_generator(aa));
  if (!ab.trivial) out.ub = descending_basis(qubit_generator(ab));
  out.kind = aa.trivial ? QubitCase::trivial_on_a : ab.trivial ? QubitCase::trivial_on_b : QubitCase::jointly_diagonal;
  out.residual = offdiag_norm(apply_basis(m, kron(out.ua, out.ub)));
  if (out.residual > 1e-8 * std::max(1.0, m.norm()))
    throw ValidationError("non-CLH input: term " + std::to_string(h.id) + " is not diagonal in a product basis");
  return out;
}

Vec QubitClassicalization::state(const SpinConfig& x) const {
  Vec psi = Vec::Ones(1);
  for (size_t i = 0; i < bases.size(); ++i) {
    const Vec col = bases[i].col(x[i]);
    Vec next(psi.size() * 2);
    for (Eigen::Index a = 0; a < psi.size(); ++a) next.segment(2 * a, 2) = psi(a) * col;
    psi = next;
  }
  return psi;
}

Mat QubitClassicalization::mixture(const std::vector<double>& probs) const {
  const long d = 1L << bases.size();
  const std::vector<int> dims(bases.size(), 2);
  Mat rho = Mat::Zero(d, d);
  // (U_0 (x) ... (x) U_{n-1}) diag(p) (...)^dagger.
  Mat u = Mat::Identity(1, 1);
  for (const Mat& b : bases) u = kron(u, b);
  RealVec p(d);
  for (long k = 0; k < d; ++k) p(k) = probs[k];
  rho = u * p.asDiagonal() * u.adjoint();
  return rho;
}

QubitClassicalization classicalize_qubit_2local(const CommutingHamiltonian& h) {
  if (!h.all_qubits()) throw ValidationError("classicalize_qubit_2local needs qubit sites");
  const CommutationReport rep = verify_commuting(h);
  if (!rep.ok) throw ValidationError("classicalize_qubit_2local: input is not commuting");
  QubitClassicalization out;
  out.sites = h.sites();
  const int n = static_cast<int>(out.sites.size());
  std::map<SiteId, int> pos;
  for (int i = 0; i < n; ++i) pos[out.sites[i]] = i;
  std::vector<bool> fixed(n, false);
  out.bases.assign(n, Mat::Identity(2, 2));
  for (const LocalTerm& t : h.terms) {
    if (t.support.size() > 2) throw ValidationError("classicalize_qubit_2local: term is not 2-local");
    if (t.support.size() == 1) {
      out.cases.push_back(QubitCase::trivial_on_a);
      const int p = pos[t.support[0]];
      const InducedAlgebra a = induced_algebra(t, t.support[0], h.site_dims);
      if (!fixed[p] && !a.trivial) {
        out.bases[p] = descending_basis(qubit_generator(a));
        fixed[p] = true;
      }
      continue;
    }
    const QubitCaseResult r = qubit_case_classify(t);
    out.cases.push_back(r.kind);
    const int pa = pos[t.support[0]], pb = pos[t.support[1]];
    if (!fixed[pa] && r.kind != QubitCase::trivial_on_a) {
      out.bases[pa] = r.ua;
      fixed[pa] = true;
    }
    if (!fixed[pb] && r.kind != QubitCase::trivial_on_b) {
      out.bases[pb] = r.ub;
      fixed[pb] = true;
    }
  }
  out.classical = ClassicalHamiltonian(std::vector<int>(n, 2), out.sites);
  for (const LocalTerm& t : h.terms) {
    Mat u = Mat::Identity(1, 1);
    ClassicalTerm ct;
    for (SiteId s : t.support) {
      u = kron(u, out.bases[pos[s]]);
      ct.support.push_back(pos[s]);
    }
    const Mat d = apply_basis(t.matrix(), u);
    if (offdiag_norm(d) > 1e-8 * std::max(1.0, d.norm()))
      throw ValidationError("classicalize_qubit_2local: no consistent product basis for term " + std::to_string(t.id));
    for (Eigen::Index k = 0; k < d.rows(); ++k) ct.table.push_back(d(k, k).real());
    out.classical.add_term(std::move(ct));
  }
  return out;
}

}  // namespace clhgibbs
