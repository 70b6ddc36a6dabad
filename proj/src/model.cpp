// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#include "clhgibbs/model.hpp"

#include <algorithm>
#include <set>

namespace clhgibbs {

namespace {

constexpr long kMaxTermDim = 4096;
constexpr double kHermitianTol = 1e-10;
constexpr double kCommuteTol = 1e-9;

std::vector<SiteId> sorted_union(const std::vector<SiteId>& a, const std::vector<SiteId>& b) {
  std::set<SiteId> s(a.begin(), a.end());
  s.insert(b.begin(), b.end());
  return {s.begin(), s.end()};
}

// Matrix of `t` embedded on the ordered site list `sites`.
Mat matrix_on(const LocalTerm& t, const std::vector<SiteId>& sites, const std::map<SiteId, int>& dims) {
  std::vector<int> d;
  for (SiteId s : sites) d.push_back(dims.at(s));
  std::vector<int> pos;
  for (SiteId s : t.support) pos.push_back(static_cast<int>(std::find(sites.begin(), sites.end(), s) - sites.begin()));
  return embed_operator(t.matrix(), pos, d);
}

}  // namespace

std::string color_name(Color c) {
  switch (c) {
    case Color::black: return "black";
    case Color::white: return "white";
    default: return "none";
  }
}

Color color_from_name(const std::string& s) {
  if (s == "black") return Color::black;
  if (s == "white") return Color::white;
  if (s == "none" || s.empty()) return Color::none;
  throw ValidationError("unknown color '" + s + "'");
}

std::string topology_name(Topology t) {
  switch (t) {
    case Topology::plane: return "plane";
    case Topology::torus: return "torus";
    default: return "punctured";
  }
}

Topology topology_from_name(const std::string& s) {
  if (s == "plane") return Topology::plane;
  if (s == "torus") return Topology::torus;
  if (s == "punctured") return Topology::punctured;
  throw ValidationError("unknown topology '" + s + "'");
}

Mat LocalTerm::matrix() const {
  if (dense) return *dense;
  if (!pauli) throw ValidationError("term " + std::to_string(id) + " has no payload");
  return coeff * pauli->to_dense(support);
}

LocalTerm LocalTerm::make_pauli(TermId id, std::vector<SiteId> support, const std::string& letters, double coeff,
                                Color color) {
  LocalTerm t;
  t.id = id;
  t.pauli = PauliString::from_letters(support, letters);
  t.support = std::move(support);
  t.coeff = coeff;
  t.color = color;
  return t;
}

LocalTerm LocalTerm::make_dense(TermId id, std::vector<SiteId> support, Mat m, Color color) {
  LocalTerm t;
  t.id = id;
  t.support = std::move(support);
  t.dense = std::move(m);
  t.color = color;
  return t;
}

SiteId Lattice2D::site(int x, int y) const {
  if (topology != Topology::plane) {
    x = ((x % L) + L) % L;
    y = ((y % L) + L) % L;
  }
  return x + L * y;
}

const Plaquette* Lattice2D::plaquette(TermId id) const {
  for (const Plaquette& p : plaquettes)
    if (p.id == id) return &p;
  return nullptr;
}

std::vector<SiteId> CommutingHamiltonian::sites() const {
  std::vector<SiteId> out;
  for (const auto& [s, d] : site_dims) out.push_back(s);
  return out;
}

long CommutingHamiltonian::total_dim() const {
  long d = 1;
  for (const auto& [s, dim] : site_dims) {
    d *= dim;
    if (d > (1L << 40)) return d;
  }
  return d;
}

const LocalTerm& CommutingHamiltonian::term(TermId id) const { return terms.at(term_index(id)); }

int CommutingHamiltonian::term_index(TermId id) const {
  for (size_t i = 0; i < terms.size(); ++i)
    if (terms[i].id == id) return static_cast<int>(i);
  throw ValidationError("unknown term id " + std::to_string(id));
}

bool CommutingHamiltonian::all_pauli() const {
  return std::all_of(terms.begin(), terms.end(), [](const LocalTerm& t) { return t.is_pauli(); });
}

bool CommutingHamiltonian::all_qubits() const {
  return std::all_of(site_dims.begin(), site_dims.end(), [](const auto& kv) { return kv.second == 2; });
}

Mat CommutingHamiltonian::embedded(const LocalTerm& t) const { return matrix_on(t, sites(), site_dims); }

Mat CommutingHamiltonian::dense() const {
  const long d = total_dim();
  if (d > kMaxTermDim) throw OutOfScopeError("dense Hamiltonian exceeds dimension 4096");
  Mat h = Mat::Zero(d, d);
  for (const LocalTerm& t : terms) h += embedded(t);
  return h;
}

void CommutingHamiltonian::validate() const {
  std::set<TermId> ids;
  for (const LocalTerm& t : terms) {
    const std::string where = "term " + std::to_string(t.id) + ": ";
    if (!ids.insert(t.id).second) throw ValidationError(where + "duplicate term id");
    if (t.support.empty()) throw ValidationError(where + "empty support");
    std::set<SiteId> seen;
    long dim = 1;
    for (SiteId s : t.support) {
      if (!site_dims.count(s)) throw ValidationError(where + "unknown site " + std::to_string(s));
      if (!seen.insert(s).second) throw ValidationError(where + "repeated site in support");
      dim *= site_dims.at(s);
    }
    if (t.pauli.has_value() == t.dense.has_value())
      throw ValidationError(where + "exactly one of pauli or dense payload is required");
    if (t.pauli) {
      for (SiteId s : t.support)
        if (site_dims.at(s) != 2) throw ValidationError(where + "Pauli payload on a non-qubit site");
      for (int q : t.pauli->support())
        if (!seen.count(q)) throw ValidationError(where + "Pauli factor outside support");
      if (!t.pauli->is_hermitian()) throw ValidationError(where + "non-Hermitian term");
      if (t.coeff == 0.0) throw ValidationError(where + "Pauli coefficient c_p = 0");
      if (!std::isfinite(t.coeff)) throw ValidationError(where + "non-finite coefficient");
    } else {
      if (dim > kMaxTermDim) throw ValidationError(where + "dense payload exceeds dimension 4096");
      if (t.dense->rows() != dim || t.dense->cols() != dim)
        throw ValidationError(where + "dense payload dimension does not match site dimensions");
      if (!t.dense->allFinite()) throw ValidationError(where + "non-finite dense entry");
      if (hermitian_residual(*t.dense) > kHermitianTol) throw ValidationError(where + "non-Hermitian term");
    }
  }
}

CommutationReport verify_commuting(const CommutingHamiltonian& h) {
  h.validate();
  CommutationReport report;
  const int n = static_cast<int>(h.terms.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const LocalTerm& a = h.terms[i];
      const LocalTerm& b = h.terms[j];
      bool overlap = false;
      for (SiteId s : a.support)
        overlap |= std::find(b.support.begin(), b.support.end(), s) != b.support.end();
      if (!overlap) continue;
      const std::vector<SiteId> u = sorted_union(a.support, b.support);
      if (a.is_pauli() && b.is_pauli()) {
        if (a.pauli->commutes_with(*b.pauli)) continue;
        const double norm = 2.0 * std::abs(a.coeff * b.coeff) * std::sqrt(std::pow(2.0, u.size()));
        report.violations.push_back({i, j, norm});
        continue;
      }
      const Mat ma = matrix_on(a, u, h.site_dims);
      const Mat mb = matrix_on(b, u, h.site_dims);
      const double norm = (ma * mb - mb * ma).norm();
      if (norm > kCommuteTol * ma.norm() * mb.norm()) report.violations.push_back({i, j, norm});
    }
  }
  report.ok = report.violations.empty();
  return report;
}

Lattice2D make_lattice(int L, Topology topology, TermId missing_white, TermId missing_black) {
  if (L < 3) throw ValidationError("lattice side L must be at least 3");
  if (topology != Topology::plane && L % 2 != 0)
    throw ValidationError("periodic lattices need even L for a consistent chessboard coloring");
  Lattice2D lat;
  lat.L = L;
  lat.topology = topology;
  const int cells = topology == Topology::plane ? L - 1 : L;
  for (int y = 0; y < cells; ++y) {
    for (int x = 0; x < cells; ++x) {
      Plaquette p;
      p.x = x;
      p.y = y;
      p.id = lat.site(x, y);
      p.verts = {lat.site(x, y + 1), lat.site(x + 1, y + 1), lat.site(x + 1, y), lat.site(x, y)};
      p.color = (x + y) % 2 == 0 ? Color::white : Color::black;
      lat.plaquettes.push_back(p);
    }
  }
  lat.boundary.assign(L * L, false);
  if (topology == Topology::plane) {
    for (int y = 0; y < L; ++y)
      for (int x = 0; x < L; ++x) lat.boundary[lat.site(x, y)] = x == 0 || y == 0 || x == L - 1 || y == L - 1;
  }
  if (topology == Topology::punctured) {
    auto first_of = [&](Color c) {
      for (const Plaquette& p : lat.plaquettes)
        if (p.color == c) return p.id;
      return -1;
    };
    lat.missing_white = missing_white >= 0 ? missing_white : first_of(Color::white);
    lat.missing_black = missing_black >= 0 ? missing_black : first_of(Color::black);
    const Plaquette* pw = lat.plaquette(lat.missing_white);
    const Plaquette* pb = lat.plaquette(lat.missing_black);
    if (!pw || pw->color != Color::white) throw ValidationError("punctured topology: missing_white is not a white plaquette");
    if (!pb || pb->color != Color::black) throw ValidationError("punctured topology: missing_black is not a black plaquette");
  } else if (missing_white >= 0 || missing_black >= 0) {
    throw ValidationError("missing plaquettes are only meaningful for the punctured topology");
  }
  return lat;
}

CommutingHamiltonian build_defected_toric(int L, const std::map<TermId, double>& coeffs, Topology topology,
                                          double default_coeff, TermId missing_white, TermId missing_black) {
  CommutingHamiltonian h;
  h.lattice = make_lattice(L, topology, missing_white, missing_black);
  for (int s = 0; s < L * L; ++s) h.site_dims[s] = 2;
  for (const auto& [id, c] : coeffs)
    if (!h.lattice->plaquette(id)) throw ValidationError("coefficient given for unknown plaquette " + std::to_string(id));
  for (const Plaquette& p : h.lattice->plaquettes) {
    if (h.lattice->is_missing(p.id)) continue;
    auto it = coeffs.find(p.id);
    const double c = it == coeffs.end() ? default_coeff : it->second;
    if (c == 0.0) throw ValidationError("plaquette " + std::to_string(p.id) + ": zero coefficient c_p = 0");
    std::vector<SiteId> support(p.verts.begin(), p.verts.end());
    h.terms.push_back(LocalTerm::make_pauli(p.id, support, p.color == Color::white ? "ZZZZ" : "XXXX", c, p.color));
  }
  return h;
}

CommutingHamiltonian build_ising1d(int n, double J, double hfield, bool periodic) {
  if (n < 2) throw ValidationError("ising1d needs n >= 2");
  CommutingHamiltonian h;
  h.chain = Chain1D{n, 2, periodic};
  for (int i = 0; i < n; ++i) h.site_dims[i] = 2;
  int id = 0;
  const int bonds = periodic ? n : n - 1;
  for (int i = 0; i < bonds; ++i) {
    if (J == 0.0) break;
    h.terms.push_back(LocalTerm::make_pauli(id++, {i, (i + 1) % n}, "ZZ", J));
  }
  if (hfield != 0.0)
    for (int i = 0; i < n; ++i) h.terms.push_back(LocalTerm::make_pauli(id++, {i}, "Z", hfield));
  return h;
}

CommutingHamiltonian build_ising2d(int L, double J, double hfield, bool periodic) {
  if (L < 2) throw ValidationError("ising2d needs L >= 2");
  CommutingHamiltonian h;
  for (int i = 0; i < L * L; ++i) h.site_dims[i] = 2;
  int id = 0;
  for (int y = 0; y < L; ++y) {
    for (int x = 0; x < L; ++x) {
      const int s = x + L * y;
      if (J != 0.0 && (x + 1 < L || (periodic && L > 2)))
        h.terms.push_back(LocalTerm::make_pauli(id++, {s, (x + 1) % L + L * y}, "ZZ", J));
      if (J != 0.0 && (y + 1 < L || (periodic && L > 2)))
        h.terms.push_back(LocalTerm::make_pauli(id++, {s, x + L * ((y + 1) % L)}, "ZZ", J));
    }
  }
  if (hfield != 0.0)
    for (int s = 0; s < L * L; ++s) h.terms.push_back(LocalTerm::make_pauli(id++, {s}, "Z", hfield));
  return h;
}

CommutingHamiltonian coarse_grain_1d(const CommutingHamiltonian& h, int r) {
  if (!h.chain) throw ValidationError("coarse_grain_1d: input has no chain geometry");
  const int n = h.chain->n;
  if (r < 1 || n % r != 0) throw ValidationError("coarse_grain_1d: n must be divisible by r");
  if (h.chain->range > r) throw ValidationError("coarse_grain_1d: term range exceeds group size");
  const int m = n / r;
  const bool periodic = h.chain->periodic;
  if (periodic && m < 3) throw ValidationError("coarse_grain_1d: periodic chain needs at least 3 groups");
  h.validate();

  CommutingHamiltonian out;
  out.chain = Chain1D{m, 2, periodic};
  std::vector<int> group_dim(m, 1);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < r; ++k) group_dim[j] *= h.site_dims.at(j * r + k);
    out.site_dims[j] = group_dim[j];
  }
  if (m == 1) {
    Mat acc = Mat::Zero(group_dim[0], group_dim[0]);
    std::vector<int> dims;
    for (int k = 0; k < r; ++k) dims.push_back(h.site_dims.at(k));
    for (const LocalTerm& t : h.terms) {
      std::vector<int> pos(t.support.begin(), t.support.end());
      acc += embed_operator(t.matrix(), pos, dims);
    }
    out.terms.push_back(LocalTerm::make_dense(0, {0}, acc));
    return out;
  }

  const int pairs = periodic ? m : m - 1;
  std::vector<Mat> acc(pairs);
  for (int j = 0; j < pairs; ++j) acc[j] = Mat::Zero(group_dim[j] * group_dim[(j + 1) % m], group_dim[j] * group_dim[(j + 1) % m]);

  for (const LocalTerm& t : h.terms) {
    std::set<int> groups;
    for (SiteId s : t.support) groups.insert(s / r);
    int left;
    if (groups.size() == 1) {
      const int g = *groups.begin();
      left = (!periodic && g == m - 1) ? m - 2 : g;
    } else if (groups.size() == 2) {
      const int a = *groups.begin();
      const int b = *groups.rbegin();
      if (b == a + 1)
        left = a;
      else if (periodic && a == 0 && b == m - 1)
        left = m - 1;
      else
        throw ValidationError("coarse_grain_1d: term spans non-adjacent groups");
    } else {
      throw ValidationError("coarse_grain_1d: term spans more than two groups");
    }
    const int right = (left + 1) % m;
    std::vector<int> dims;
    for (int k = 0; k < r; ++k) dims.push_back(h.site_dims.at(left * r + k));
    for (int k = 0; k < r; ++k) dims.push_back(h.site_dims.at(right * r + k));
    std::vector<int> pos;
    for (SiteId s : t.support) pos.push_back(s / r == left ? s % r : r + s % r);
    acc[left] += embed_operator(t.matrix(), pos, dims);
  }
  for (int j = 0; j < pairs; ++j) out.terms.push_back(LocalTerm::make_dense(j, {j, (j + 1) % m}, acc[j]));
  return out;
}

}  // namespace clhgibbs
