// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#ifndef CLHGIBBS_MODEL_HPP
#define CLHGIBBS_MODEL_HPP

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clhgibbs/core.hpp"
#include "clhgibbs/pauli.hpp"

namespace clhgibbs {

using TermId = int;
using SiteId = int;

enum class Color { none, black, white };
std::string color_name(Color c);
Color color_from_name(const std::string& s);

// A Hermitian term: either coeff * pauli (pauli has phase +1 or -1 and acts
// only on qubit sites of `support`) or a dense matrix on `support`.
struct LocalTerm {
  TermId id = 0;
  std::vector<SiteId> support;
  std::optional<PauliString> pauli;
  double coeff = 0.0;
  std::optional<Mat> dense;
  Color color = Color::none;

  bool is_pauli() const { return pauli.has_value(); }
  // Matrix on `support` in support order.
  Mat matrix() const;

  static LocalTerm make_pauli(TermId id, std::vector<SiteId> support, const std::string& letters, double coeff,
                              Color color = Color::none);
  static LocalTerm make_dense(TermId id, std::vector<SiteId> support, Mat m, Color color = Color::none);
};

enum class Topology { plane, torus, punctured };
std::string topology_name(Topology t);
Topology topology_from_name(const std::string& s);

struct Plaquette {
  TermId id;  // lower-left vertex id
  int x = 0, y = 0;
  // u, v, w, tau = NW, NE, SE, SW.
  std::array<SiteId, 4> verts{};
  Color color = Color::none;
};

// L x L vertex lattice; site id x + L * y with y growing northward.
struct Lattice2D {
  int L = 0;
  Topology topology = Topology::plane;
  TermId missing_white = -1;
  TermId missing_black = -1;
  std::vector<Plaquette> plaquettes;  // all cells, including punctured ones
  std::vector<bool> boundary;         // per site, plane only

  SiteId site(int x, int y) const;
  int num_sites() const { return L * L; }
  const Plaquette* plaquette(TermId id) const;
  bool is_missing(TermId id) const { return id == missing_white || id == missing_black; }
};

struct Chain1D {
  int n = 0;
  int range = 2;  // terms act on at most `range` consecutive sites
  bool periodic = false;
};

struct CommutingHamiltonian {
  std::vector<LocalTerm> terms;
  std::map<SiteId, int> site_dims;
  std::optional<Lattice2D> lattice;
  std::optional<Chain1D> chain;

  std::vector<SiteId> sites() const;
  long total_dim() const;
  const LocalTerm& term(TermId id) const;
  int term_index(TermId id) const;
  bool all_pauli() const;
  bool all_qubits() const;
  // Dense matrix of one term on the full space (site order = sites()).
  Mat embedded(const LocalTerm& t) const;
  Mat dense() const;
  // Checks payload shapes, Hermiticity and Pauli coefficients.
  void validate() const;
};

struct CommutationViolation {
  int i = 0, j = 0;
  double norm = 0.0;
};

struct CommutationReport {
  bool ok = true;
  std::vector<CommutationViolation> violations;
};

CommutationReport verify_commuting(const CommutingHamiltonian& h);

// Coefficients default to `default_coeff` when a plaquette id is absent from
// `coeffs`. Punctured topology removes `missing_white` and `missing_black`
// (defaults: first white and first black plaquette in row-major order).
CommutingHamiltonian build_defected_toric(int L, const std::map<TermId, double>& coeffs, Topology topology,
                                          double default_coeff = -1.0, TermId missing_white = -1,
                                          TermId missing_black = -1);

// Lattice geometry only (no term construction).
Lattice2D make_lattice(int L, Topology topology, TermId missing_white = -1, TermId missing_black = -1);

// H = sum_i J Z_i Z_{i+1} + h Z_i on an open chain.
CommutingHamiltonian build_ising1d(int n, double J, double h = 0.0, bool periodic = false);
// H = sum_<ij> J Z_i Z_j + h Z_i on an L x L lattice (torus if periodic).
CommutingHamiltonian build_ising2d(int L, double J, double h = 0.0, bool periodic = true);

// Groups r consecutive sites of a chain into one qudit. Terms inside a
// group or straddling groups j, j+1 are summed into H_{j,j+1}.
CommutingHamiltonian coarse_grain_1d(const CommutingHamiltonian& h, int r);

}  // namespace clhgibbs

#endif  // CLHGIBBS_MODEL_HPP
