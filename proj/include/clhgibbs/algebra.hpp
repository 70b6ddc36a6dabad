// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#ifndef CLHGIBBS_ALGEBRA_HPP
#define CLHGIBBS_ALGEBRA_HPP

#include <map>
#include <vector>

#include "clhgibbs/classical.hpp"
#include "clhgibbs/model.hpp"

namespace clhgibbs {

// *-algebra on one site with a Hilbert-Schmidt orthonormal basis; basis[0]
// is proportional to the identity.
struct InducedAlgebra {
  SiteId site = 0;
  int dim = 0;  // site dimension
  std::vector<Mat> basis;
  std::vector<Mat> generators;  // the algebra is generated by these and I
  TermId provenance = -1;
  bool trivial = true;  // span{I}
};

InducedAlgebra induced_algebra(const LocalTerm& term, SiteId site, const std::map<SiteId, int>& site_dims);

// Largest-dimension algebra generated by `generators` and the identity.
InducedAlgebra generate_algebra(SiteId site, int dim, const std::vector<Mat>& generators, TermId provenance = -1);

// Hermitian basis of the center of `a`.
std::vector<Mat> algebra_center(const InducedAlgebra& a);

bool algebras_commute(const InducedAlgebra& a, const InducedAlgebra& b, double tol = 1e-9);

// One block H_j = (factor_0 (x) ... (x) factor_{m-1} (x) free) of a site.
// Columns of `isometry` are ordered with factor 0 most significant and the
// free factor least significant.
struct Block {
  Mat isometry;                  // dim x block_dim, orthonormal columns
  std::vector<int> factor_dims;  // one per incident algebra, in input order
  int free_dim = 1;

  int block_dim() const { return static_cast<int>(isometry.cols()); }
};

struct BlockDecomposition {
  SiteId site = 0;
  int dim = 0;
  std::vector<TermId> incident;  // provenance of each factor slot
  std::vector<Block> blocks;

  // Columns = all block isometries side by side.
  Mat unitary() const;
  // Classical value <-> (block, per-factor labels, free label).
  struct Label {
    int block = 0;
    std::vector<int> factors;
    int free = 0;
  };
  Label decode(int value) const;
  int encode(const Label& label) const;
};

BlockDecomposition structure_decompose(SiteId site, int dim, const std::vector<InducedAlgebra>& incident,
                                       uint64_t seed = 0);

// Per-term eigen-data for one block pair of a classicalized term.
struct EdgeSpectrum {
  RealVec values;  // ascending
  Mat vectors;     // on factor(v) (x) factor(w), columns match values
};

class EigenbasisMap {
 public:
  std::vector<SiteId> sites;  // quantum sites = classical sites, same order
  std::vector<int> dims;
  std::vector<BlockDecomposition> decomps;
  // terms[t] support positions (into `sites`) and factor slot per site.
  struct TermSlots {
    TermId id;
    std::vector<int> positions;
    std::vector<int> slots;
    // spectra keyed by block indices along the support.
    std::map<std::vector<int>, EdgeSpectrum> spectra;
  };
  std::vector<TermSlots> terms;

  // lambda(b) for one term at a classical configuration.
  double term_energy(int term, const SpinConfig& x) const;
  double energy(const SpinConfig& x) const;
  // |psi(x)> on the full space (site order `sites`).
  Vec state(const SpinConfig& x) const;
  // sum_x p(x) |psi(x)><psi(x)| over configurations with p(x) > 0.
  Mat mixture(const std::vector<double>& probs) const;
};

struct Classicalization {
  ClassicalHamiltonian classical;
  EigenbasisMap map;
};

// Requires a commuting Hamiltonian with terms on at most two sites.
Classicalization classicalize_2local(const CommutingHamiltonian& h2, uint64_t seed = 0);

enum class QubitCase { trivial_on_a, trivial_on_b, jointly_diagonal };
std::string qubit_case_name(QubitCase c);

struct QubitCaseResult {
  QubitCase kind = QubitCase::jointly_diagonal;
  Mat ua = Mat::Identity(2, 2);  // columns: basis for site a
  Mat ub = Mat::Identity(2, 2);
  double residual = 0.0;
};

// Case analysis of a two-qubit term; throws ValidationError when no case
// applies (non-CLH input). Basis columns are ordered by descending
// eigenvalue of the traceless generator, signed so that its dominant Pauli
// component (ties: Z, X, Y) is positive.
QubitCaseResult qubit_case_classify(const LocalTerm& h);

struct QubitClassicalization {
  ClassicalHamiltonian classical;
  std::vector<SiteId> sites;
  std::vector<Mat> bases;  // per site, columns = classical values 0, 1
  std::vector<QubitCase> cases;  // per term

  Vec state(const SpinConfig& x) const;
  Mat mixture(const std::vector<double>& probs) const;
};

// Qubit 2-local CLH whose terms fall into the cases above with one
// consistent single-qubit basis per site.
QubitClassicalization classicalize_qubit_2local(const CommutingHamiltonian& h);

}  // namespace clhgibbs

#endif  // CLHGIBBS_ALGEBRA_HPP
