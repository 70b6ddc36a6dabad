// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#ifndef CLHGIBBS_CLASSICAL_HPP
#define CLHGIBBS_CLASSICAL_HPP

#include <string>
#include <vector>

#include <json.hpp>

namespace clhgibbs {

using SpinConfig = std::vector<int>;

// Energy table over the configurations of `support` (classical site
// indices), first support site most significant.
struct ClassicalTerm {
  std::vector<int> support;
  std::vector<double> table;
};

// Diagonal Hamiltonian over classical sites 0..n-1 with value alphabets
// [0, dims[i]). Sites carry external ids for serialization.
class ClassicalHamiltonian {
 public:
  ClassicalHamiltonian() = default;
  ClassicalHamiltonian(std::vector<int> dims, std::vector<int> ids = {});

  void add_term(ClassicalTerm term);

  int num_sites() const { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<int>& ids() const { return ids_; }
  const std::vector<ClassicalTerm>& terms() const { return terms_; }
  const std::vector<int>& incident(int site) const { return incident_[site]; }
  // Saturates at 2^62.
  long long num_configs() const;

  double term_value(const ClassicalTerm& t, const SpinConfig& x) const;
  double energy(const SpinConfig& x) const;
  // E(x with site set to value) - E(x), from incident terms only.
  double delta_energy(const SpinConfig& x, int site, int value) const;

  nlohmann::json to_json() const;
  static ClassicalHamiltonian from_json(const nlohmann::json& j);

 private:
  std::vector<int> dims_;
  std::vector<int> ids_;
  std::vector<ClassicalTerm> terms_;
  std::vector<std::vector<int>> incident_;
};

// Mixed-radix index of a configuration (site 0 most significant).
long long config_index(const SpinConfig& x, const std::vector<int>& dims);
SpinConfig config_from_index(long long index, const std::vector<int>& dims);

}  // namespace clhgibbs

#endif  // CLHGIBBS_CLASSICAL_HPP
