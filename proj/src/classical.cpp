// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#include "clhgibbs/classical.hpp"

#include <map>
#include <numeric>
#include <sstream>

#include "clhgibbs/core.hpp"

namespace clhgibbs {

using nlohmann::json;

ClassicalHamiltonian::ClassicalHamiltonian(std::vector<int> dims, std::vector<int> ids)
    : dims_(std::move(dims)), ids_(std::move(ids)) {
  for (int d : dims_)
    if (d < 1) throw ValidationError("classical site dimension must be positive");
  if (ids_.empty()) {
    ids_.resize(dims_.size());
    std::iota(ids_.begin(), ids_.end(), 0);
  }
  if (ids_.size() != dims_.size()) throw ValidationError("classical site ids and dims differ in length");
  incident_.resize(dims_.size());
}

void ClassicalHamiltonian::add_term(ClassicalTerm term) {
  if (term.support.empty() || term.support.size() > 2)
    throw ValidationError("classical terms must act on one or two sites");
  size_t size = 1;
  for (int s : term.support) {
    if (s < 0 || s >= num_sites()) throw ValidationError("classical term on unknown site");
    size *= dims_[s];
  }
  if (term.support.size() == 2 && term.support[0] == term.support[1])
    throw ValidationError("classical term repeats a site");
  if (term.table.size() != size) throw ValidationError("classical value table has the wrong size");
  const int index = static_cast<int>(terms_.size());
  for (int s : term.support) incident_[s].push_back(index);
  terms_.push_back(std::move(term));
}

long long ClassicalHamiltonian::num_configs() const {
  long long n = 1;
  for (int d : dims_) {
    if (n > (1LL << 62) / d) return 1LL << 62;
    n *= d;
  }
  return n;
}

double ClassicalHamiltonian::term_value(const ClassicalTerm& t, const SpinConfig& x) const {
  size_t idx = 0;
  for (int s : t.support) idx = idx * dims_[s] + x[s];
  return t.table[idx];
}

double ClassicalHamiltonian::energy(const SpinConfig& x) const {
  double e = 0.0;
  for (const ClassicalTerm& t : terms_) e += term_value(t, x);
  return e;
}

double ClassicalHamiltonian::delta_energy(const SpinConfig& x, int site, int value) const {
  if (x[site] == value) return 0.0;
  double d = 0.0;
  for (int ti : incident_[site]) {
    const ClassicalTerm& t = terms_[ti];
    size_t before = 0, after = 0;
    for (int s : t.support) {
      before = before * dims_[s] + x[s];
      after = after * dims_[s] + (s == site ? value : x[s]);
    }
    d += t.table[after] - t.table[before];
  }
  return d;
}

json ClassicalHamiltonian::to_json() const {
  json sites = json::array();
  for (int i = 0; i < num_sites(); ++i) sites.push_back({{"id", ids_[i]}, {"dim", dims_[i]}});
  json terms = json::array();
  for (const ClassicalTerm& t : terms_) {
    json support = json::array();
    for (int s : t.support) support.push_back(ids_[s]);
    json table = json::object();
    std::vector<int> sub_dims;
    for (int s : t.support) sub_dims.push_back(dims_[s]);
    for (size_t k = 0; k < t.table.size(); ++k) {
      const SpinConfig c = config_from_index(static_cast<long long>(k), sub_dims);
      std::string key;
      for (size_t i = 0; i < c.size(); ++i) key += (i ? "," : "") + std::to_string(c[i]);
      table[key] = t.table[k];
    }
    terms.push_back({{"support", support}, {"table", table}});
  }
  return {{"sites", sites}, {"terms", terms}};
}

ClassicalHamiltonian ClassicalHamiltonian::from_json(const json& j) {
  try {
    std::vector<int> dims, ids;
    std::map<int, int> index_of;
    for (const json& s : j.at("sites")) {
      index_of[s.at("id").get<int>()] = static_cast<int>(dims.size());
      ids.push_back(s.at("id").get<int>());
      dims.push_back(s.at("dim").get<int>());
    }
    ClassicalHamiltonian h(dims, ids);
    for (const json& jt : j.at("terms")) {
      ClassicalTerm t;
      std::vector<int> sub_dims;
      for (const json& s : jt.at("support")) {
        auto it = index_of.find(s.get<int>());
        if (it == index_of.end()) throw ValidationError("classical term on unknown site");
        t.support.push_back(it->second);
        sub_dims.push_back(dims[it->second]);
      }
      size_t size = 1;
      for (int d : sub_dims) size *= d;
      t.table.assign(size, 0.0);
      std::vector<bool> seen(size, false);
      for (const auto& [key, value] : jt.at("table").items()) {
        SpinConfig c;
        std::stringstream ss(key);
        std::string part;
        while (std::getline(ss, part, ',')) c.push_back(std::stoi(part));
        if (c.size() != sub_dims.size()) throw ValidationError("classical table key '" + key + "' has wrong arity");
        for (size_t i = 0; i < c.size(); ++i)
          if (c[i] < 0 || c[i] >= sub_dims[i]) throw ValidationError("classical table key '" + key + "' out of range");
        const auto idx = static_cast<size_t>(config_index(c, sub_dims));
        if (seen[idx]) throw ValidationError("classical table key '" + key + "' repeated");
        seen[idx] = true;
        t.table[idx] = value.get<double>();
      }
      for (bool b : seen)
        if (!b) throw ValidationError("classical table is missing a configuration");
      h.add_term(std::move(t));
    }
    return h;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed classical Hamiltonian JSON: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ValidationError("malformed classical table key");
  }
}

long long config_index(const SpinConfig& x, const std::vector<int>& dims) {
  long long idx = 0;
  for (size_t i = 0; i < dims.size(); ++i) idx = idx * dims[i] + x[i];
  return idx;
}

SpinConfig config_from_index(long long index, const std::vector<int>& dims) {
  SpinConfig x(dims.size());
  for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
    x[i] = static_cast<int>(index % dims[i]);
    index /= dims[i];
  }
  return x;
}

}  // namespace clhgibbs
