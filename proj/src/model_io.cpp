// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#include "clhgibbs/model_io.hpp"

#include <fstream>
#include <sstream>

namespace clhgibbs {

using nlohmann::json;

namespace {

json geometry_to_json(const CommutingHamiltonian& h) {
  if (h.lattice) {
    json g = {{"type", "lattice2d"}, {"L", h.lattice->L}, {"topology", topology_name(h.lattice->topology)}};
    if (h.lattice->topology == Topology::punctured) {
      g["missing_white"] = h.lattice->missing_white;
      g["missing_black"] = h.lattice->missing_black;
    }
    return g;
  }
  if (h.chain) return {{"type", "chain1d"}, {"n", h.chain->n}, {"range", h.chain->range}, {"periodic", h.chain->periodic}};
  return nullptr;
}

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  return j.at(key).get<T>();
}

}  // namespace

json hamiltonian_to_json(const CommutingHamiltonian& h) {
  json sites = json::array();
  for (const auto& [id, dim] : h.site_dims) sites.push_back({{"id", id}, {"dim", dim}});
  json terms = json::array();
  for (const LocalTerm& t : h.terms) {
    json jt = {{"id", t.id}, {"support", t.support}, {"color", t.color == Color::none ? json(nullptr) : json(color_name(t.color))}};
    if (t.pauli) {
      const double sign = t.pauli->phase() == 2 ? -1.0 : 1.0;
      jt["pauli"] = t.pauli->letters(t.support);
      jt["coeff"] = sign * t.coeff;
      jt["dense"] = nullptr;
    } else {
      json entries = json::array();
      for (Eigen::Index r = 0; r < t.dense->rows(); ++r)
        for (Eigen::Index c = 0; c < t.dense->cols(); ++c)
          entries.push_back({(*t.dense)(r, c).real(), (*t.dense)(r, c).imag()});
      jt["pauli"] = nullptr;
      jt["coeff"] = nullptr;
      jt["dense"] = entries;
    }
    terms.push_back(jt);
  }
  return {{"sites", sites}, {"geometry", geometry_to_json(h)}, {"terms", terms}};
}

CommutingHamiltonian hamiltonian_from_json(const json& j) {
  CommutingHamiltonian h;
  try {
    for (const json& s : required<json>(j, "sites")) {
      const int dim = required<int>(s, "dim");
      if (dim < 1) throw ValidationError("site dimension must be positive");
      h.site_dims[required<int>(s, "id")] = dim;
    }
    if (j.contains("geometry") && !j.at("geometry").is_null()) {
      const json& g = j.at("geometry");
      const std::string type = required<std::string>(g, "type");
      if (type == "lattice2d") {
        h.lattice = make_lattice(required<int>(g, "L"), topology_from_name(required<std::string>(g, "topology")),
                                 g.value("missing_white", -1), g.value("missing_black", -1));
      } else if (type == "chain1d") {
        h.chain = Chain1D{required<int>(g, "n"), g.value("range", 2), g.value("periodic", false)};
      } else {
        throw ValidationError("unknown geometry type '" + type + "'");
      }
    }
    for (const json& jt : required<json>(j, "terms")) {
      LocalTerm t;
      t.id = required<int>(jt, "id");
      t.support = required<std::vector<int>>(jt, "support");
      if (jt.contains("color") && !jt.at("color").is_null()) t.color = color_from_name(jt.at("color").get<std::string>());
      const bool has_pauli = jt.contains("pauli") && !jt.at("pauli").is_null();
      const bool has_dense = jt.contains("dense") && !jt.at("dense").is_null();
      if (has_pauli == has_dense)
        throw ValidationError("term " + std::to_string(t.id) + ": exactly one of pauli or dense payload is required");
      if (has_pauli) {
        t.pauli = PauliString::from_letters(t.support, jt.at("pauli").get<std::string>());
        if (!jt.contains("coeff") || jt.at("coeff").is_null())
          throw ValidationError("term " + std::to_string(t.id) + ": Pauli term without coeff");
        t.coeff = jt.at("coeff").get<double>();
      } else {
        const json& entries = jt.at("dense");
        long dim = 1;
        for (int s : t.support) {
          if (!h.site_dims.count(s)) throw ValidationError("term " + std::to_string(t.id) + ": unknown site");
          dim *= h.site_dims.at(s);
        }
        if (static_cast<long>(entries.size()) != dim * dim)
          throw ValidationError("term " + std::to_string(t.id) + ": dense payload has wrong number of entries");
        Mat m(dim, dim);
        for (long k = 0; k < dim * dim; ++k) {
          const json& e = entries.at(k);
          if (!e.is_array() || e.size() != 2) throw ValidationError("dense entries must be [re, im] pairs");
          m(k / dim, k % dim) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
        }
        t.dense = std::move(m);
      }
      h.terms.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed Hamiltonian JSON: ") + e.what());
  }
  h.validate();
  return h;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in '" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
}

CommutingHamiltonian parse_hamiltonian(const std::string& path) { return hamiltonian_from_json(read_json_file(path)); }

void serialize_hamiltonian(const CommutingHamiltonian& h, const std::string& path) {
  write_text_file(path, hamiltonian_to_json(h).dump(1) + "\n");
}

bool structurally_equal(const CommutingHamiltonian& a, const CommutingHamiltonian& b, double tol) {
  if (a.site_dims != b.site_dims || a.terms.size() != b.terms.size()) return false;
  if (a.lattice.has_value() != b.lattice.has_value() || a.chain.has_value() != b.chain.has_value()) return false;
  if (a.lattice && (a.lattice->L != b.lattice->L || a.lattice->topology != b.lattice->topology ||
                    a.lattice->missing_white != b.lattice->missing_white ||
                    a.lattice->missing_black != b.lattice->missing_black))
    return false;
  if (a.chain && (a.chain->n != b.chain->n || a.chain->range != b.chain->range || a.chain->periodic != b.chain->periodic))
    return false;
  for (size_t i = 0; i < a.terms.size(); ++i) {
    const LocalTerm& x = a.terms[i];
    const LocalTerm& y = b.terms[i];
    if (x.id != y.id || x.support != y.support || x.color != y.color) return false;
    if (x.is_pauli() != y.is_pauli()) return false;
    if (x.is_pauli()) {
      if (!(*x.pauli == *y.pauli) || x.coeff != y.coeff) return false;
    } else {
      if (x.dense->rows() != y.dense->rows()) return false;
      if ((*x.dense - *y.dense).cwiseAbs().maxCoeff() > tol) return false;
    }
  }
  return true;
}

}  // namespace clhgibbs
