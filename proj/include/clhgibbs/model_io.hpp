// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#ifndef CLHGIBBS_MODEL_IO_HPP
#define CLHGIBBS_MODEL_IO_HPP

#include <string>

#include <json.hpp>

#include "clhgibbs/model.hpp"

namespace clhgibbs {

nlohmann::json hamiltonian_to_json(const CommutingHamiltonian& h);
// Validates the result; malformed input raises ValidationError.
CommutingHamiltonian hamiltonian_from_json(const nlohmann::json& j);

CommutingHamiltonian parse_hamiltonian(const std::string& path);
void serialize_hamiltonian(const CommutingHamiltonian& h, const std::string& path);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Structural equality; dense payloads compared entrywise within `tol`.
bool structurally_equal(const CommutingHamiltonian& a, const CommutingHamiltonian& b, double tol = 1e-15);

}  // namespace clhgibbs

#endif  // CLHGIBBS_MODEL_IO_HPP
