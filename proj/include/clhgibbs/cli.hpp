// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#ifndef CLHGIBBS_CLI_HPP
#define CLHGIBBS_CLI_HPP

#include <string>
#include <vector>

namespace clhgibbs {

// Exit codes: 0 success, 2 validation failure, 3 out-of-scope structure,
// 4 tolerance exceeded in compare, 1 internal error.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

}  // namespace clhgibbs

#endif  // CLHGIBBS_CLI_HPP
