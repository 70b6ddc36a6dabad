// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#include "clhgibbs/cli.hpp"

int main(int argc, char** argv) { return clhgibbs::run_cli(argc, argv); }
