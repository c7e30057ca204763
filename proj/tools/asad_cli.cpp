// Copyright 2026 The asad-eval Authors
// SPDX-License-Identifier: Apache-2.0

#include "asad/cli.hpp"

int main(int argc, char** argv) { return asad::cli::run(argc, argv); }
