// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include "ldi4d/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return ldi4d::cli::run(args, std::cout, std::cerr);
}
