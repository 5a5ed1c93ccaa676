// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "mmcov/cli.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mmcov::run_cli(args, std::cout, std::cerr);
}
