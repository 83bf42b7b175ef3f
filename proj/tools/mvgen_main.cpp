/// @file mvgen_main.cpp
/// @brief mvgen command-line tool.

#include <iostream>
#include <string>
#include <vector>

#include "mvgen/cli/cli_app.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mvgen::run_cli(args, std::cout, std::cerr);
}
