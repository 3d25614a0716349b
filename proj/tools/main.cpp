#include <iostream>
#include <string>
#include <vector>

#include "mmreg/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mmreg::cli_run(args, std::cout, std::cerr);
}
