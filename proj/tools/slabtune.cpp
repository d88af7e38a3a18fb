#include <iostream>
#include <string>
#include <vector>

#include "slabtune/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return slabtune::run_cli(args, std::cout, std::cerr);
}
