#include <iostream>
#include <vector>

#include "handoff/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return handoff::run_cli(args, std::cout, std::cerr);
}
