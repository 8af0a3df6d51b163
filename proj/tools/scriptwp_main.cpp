#include <iostream>

#include "scriptwp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return scriptwp::run_cli(args, std::cout, std::cerr);
}
