#include <iostream>
#include <string>
#include <vector>

#include "wheelhouse/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return wheelhouse::run_cli(args, std::cout);
}
