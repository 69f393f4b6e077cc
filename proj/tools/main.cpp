#include <iostream>

#include "resavg/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return resavg::run_cli(args, std::cout, std::cerr);
}
