#include <iostream>
#include <string>
#include <vector>

#include "hkreg/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return hkreg::cli::run(args, std::cout, std::cerr);
}
