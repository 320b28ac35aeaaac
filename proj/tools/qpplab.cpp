#include <iostream>

#include "qpplab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qpplab::cli::run(args, std::cout, std::cerr);
}
