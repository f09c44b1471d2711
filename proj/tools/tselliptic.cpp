#include <iostream>
#include <string>
#include <vector>

#include "tselliptic/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tselliptic::cli::run(args, std::cout, std::cerr);
}
