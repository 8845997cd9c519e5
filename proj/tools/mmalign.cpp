#include <iostream>
#include <string>
#include <vector>

#include "mmalign/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mmalign::cli::run(args, std::cout, std::cerr);
}
