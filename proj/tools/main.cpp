#include <iostream>
#include <string>
#include <vector>

#include "bnnmi/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return bnnmi::cli::run(args, std::cout, std::cerr);
}
