#include <iostream>
#include <string>
#include <vector>

#include "riasec/pipeline.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return riasec::run_cli(args, std::cout, std::cerr);
}
