#include <iostream>
#include <string>
#include <vector>

#include "smilelab/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return smilelab::cli::run_cli(args, std::cout, std::cerr);
}
