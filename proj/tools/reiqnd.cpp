#include <iostream>
#include <string>
#include <vector>

#include "reiqnd/cli/commands.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return reiqnd::cli::run_app(args, std::cout, std::cerr);
}
