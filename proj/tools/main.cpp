#include <iostream>

#include "infotriage/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return infotriage::run_cli(args, std::cout, std::cerr);
}
