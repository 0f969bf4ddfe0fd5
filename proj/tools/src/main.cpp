#include <iostream>
#include <string>
#include <vector>

#include "whistle/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return whistle::cli_main(args, std::cout, std::cerr);
}
