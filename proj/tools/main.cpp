#include <iostream>
#include <string>
#include <vector>

#include "phasefield/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return phasefield::cli_main(args, std::cout, std::cerr);
}
