#include <iostream>
#include <string>
#include <vector>

#include "odeup/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return odeup::cli::run(args, std::cout, std::cerr);
}
