#include <iostream>
#include <string>
#include <vector>

#include "annulus_nls/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return annulus_nls::cli::parse_and_dispatch(args, std::cout, std::cerr);
}
