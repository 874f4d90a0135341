#include <iostream>

#include "oblique_beam/cli.hpp"

int main(int argc, char** argv) {
  return oblique_beam::cli::run(argc, argv, std::cout, std::cerr);
}
