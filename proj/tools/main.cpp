#include "compskip/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return compskip::cli_main(argc, argv, std::cout, std::cerr);
}
