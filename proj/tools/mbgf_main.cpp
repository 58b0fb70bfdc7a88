#include <iostream>

#include "mbgf/cli.hpp"

int main(int argc, char** argv) {
  return mbgf::cli_main(argc, argv, std::cout, std::cerr);
}
