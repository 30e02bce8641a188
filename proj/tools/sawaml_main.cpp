#include "sawaml/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return sawaml::cli_run({argv + 1, argv + argc}, std::cout, std::cerr);
}
