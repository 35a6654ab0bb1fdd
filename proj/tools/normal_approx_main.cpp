#include <iostream>

#include "normal_approx/cli.hpp"

int main(int argc, char** argv) {
  return normal_approx::cli::main_entry(argc, argv, std::cout, std::cerr);
}
