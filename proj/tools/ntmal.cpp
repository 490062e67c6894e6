#include <iostream>
#include <string>
#include <vector>

#include "ntmal/cli.hpp"

int main(int argc, char** argv) {
  return ntmal::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
