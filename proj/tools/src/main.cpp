#include <iostream>

#include "fjscb_cli/cli.hpp"

int main(int argc, char** argv) {
  return fjscb::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
