#include <iostream>

#include "bidgame/cli.hpp"

int main(int argc, char** argv) {
  return bidgame::run_cli(argc, argv, std::cout, std::cerr);
}
