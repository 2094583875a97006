#include <iostream>

#include "dwpi/harness/cli.hpp"

int main(int argc, char** argv) { return dwpi::harness::run_cli(argc, argv, std::cout, std::cerr); }
