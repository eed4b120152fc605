#include <iostream>

#include "stvol/cli.hpp"

int main(int argc, char** argv) { return stvol::cli::run_cli(argc, argv, std::cout, std::cerr); }
