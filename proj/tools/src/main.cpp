#include <iostream>

#include "mcsel_cli/cli.hpp"

int main(int argc, char** argv) { return mcsel::cli::run(argc, argv, std::cout, std::cerr); }
