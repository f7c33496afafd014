#include <iostream>

#include "mbdos/cli.hpp"

int main(int argc, char** argv) { return mbdos::cli::main(argc, argv, std::cout, std::cerr); }
