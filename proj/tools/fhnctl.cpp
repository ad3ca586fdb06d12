#include <iostream>

#include "fhn/cli.hpp"

int main(int argc, char** argv) { return fhn::cli_dispatch(argc, argv, std::cout, std::cerr); }
