#include <iostream>

#include "hyerslab/cli.hpp"

int main(int argc, char** argv) { return hyerslab::cli_main(argc, argv, std::cout, std::cerr); }
