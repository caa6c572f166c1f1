#include <iostream>

#include "viaduct/cli.hpp"

int main(int argc, char** argv) { return viaduct::cli::run(argc, argv, std::cout, std::cerr); }
