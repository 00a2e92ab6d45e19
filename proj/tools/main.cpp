#include <iostream>

#include "loschmidt/cli.hpp"

int main(int argc, char** argv) { return loschmidt::cli::run_cli(argc, argv, std::cout, std::cerr); }
