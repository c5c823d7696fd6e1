#include <iostream>

#include "dotchain/cli.hpp"

int main(int argc, char** argv) { return dotchain::run_cli(argc, argv, std::cout, std::cerr); }
