#include <iostream>

#include "hbvm/cli.hpp"

int main(int argc, char** argv) { return hbvm::run_cli(argc, argv, std::cout, std::cerr); }
