#include <iostream>

#include "xaif/cli.hpp"

int main(int argc, char** argv) { return xaif::run_cli(argc, argv, std::cout, std::cerr); }
