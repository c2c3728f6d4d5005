#include <iostream>

#include "svcmd/cli.hpp"

int main(int argc, char** argv) { return svcmd::run_cli(argc, argv, std::cout, std::cerr); }
