#include <iostream>

#include "hybridavg/cli.hpp"

int main(int argc, char** argv) { return hybridavg::run_cli(argc, argv, std::cout, std::cerr); }
