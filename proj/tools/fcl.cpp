#include <iostream>

#include "fcl/cli.hpp"

int main(int argc, char** argv) { return fcl::run_cli({argv + 1, argv + argc}, std::cout, std::cerr); }
