#include <iostream>

#include "nsdyn/runner.hpp"

int main(int argc, char** argv) { return nsdyn::runner::run_cli(argc, argv, std::cout, std::cerr); }
