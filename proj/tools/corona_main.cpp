#include <iostream>

#include "corona/cli.hpp"

int main(int argc, char** argv) { return corona::run_cli(argc, argv, std::cout, std::cerr); }
