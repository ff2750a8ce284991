#include "trisolve/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return trisolve::run_cli(argc, argv, std::cout, std::cerr); }
