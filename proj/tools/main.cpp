#include <iostream>

#include "fpattack/cli.hpp"

int main(int argc, char** argv) { return fpattack::run_cli(argc, argv, std::cout, std::cerr); }
