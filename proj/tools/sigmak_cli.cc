#include <iostream>

#include "sigmak/cli.h"

int main(int argc, char** argv) { return sigmak::run_cli(argc, argv, std::cout, std::cerr); }
