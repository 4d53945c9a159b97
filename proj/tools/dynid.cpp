#include <iostream>

#include "dynid/cli.hpp"

int main(int argc, char** argv) { return dynid::cli::run(argc, argv, std::cout, std::cerr); }
