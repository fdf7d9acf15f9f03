#include <iostream>

#include "robust/cli.hpp"

int main(int argc, char** argv) { return robust::cli::main(argc, argv, std::cout, std::cerr); }
