#include <iostream>

#include "roeforge/cli.hpp"

int main(int argc, char** argv) { return roeforge::cli::run(argc, argv, std::cout, std::cerr); }
