#include <iostream>

#include "rea/cli.hpp"

int main(int argc, char** argv) { return rea::cli::run(argc, argv, std::cout, std::cerr); }
