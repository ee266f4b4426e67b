#include <iostream>

#include "vfeller/cli.hpp"

int main(int argc, char** argv) { return vfeller::cli::run(argc, argv, std::cout, std::cerr); }
