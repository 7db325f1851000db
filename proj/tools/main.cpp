#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return cone_lpv::cli::run(argc, argv, std::cout, std::cerr); }
