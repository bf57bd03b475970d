#include <iostream>

#include "brpv/cli.hpp"

int main(int argc, char** argv) { return brpv::cli::run(argc, argv, std::cout, std::cerr); }
