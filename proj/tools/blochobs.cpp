#include <iostream>

#include "blochobs/cli.hpp"

int main(int argc, char** argv) { return blochobs::cli::run(argc, argv, std::cout, std::cerr); }
