#include <iostream>

#include "nullrx/cli.hpp"

int main(int argc, char** argv) { return nullrx::cli::run(argc, argv, std::cout, std::cerr); }
