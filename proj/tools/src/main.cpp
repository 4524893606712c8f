#include <iostream>

#include "pspan/cli/app.hpp"

int main(int argc, char** argv) { return pspan::cli::run_cli(argc, argv, std::cout, std::cerr); }
