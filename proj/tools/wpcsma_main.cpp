#include <iostream>

#include "wpcsma/cli.hpp"

int main(int argc, char** argv) { return wpcsma::run_cli(argc, argv, std::cout, std::cerr); }
