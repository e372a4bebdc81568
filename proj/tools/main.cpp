#include <iostream>

#include "mimoarq/cli.hpp"

int main(int argc, char** argv) { return mimoarq::cli::run(argc, argv, std::cout, std::cerr); }
