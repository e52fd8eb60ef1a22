#include <iostream>

#include "selectkit/cli.hpp"

int main(int argc, char** argv) { return selectkit::run_cli(argc, argv, std::cout, std::cerr); }
