#include <iostream>

#include "gclus/cli.hpp"

int main(int argc, char **argv) { return gclus::run_cli(argc, argv, std::cout, std::cerr); }
