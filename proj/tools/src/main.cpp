#include <iostream>

#include "bridged_cli/cli.hpp"

int main(int argc, char** argv) { return bridged::cli_main(argc, argv, std::cout, std::cerr); }
