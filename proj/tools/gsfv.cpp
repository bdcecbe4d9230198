#include <iostream>

#include "gsfv/cli.hpp"

int main(int argc, char** argv) { return gsfv::cli_main(argc, argv, std::cout, std::cerr); }
