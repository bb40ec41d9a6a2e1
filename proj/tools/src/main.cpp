#include <iostream>

#include "qqmr/cli.hpp"

int main(int argc, char** argv) { return qqmr::cli_main(argc, argv, std::cout, std::cerr); }
