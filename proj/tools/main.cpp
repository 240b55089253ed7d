#include "crsmdp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return crsmdp::cli::run(argc, argv, std::cout, std::cerr); }
