#include <iostream>

#include "marlow/cli.hpp"

int main(int argc, char** argv) { return marlow::cli::run(argc, argv, std::cout, std::cerr); }
