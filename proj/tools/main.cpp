#include <iostream>

#include "kscdf/cli.hpp"

int main(int argc, char** argv) { return kscdf::cli::main_entry(argc, argv, std::cout, std::cerr); }
