#include "dohertycad/cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return doherty::cli::run(argc, argv, std::cout, std::cerr); }
