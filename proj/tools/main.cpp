#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return alaam::cli::runCli(argc, argv, std::cout, std::cerr); }
