#include "chatda/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return chatda::cli::run(argc, argv, std::cout, std::cerr); }
