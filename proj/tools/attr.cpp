#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return attr::run(argc, argv, std::cout, std::cerr); }
