#include "gbmcli/commands.hpp"

#include <iostream>

int main(int argc, char **argv) { return gbmcli::main_entry(argc, argv, std::cout, std::cerr); }
