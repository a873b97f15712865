#include <iostream>

#include "qvar/harness.hpp"

int main(int argc, char** argv) { return qvar::harness::run_cli(argc, argv, std::cout, std::cerr); }
