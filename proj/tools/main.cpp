#include <iostream>

#include "dnlab_cli/runner.hpp"

int main(int argc, char** argv) { return dnlab::cli::run_main(argc, argv, std::cout, std::cerr); }
