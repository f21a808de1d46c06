#include <iostream>

#include "bqf/app.hpp"

int main(int argc, char** argv) { return bqf::run_cli(argc, argv, std::cout, std::cerr); }
