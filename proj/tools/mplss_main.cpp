#include <iostream>

#include "mplss/cli.hpp"

int main(int argc, char** argv) { return mplss::cli::run(argc, argv, std::cout, std::cerr); }
