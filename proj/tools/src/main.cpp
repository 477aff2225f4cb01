#include <iostream>

#include "gfactor_cli/cli.hpp"

int main(int argc, char** argv) {
    return gfactor::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
