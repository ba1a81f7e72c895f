#include <iostream>
#include <string>
#include <vector>

#include "dreg/cli.hpp"

int main(int argc, char** argv) {
    return dreg::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
