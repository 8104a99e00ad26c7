#include <iostream>
#include <string>
#include <vector>

#include "tempest/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return tempest::cli::run(args, std::cout, std::cerr);
}
