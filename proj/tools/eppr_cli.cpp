#include <iostream>
#include <string>
#include <vector>

#include "eppr/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return eppr::cli::run(args, std::cout, std::cerr);
}
