#include <iostream>
#include <string>
#include <vector>

#include "cld/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return cld::cli::run(args, std::cout, std::cerr);
}
