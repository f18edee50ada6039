#include <iostream>
#include <string>
#include <vector>

#include "threebox/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return threebox::cli::cli_main(args, std::cout, std::cerr);
}
