#include <iostream>
#include <vector>

#include "pvass/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pvass::run_cli(std::move(args), std::cout, std::cerr);
}
