#include <iostream>
#include <string>
#include <vector>

#include "tcbuf/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return tcbuf::run_cli(args, std::cout, std::cerr);
}
