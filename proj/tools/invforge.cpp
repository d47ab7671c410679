#include "invforge/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return invforge::cli::run(args, std::cout, std::cerr);
}
