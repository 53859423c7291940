#include <iostream>
#include <string>
#include <vector>

#include "herald/cli.hpp"

int main(int argc, char** argv)
{
    const std::vector<std::string> args(argv, argv + argc);
    return herald::cli::run(args, std::cout, std::cerr);
}
