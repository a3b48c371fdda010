#include <iostream>

#include "matrixmech_app.hpp"

int main(int argc, char **argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return matrixmech::cli::run(args, std::cout, std::cerr);
}
