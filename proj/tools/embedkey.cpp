#include <iostream>

#include "embedkey/cli.hpp"

int main(int argc, char** argv)
{
    return embedkey::cli::run(argc, argv, std::cout, std::cerr);
}
