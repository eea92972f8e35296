#include <iostream>

#include "porocontact/cli.hpp"

int main(int argc, char** argv)
{
    return porocontact::run_cli(argc, argv, std::cout, std::cerr);
}
