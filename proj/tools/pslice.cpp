#include <iostream>

#include "pslice/commands.hpp"

int main(int argc, char** argv) {
    return pslice::run_cli(argc, argv, std::cout, std::cerr);
}
