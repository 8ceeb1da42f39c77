#include "modsym/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return modsym::cli::run(argc, argv, std::cout, std::cerr);
}
