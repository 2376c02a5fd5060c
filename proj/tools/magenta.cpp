#include <iostream>

#include "magenta/cli.hpp"

int main(int argc, char** argv) {
    return magenta::cli::dispatch(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
