#include <iostream>
#include <string>
#include <vector>

#include "slick/bench.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return slick::bench::runBenchCli(args, std::cout, std::cerr);
}
