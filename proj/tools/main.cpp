#include <vector>

#include "arrayobs/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return arrayobs::cli_main(args);
}
