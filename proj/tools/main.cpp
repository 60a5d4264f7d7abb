#include <vector>

#include "spdtest/cli.hpp"

int main(int argc, char** argv) {
    return spdtest::dispatch(std::vector<std::string>(argv + 1, argv + argc));
}
