#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "sievelab/acceptance.hpp"

// Usage: acceptance [id...]   (no ids: every criterion)
int main(int argc, char** argv) {
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    return sievelab::acceptance::run(std::cout, only);
}
