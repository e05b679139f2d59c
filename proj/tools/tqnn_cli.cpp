#include "tqnn/version.hpp"

#include <cstdio>

int main() {
    std::puts(tqnn::kVersionString);
    return 0;
}
