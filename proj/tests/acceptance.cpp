// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <iostream>

#include "dominav/acceptance.hpp"

int main() {
    const auto results = dominav::acceptance::run_all();
    const bool ok = dominav::acceptance::report(std::cout, results);
    return ok ? 0 : 1;
}
