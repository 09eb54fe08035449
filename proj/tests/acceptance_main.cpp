// Acceptance battery: one pass/fail line per criterion, nonzero exit on any
// failure. The same battery backs the `hfl suite` subcommand.

#include <cstdlib>
#include <iostream>
#include <string>

#include "hfl/suite.hpp"

int main(int argc, char** argv) {
    std::uint64_t seed = 0;
    int jobs = 2;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--seed" && i + 1 < argc) seed = std::strtoull(argv[++i], nullptr, 10);
        if (arg == "--jobs" && i + 1 < argc) jobs = std::atoi(argv[++i]);
    }

    hfl::SuiteReport report = hfl::run_acceptance_battery(seed, jobs);
    std::cout << hfl::format_suite_summary(report);
    return report.all_pass ? 0 : 1;
}
