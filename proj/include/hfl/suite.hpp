#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hfl/json_io.hpp"

namespace hfl {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;       // informational; excluded from the canonical report
    double budget_seconds = 0.0;
    std::string detail;
    json data;                  // deterministic diagnostics
};

struct SuiteReport {
    std::uint64_t seed = 0;
    int jobs = 1;
    std::vector<CriterionResult> results;
    bool all_pass = false;
};

/// criteria 1-9 (deterministic given seed)
SuiteReport run_core_battery(std::uint64_t seed, int jobs);

/// criteria 1-10; criterion 10 reruns the core battery and compares the
/// canonical reports byte for byte
SuiteReport run_acceptance_battery(std::uint64_t seed, int jobs);

/// canonical JSON (no timings) — the byte-identity surface
json suite_report_json(const SuiteReport& report);

/// "PASS criterion 3: ..." lines plus a footer
std::string format_suite_summary(const SuiteReport& report);

}  // namespace hfl
