#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace loewner_lab::suites {

struct Check {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double target = 0.0;
    double tolerance = 0.0;  // allowed |measured - target|, or the band half width
    std::string detail;
};

struct SuiteOptions {
    std::uint64_t seed = 1;
    std::uint64_t samples = 0;  // 0 keeps the suite's own plan
    int threads = 0;
};

struct SuiteReport {
    std::string name;
    int criterion = 0;
    std::string title;
    std::vector<Check> checks;
    double seconds = 0.0;
    std::string note;  // shown when a suite is informational
    bool pass() const;
};

struct SuiteInfo {
    std::string name;
    int criterion;
    std::string title;
};

const std::vector<SuiteInfo>& suite_list();

// Throws std::invalid_argument for an unknown name.
SuiteReport run_suite(const std::string& name, const SuiteOptions& opt = {});

nlohmann::json to_json(const SuiteReport& r);

// One line per check plus a summary line.
std::string format_report(const SuiteReport& r);

}  // namespace loewner_lab::suites
