// Acceptance runner: one PASS/FAIL line per criterion, details above it.
#include <CLI11.hpp>

#include <iostream>

#include "suites.hpp"

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    int only = 0;
    std::uint64_t seed = 1;
    int threads = 0;
    bool list = false;
    app.add_option("--only", only, "run a single criterion (1-14)")->check(CLI::Range(1, 14));
    app.add_option("--seed", seed, "master seed")->capture_default_str();
    app.add_option("--threads", threads, "worker threads");
    app.add_flag("--list", list, "list criteria and exit");
    CLI11_PARSE(app, argc, argv);

    using namespace loewner_lab::suites;
    if (list) {
        for (const auto& s : suite_list()) std::cout << s.criterion << "  " << s.name << "  " << s.title << "\n";
        return 0;
    }
    SuiteOptions opt;
    opt.seed = seed;
    opt.threads = threads;
    bool ok = true;
    for (const auto& s : suite_list()) {
        if (only != 0 && s.criterion != only) continue;
        const SuiteReport r = run_suite(s.name, opt);
        std::cout << format_report(r) << std::flush;
        ok = ok && r.pass();
    }
    return ok ? 0 : 1;
}
