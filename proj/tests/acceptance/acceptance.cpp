// Runs every acceptance criterion and prints one line per criterion.
// Exit status is nonzero if any criterion fails.

#include <cstdio>
#include <cstring>

#include <trace_lab/acceptance.hpp>

int main(int argc, char** argv) {
    const bool verbose = argc > 1 && std::strcmp(argv[1], "-v") == 0;
    int failed = 0;
    for (const auto& c : trace_lab::acceptance::run_all()) {
        std::printf("[%02d] %-4s %s (%.2fs, budget %.0fs)\n", c.id, c.pass() ? "PASS" : "FAIL", c.title.c_str(),
                    c.seconds, c.budget_seconds);
        for (const auto& k : c.checks) {
            if (!verbose && k.pass) continue;
            std::printf("       %s %s: value=%.12g", k.gating ? (k.pass ? "ok  " : "FAIL") : "info", k.name.c_str(),
                        k.value);
            if (k.reference) std::printf(" reference=%.12g defect=%.3g tol=%.3g", *k.reference, k.defect, k.tolerance);
            std::printf("\n");
        }
        if (!c.within_budget()) std::printf("       FAIL over time budget\n");
        if (verbose)
            for (const auto& n : c.notes) std::printf("       note: %s\n", n.c_str());
        failed += c.pass() ? 0 : 1;
    }
    std::printf("%d of 12 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
