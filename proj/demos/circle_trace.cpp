// Wrapped density at the identity against the spectral trace for a few laws on the circle.
#include <cstdio>
#include <string>
#include <vector>

#include <trace_lab/lattice.hpp>

int main() {
    using namespace trace_lab;
    struct Case {
        std::string name;
        LatticeLawSpec spec;
    };
    const std::vector<Case> cases{{"gaussian", LatticeLawSpec::gaussian(1)},
                                  {"cauchy", LatticeLawSpec::stable(1.0, 1.0)},
                                  {"stable 1.5", LatticeLawSpec::stable(1.5, 1.0)}};
    std::printf("%-12s %5s %20s %20s %10s\n", "law", "t", "lattice", "spectral", "defect");
    for (const auto& c : cases) {
        for (double t : {0.5, 1.0, 2.0}) {
            const auto r = trace_defect(c.spec, t);
            std::printf("%-12s %5.2f %20.15f %20.15f %10.2e\n", c.name.c_str(), t, r.lattice.value, r.spectral.value,
                        r.defect);
        }
    }
}
