// Semistable density on Q_2 shell by shell, both evaluations side by side,
// followed by the total mass.
#include <cstdio>

#include <trace_lab/semistable.hpp>

int main() {
    using namespace trace_lab;
    const SemistableLaw law(Prime(2), 1.0, 1.0);
    const double t = 1.0;
    std::printf("%6s %22s %22s %12s\n", "|x|_2", "series", "shell", "difference");
    for (std::int64_t e = -4; e <= 4; ++e) {
        const PAdicNormValue x{e, false};
        const auto a = density_series(law, t, x);
        const auto b = density_shell(law, t, x);
        std::printf("2^%-4lld %22.15f %22.15f %12.3e\n", static_cast<long long>(e), a.value, b.value, a.value - b.value);
    }
    const auto at0 = density_shell(law, t, PAdicNormValue{0, true});
    std::printf("f_t(0) = %.15f\n", at0.value);
    const auto m = mass_check(law, t);
    std::printf("mass   = %.15f (bound %.2e)\n", m.mass.value, m.mass.error_bound);
}
