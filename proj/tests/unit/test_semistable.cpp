#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <trace_lab/semistable.hpp>

using namespace trace_lab;

TEST(CharFn, Examples) {
    const SemistableLaw law(Prime(2), 1.0, 1.0);
    EXPECT_NEAR(char_fn(law, 1.0, Rational(BigInt(1), BigInt(2))), std::exp(-2.0), 1e-15);
    EXPECT_EQ(char_fn(law, 1.0, Rational(0)), 1.0);
    EXPECT_THROW(SemistableLaw(Prime(2), 0.0, 1.0), ParameterError);
    EXPECT_THROW(SemistableLaw(Prime(2), 1.0, -1.0), ParameterError);
    EXPECT_THROW(char_fn(law, -1.0, Rational(1)), ParameterError);
}

TEST(CharFn, SemigroupAndScaling) {
    for (auto p : {2u, 3u, 5u}) {
        for (double gamma : {0.5, 1.0, 2.0}) {
            const SemistableLaw law(Prime(p), gamma, 1.5);
            for (int e = -4; e <= 4; ++e) {
                const PAdicNormValue y{e, false};
                for (double s : {0.25, 1.0})
                    for (double t : {0.5, 2.0})
                        EXPECT_NEAR(char_fn(law, s, y) * char_fn(law, t, y), char_fn(law, s + t, y), 1e-15);
                // |p y|_p = |y|_p / p, so scaling y by p is the same as scaling t by p^{-gamma}.
                const PAdicNormValue py{e - 1, false};
                EXPECT_NEAR(char_fn(law, 1.0, py), char_fn(law, std::pow(p, -gamma), y), 1e-15);
            }
        }
    }
}

TEST(Density, Examples) {
    const SemistableLaw law(Prime(2), 1.0, 1.0);
    const auto series = density(law, 1.0, Rational(1), DensityMethod::series);
    const auto shell = density(law, 1.0, Rational(1), DensityMethod::shell);
    EXPECT_NEAR(series.value, 0.41271, 5e-6);
    EXPECT_NEAR(shell.value, 0.41271, 5e-6);
    EXPECT_NEAR(density(law, 1.0, Rational(0), DensityMethod::shell).value, 0.72135, 5e-6);
    EXPECT_EQ(density(law, 1.0, Rational(5), DensityMethod::shell).value, shell.value);
    EXPECT_THROW(density(law, 1.0, Rational(0), DensityMethod::series), ParameterError);
    EXPECT_THROW(density(law, 0.0, Rational(1), DensityMethod::shell), ParameterError);
}

TEST(Density, SeriesAndShellOraclesAgree) {
    for (auto p : {2u, 3u, 5u}) {
        for (double gamma : {0.5, 1.0, 2.0}) {
            for (double ct : {0.5, 1.0, 2.0}) {
                const SemistableLaw law(Prime(p), gamma, 1.0);
                for (int e = -2; e <= 2; ++e) {
                    const PAdicNormValue x{e, false};
                    const auto a = density(law, ct, x, DensityMethod::series);
                    const auto b = density(law, ct, x, DensityMethod::shell);
                    EXPECT_LE(std::abs(a.value - b.value), a.error_bound + b.error_bound + 1e-15)
                        << "p=" << p << " gamma=" << gamma << " Ct=" << ct << " |x|=p^" << e;
                }
            }
        }
    }
}

TEST(Density, RotationallyInvariant) {
    const SemistableLaw law(Prime(3), 0.5, 1.0);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long long> num(1, 10000);
    for (int i = 0; i < 50; ++i) {
        long long u = 0;
        while (u % 3 == 0) u = num(rng);
        const Rational x(BigInt(2), BigInt(27));
        const Rational ux = x * Rational(BigInt(u), BigInt(num(rng) * 3 + 1));
        EXPECT_NEAR(density(law, 1.0, ux, DensityMethod::series).value,
                    density(law, 1.0, x, DensityMethod::series).value, 1e-12);
    }
}

TEST(Density, MaximumAtZero) {
    for (auto p : {2u, 3u}) {
        const SemistableLaw law(Prime(p), 1.0, 1.0);
        ShellSumPlan plan;
        plan.tail_tolerance = 1e-15;
        const auto at0 = density(law, 1.0, PAdicNormValue{0, true}, DensityMethod::shell, plan);
        for (int e = -6; e <= 6; ++e) {
            const auto f = density(law, 1.0, PAdicNormValue{e, false}, DensityMethod::shell, plan);
            EXPECT_LE(f.value, at0.value + at0.error_bound + f.error_bound + 1e-15) << "p=" << p << " e=" << e;
        }
    }
}

TEST(MassCheck, Examples) {
    const auto a = mass_check(SemistableLaw(Prime(2), 1.0, 1.0), 1.0);
    EXPECT_NEAR(a.mass.value, 1.0, 1e-10);
    EXPECT_TRUE(a.mass.converged);
    EXPECT_GE(a.min_density, 0.0);
    const auto b = mass_check(SemistableLaw(Prime(3), 2.0, 1.0), 0.5);
    EXPECT_NEAR(b.mass.value, 1.0, 1e-10);
    EXPECT_LE(std::abs(b.mass.value - 1.0), b.mass.error_bound + 1e-13);
}
