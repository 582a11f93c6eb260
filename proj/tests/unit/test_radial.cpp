#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <trace_lab/gamma_p.hpp>
#include <trace_lab/haar_mc.hpp>
#include <trace_lab/radial.hpp>

using namespace trace_lab;

namespace {

auto exp_norm(double tau = 1.0, double gamma = 1.0, Prime p = Prime(2)) {
    return [=](const PAdicNormValue& y) {
        return std::exp(-tau * (y.is_zero ? 0.0 : p.pow(static_cast<double>(y.exponent) * gamma)));
    };
}

} // namespace

TEST(ShellMeasure, Examples) {
    EXPECT_DOUBLE_EQ(shell_measure(Prime(2), 0), 0.5);
    EXPECT_DOUBLE_EQ(shell_measure(Prime(3), -2), 2.0 / 27.0);
    double total = 0.0;
    for (int n = 0; n >= -200; --n) total += shell_measure(Prime(5), n);
    EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(IntegrateRadial, Examples) {
    const auto ball = integrate_radial(exp_norm(), Prime(2), RadialDomain::unit_ball);
    EXPECT_NEAR(ball.value, 0.54804, 5e-6);
    EXPECT_TRUE(ball.converged);
    const auto full = integrate_radial(exp_norm(), Prime(2), RadialDomain::full);
    EXPECT_NEAR(full.value, 0.72135, 5e-6);
    EXPECT_TRUE(full.converged);
    EXPECT_LE(full.error_bound, ShellSumPlan{}.tail_tolerance);
    const auto one = integrate_radial([](const PAdicNormValue&) { return 1.0; }, Prime(3), RadialDomain::unit_ball);
    EXPECT_NEAR(one.value, 1.0, 1e-12);
}

TEST(IntegrateRadial, NonIntegrableIntegrandIsNotConverged) {
    ShellSumPlan plan;
    plan.max_terms = 200;
    const auto r = integrate_radial([](const PAdicNormValue&) { return 1.0; }, Prime(2), RadialDomain::full, plan);
    EXPECT_FALSE(r.converged);
}

TEST(IntegrateRadial, FullSplitsIntoBallAndOuterShells) {
    for (auto p : {2u, 3u, 5u}) {
        const Prime pr(p);
        for (double gamma : {0.5, 1.0, 2.0}) {
            const auto g = exp_norm(1.0, gamma, pr);
            ShellSumPlan plan;
            plan.tail_tolerance = 1e-15;
            const double full = integrate_radial(g, pr, RadialDomain::full, plan).value;
            double outer = integrate_radial(g, pr, RadialDomain::unit_ball, plan).value;
            for (int n = 1; g(PAdicNormValue{n, false}) > 0.0; ++n) outer += g(PAdicNormValue{n, false}) * shell_measure(pr, n);
            EXPECT_NEAR(full, outer, 1e-13);
        }
    }
}

TEST(Maxstab, ClosedFormsAgreeWithShellSums) {
    for (auto p : {2u, 3u, 5u}) {
        const Prime pr(p);
        for (double gamma : {0.5, 1.0, 2.0}) {
            for (double tau : {0.5, 1.0}) {
                const auto g = exp_norm(tau, gamma, pr);
                EXPECT_NEAR(maxstab::unit_ball(pr, gamma, tau).value,
                            integrate_radial(g, pr, RadialDomain::unit_ball).value, 1e-12);
                EXPECT_NEAR(maxstab::full(pr, gamma, tau).value, integrate_radial(g, pr, RadialDomain::full).value,
                            1e-12);
            }
        }
    }
}

TEST(Maxstab, DisplayedWeightDisagrees) {
    const double iteration = maxstab::full(Prime(2), 1.0, 1.0).value;
    const double displayed = maxstab::full(Prime(2), 1.0, 1.0, maxstab::PsiReading::as_displayed).value;
    EXPECT_NEAR(iteration, 0.72135, 5e-6);
    EXPECT_GT(std::abs(iteration - displayed), 1e-2);
    EXPECT_THROW(maxstab::full(Prime(2), 0.0, 1.0), ParameterError);
}

TEST(GammaP, Examples) {
    EXPECT_NEAR(gamma_p(Prime(2), 2.0, GammaMode::closed).value, -4.0 / 3.0, 1e-15);
    for (auto p : {2u, 3u, 5u, 7u}) EXPECT_NEAR(gamma_p(Prime(p), 0.5, GammaMode::closed).value, 1.0, 1e-15);
    EXPECT_NEAR(gamma_p(Prime(3), 0.7, GammaMode::closed).value, 0.5233, 1e-4);
    EXPECT_THROW(gamma_p(Prime(2), 0.0, GammaMode::closed), PoleError);
    EXPECT_THROW(gamma_p(Prime(2), 1.0, GammaMode::shell_oracle), ParameterError);
    EXPECT_THROW(gamma_p(Prime(2), -0.5, GammaMode::shell_oracle), ParameterError);
}

TEST(GammaP, ShellOracleMatchesClosedForm) {
    for (auto p : {2u, 3u, 5u}) {
        for (int k = 1; k <= 9; ++k) {
            const double s = k / 10.0;
            const auto oracle = gamma_p(Prime(p), s, GammaMode::shell_oracle);
            EXPECT_NEAR(oracle.value, gamma_p_closed(Prime(p), s), 1e-10) << "p=" << p << " s=" << s;
            EXPECT_TRUE(oracle.converged);
        }
    }
}

TEST(GammaP, ReflectionIdentity) {
    for (auto p : {2u, 3u, 5u, 11u}) {
        for (double s = -2.95; s < 3.0; s += 0.1) {
            if (std::abs(s) < 1e-9 || std::abs(s - 1) < 1e-9) continue;
            EXPECT_NEAR(gamma_p_closed(Prime(p), s) * gamma_p_closed(Prime(p), 1 - s), 1.0, 1e-14);
        }
    }
}

TEST(ShellCharIntegral, Examples) {
    EXPECT_DOUBLE_EQ(shell_char_integral(Prime(2), 0, Rational(1)), 0.5);
    EXPECT_DOUBLE_EQ(shell_char_integral(Prime(2), 1, Rational(1)), -1.0);
    EXPECT_DOUBLE_EQ(shell_char_integral(Prime(3), 0, Rational(9)), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(shell_char_integral(Prime(3), 2, Rational(BigInt(1), BigInt(3))), 0.0);
}

TEST(ShellCharIntegral, IsDifferenceOfBallIntegrals) {
    for (auto p : {2u, 3u, 7u})
        for (int n = -4; n <= 4; ++n)
            for (int e = -6; e <= 6; ++e) {
                const PAdicNormValue x{e, false};
                EXPECT_DOUBLE_EQ(shell_char_integral(Prime(p), n, x),
                                 ball_char_integral(Prime(p), n, x) - ball_char_integral(Prime(p), n - 1, x));
            }
}

TEST(ShellCharIntegral, MatchesMonteCarloCharacterAverage) {
    // Integral over the unit shell of chi(x y) with |x|_3 = 9 depends on y modulo 9.
    const Prime p(3);
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> digit(0, 2);
    const Rational x(BigInt(1), BigInt(9));
    double acc = 0.0;
    const int count = 200000;
    for (int i = 0; i < count; ++i) {
        int d0 = 0;
        while (d0 == 0) d0 = digit(rng);
        const Rational y(d0 + 3 * digit(rng));
        acc += char_qp(y, x, p).re;
    }
    const double estimate = acc / count * shell_measure(p, 0);
    EXPECT_NEAR(estimate, shell_char_integral(p, 0, x), 3.0 / std::sqrt(count));
}

TEST(ShellCharIntegral, RadialWeightedSumIsUnitInvariant) {
    const Prime p(5);
    auto weighted = [&](const Rational& x) {
        double s = 0.0;
        for (int n = -30; n <= 30; ++n) s += shell_char_integral(p, n, x) * std::exp(-p.pow(n));
        return s;
    };
    for (long long u : {1LL, 2LL, 3LL, 4LL, 6LL, 7LL, 13LL, -11LL}) {
        const Rational x(BigInt(3), BigInt(25));
        EXPECT_NEAR(weighted(x * Rational(u)), weighted(x), 1e-15);
    }
}

TEST(HaarMc, ShellAndBallFrequencies) {
    for (auto p : {2u, 3u, 5u}) {
        const auto s = mc_haar_zp(Prime(p), 20, 200000, 7 + p);
        const double unit = 1.0 - 1.0 / p;
        EXPECT_NEAR(s.shell_frequency(0), unit, 3 * binomial_std_error(unit, s.count));
        for (int k = 1; k <= 3; ++k) {
            const double ball = std::pow(static_cast<double>(p), -k);
            EXPECT_NEAR(s.ball_frequency(k), ball, 3 * binomial_std_error(ball, s.count));
        }
    }
}

TEST(HaarMc, MeanMatchesShellSumAndIsDeterministic) {
    const auto s = mc_haar_zp(Prime(2), 40, 200000, 11);
    const auto est = mc_mean(s, exp_norm());
    const double exact = integrate_radial(exp_norm(), Prime(2), RadialDomain::unit_ball).value;
    EXPECT_NEAR(est.mean, exact, 3 * est.std_error);
    EXPECT_EQ(mc_haar_zp(Prime(2), 40, 1000, 11).counts, mc_haar_zp(Prime(2), 40, 1000, 11).counts);
    EXPECT_THROW(mc_haar_zp(Prime(2), 0, 10, 1), ParameterError);
    EXPECT_THROW(mc_haar_zp(Prime(2), 10, 0, 1), ParameterError);
}
