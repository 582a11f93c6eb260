#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include <boost/math/special_functions/zeta.hpp>

#include <trace_lab/parallel.hpp>
#include <trace_lab/quadrature.hpp>
#include <trace_lab/shell_sum.hpp>
#include <trace_lab/special.hpp>
#include <trace_lab/summation.hpp>

using namespace trace_lab;

TEST(CompensatedSum, RecoversSmallTermsLostByNaiveSummation) {
    CompensatedSum acc;
    acc.add(1.0);
    for (int i = 0; i < 1000; ++i) acc.add(1e-16);
    acc.add(-1.0);
    EXPECT_NEAR(acc.value(), 1e-13, 1e-25);
}

TEST(GeometricTail, BoundsAndDivergence) {
    EXPECT_DOUBLE_EQ(geometric_tail_bound(0.5, 0.25), 1.0);
    EXPECT_TRUE(std::isinf(geometric_tail_bound(1.0, 1.0)));
}

TEST(ShellSumPlan, ValidateRejectsBadWindows) {
    ShellSumPlan plan;
    plan.n_min = 3;
    plan.n_max = 2;
    EXPECT_THROW(plan.validate(), ParameterError);
    plan = {};
    plan.tail_tolerance = 0.0;
    EXPECT_THROW(plan.validate(), ParameterError);
}

TEST(ShellSeries, GeometricSeriesBothDirections) {
    // sum_{n in Z} 2^{-|n|} = 3.
    ShellSumPlan plan;
    auto term = [](std::int64_t n) { return std::pow(2.0, -std::abs(static_cast<double>(n))); };
    detail::Window w;
    const EvalResult r = detail::shell_series(term, -2, 2, true, true, plan, &w);
    EXPECT_NEAR(r.value, 3.0, 2e-12);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.error_bound, plan.tail_tolerance);
    EXPECT_LE(std::abs(r.value - 3.0), r.error_bound + 1e-15);
    EXPECT_LT(w.lo, -2);
    EXPECT_GT(w.hi, 2);
}

TEST(ShellSeries, ConvergedFlagClearsWhenTermCapIsHit) {
    ShellSumPlan plan;
    plan.max_terms = 10;
    auto term = [](std::int64_t n) { return n <= 0 ? std::pow(0.999, -static_cast<double>(n)) * 1e-3 : 0.0; };
    const EvalResult r = detail::shell_series(term, 0, 0, true, false, plan);
    EXPECT_FALSE(r.converged);
}

TEST(HurwitzZeta, MatchesRiemannZetaAndShiftRelation) {
    for (double s : {1.5, 2.0, 3.5, 7.0}) {
        EXPECT_NEAR(hurwitz_zeta(s, 1.0), boost::math::zeta(s), 1e-13 * boost::math::zeta(s));
        // zeta(s, q) = q^{-s} + zeta(s, q + 1)
        for (double q : {0.3, 2.5, 40.0}) {
            const double v = hurwitz_zeta(s, q);
            EXPECT_NEAR(v, std::pow(q, -s) + hurwitz_zeta(s, q + 1), 1e-13 * v);
        }
    }
    EXPECT_THROW(hurwitz_zeta(1.0, 1.0), ParameterError);
}

TEST(ParallelMap, OrderIsIndexOrderForAnyWorkerCount) {
    auto f = [](std::size_t i) { return std::sin(static_cast<double>(i)); };
    setenv("TRACE_LAB_THREADS", "1", 1);
    const auto serial = parallel_map(1000, f);
    setenv("TRACE_LAB_THREADS", "4", 1);
    const auto threaded = parallel_map(1000, f);
    unsetenv("TRACE_LAB_THREADS");
    EXPECT_EQ(serial, threaded);
    EXPECT_EQ(serial[7], std::sin(7.0));
}

TEST(Quadrature, InfiniteRangeWithErrorEstimate) {
    const EvalResult r = integrate([](double x) { return std::exp(-x * x); }, -std::numeric_limits<double>::infinity(),
                                   std::numeric_limits<double>::infinity());
    EXPECT_NEAR(r.value, std::sqrt(std::numbers::pi), 1e-12);
    EXPECT_TRUE(r.converged);
    QuadratureConfig bad;
    bad.abs_tolerance = -1;
    EXPECT_THROW(integrate([](double x) { return x; }, 0.0, 1.0, bad), ParameterError);
}
