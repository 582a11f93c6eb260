#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include <trace_lab/adele.hpp>
#include <trace_lab/theta.hpp>

using namespace trace_lab;

namespace {

Rational q(long long a, long long b = 1) { return {BigInt(a), BigInt(b)}; }

Rational random_nonzero(std::mt19937_64& rng) {
    std::uniform_int_distribution<long long> num(-3000, 3000);
    std::uniform_int_distribution<long long> den(1, 3000);
    for (;;) {
        const Rational r(BigInt(num(rng)), BigInt(den(rng)));
        if (!r.is_zero()) return r;
    }
}

Idele random_idele(std::mt19937_64& rng) {
    std::map<std::uint64_t, Rational> f;
    std::uniform_int_distribution<int> pick(0, 4);
    const std::uint64_t primes[] = {2, 3, 5, 7, 11};
    for (int i = 0; i < 3; ++i) f[primes[pick(rng)]] = random_nonzero(rng);
    return {random_nonzero(rng), f};
}

BruhatSchwartzSpec spec_with(RealFactor real, std::map<std::uint64_t, SemistableFactor> S = {}) {
    return {real, std::move(S)};
}

} // namespace

TEST(Idele, NormExamples) {
    EXPECT_EQ(idele_norm(Idele(q(2), {{2, q(2)}})), q(1));
    EXPECT_EQ(idele_norm(Idele(q(1), {{3, q(2)}, {5, q(7, 3)}})), q(1));
    EXPECT_EQ(idele_norm(Idele::diagonal(q(-45, 14))), q(1));
    EXPECT_EQ(idele_norm(Idele::from_real(0.5)), q(1, 2));
}

TEST(Idele, Validation) {
    EXPECT_THROW(Idele(q(0)), ParameterError);
    EXPECT_THROW(Idele(q(1), {{4, q(1)}}), ParameterError);
    EXPECT_THROW(Idele(q(1), {{2, q(0)}}), ParameterError);
    // A fill of 3 is not a unit at the implicit prime 3.
    EXPECT_THROW(Idele(q(1), {}, q(3)), ParameterError);
    EXPECT_THROW(Idele::diagonal(q(0)), ParameterError);
    EXPECT_THROW(AdelePoint(q(0), {}, q(1, 2)), ParameterError);
    EXPECT_THROW(AdelePoint(q(0), {{6, q(1)}}), ParameterError);
}

TEST(Idele, NormIsMultiplicativeAndInverts) {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 100; ++i) {
        const Idele a = random_idele(rng);
        const Idele b = random_idele(rng);
        EXPECT_EQ(idele_norm(a * b), idele_norm(a) * idele_norm(b));
        EXPECT_EQ(idele_norm(a * a.inverse()), q(1));
    }
}

TEST(Idele, ProductFormulaForDiagonalRationals) {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(idele_norm(Idele::diagonal(random_nonzero(rng))), q(1));
}

TEST(AdeleChar, Examples) {
    const AdelePoint zero(q(0));
    auto c = adele_char(zero, zero);
    EXPECT_EQ(c.re, 1.0);
    c = adele_char(AdelePoint(q(0), {{3, q(6)}}), AdelePoint(q(0), {{3, q(4)}, {5, q(10)}}));
    EXPECT_EQ(c.re, 1.0);
    c = adele_char(AdelePoint::diagonal(q(1)), AdelePoint(q(0), {{2, q(1, 2)}}));
    EXPECT_NEAR(c.re, -1.0, 1e-15);
    EXPECT_NEAR(c.im, 0.0, 1e-15);
}

TEST(AdeleChar, TrivialOnDiagonalRationals) {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 100; ++i) {
        const auto y = AdelePoint::diagonal(random_nonzero(rng));
        const auto x = AdelePoint::diagonal(random_nonzero(rng));
        EXPECT_NEAR(adele_char(y, x).re, 1.0, 1e-12);
    }
}

TEST(AdeleChar, Bilinear) {
    std::mt19937_64 rng(24);
    for (int i = 0; i < 100; ++i) {
        const AdelePoint y(random_nonzero(rng), {{2, random_nonzero(rng)}, {3, random_nonzero(rng)}});
        const AdelePoint x(random_nonzero(rng), {{2, random_nonzero(rng)}, {7, random_nonzero(rng)}});
        const AdelePoint x2(random_nonzero(rng), {{3, random_nonzero(rng)}, {5, random_nonzero(rng)}});
        const auto lhs = adele_char(y, x + x2).complex();
        const auto rhs = (adele_char(y, x) * adele_char(y, x2)).complex();
        EXPECT_LT(std::abs(lhs - rhs), 1e-11);
    }
}

TEST(BsEval, Examples) {
    const auto gauss = spec_with(RealFactor::gaussian(1.0));
    EXPECT_NEAR(bs_eval(gauss, AdelePoint(q(1, 2)), BsSide::density).value, std::exp(-std::numbers::pi / 4), 1e-15);
    EXPECT_NEAR(bs_eval(gauss, AdelePoint(q(1, 2)), BsSide::density).value, 0.455938, 1e-6);
    EXPECT_EQ(bs_eval(gauss, AdelePoint(q(0), {{3, q(1, 3)}}), BsSide::density).value, 0.0);

    const auto spec = spec_with(RealFactor::gaussian(1.0), {{2, {1.0, 1.0, 1.0}}, {3, {0.5, 2.0, 1.0}}});
    for (long long r : {1LL, 2LL, 6LL, -12LL}) {
        const double expected = std::exp(-std::numbers::pi * double(r * r)) *
                                char_fn(spec.law(2), 1.0, q(r)) * char_fn(spec.law(3), 1.0, q(r));
        EXPECT_NEAR(bs_eval(spec, AdelePoint::diagonal(q(r)), BsSide::transform).value, expected, 1e-15);
    }
    EXPECT_EQ(bs_eval(spec, AdelePoint(q(0)), BsSide::transform).value, 1.0);
}

TEST(BsEval, DensityIsProductOfComponents) {
    const auto spec = spec_with(RealFactor::stable(1.0, 1.0, 1.0), {{2, {1.0, 1.0, 1.0}}});
    const AdelePoint x(q(1, 4), {{2, q(3, 4)}, {5, q(10)}});
    const auto r = bs_eval(spec, x, BsSide::density);
    const double expected = cauchy_density(1.0, 0.25) *
                            density_shell(spec.law(2), 1.0, padic_norm(q(3, 4), Prime(2))).value;
    EXPECT_NEAR(r.value, expected, 1e-14);
    EXPECT_TRUE(r.converged);
}

TEST(ScaleByIdele, MassAndTransformScaling) {
    const auto spec = spec_with(RealFactor::gaussian(1.0), {{2, {1.0, 1.0, 1.0}}});
    for (const Idele& a : {Idele(q(3, 2), {{2, q(4)}, {3, q(1, 9)}}), Idele(q(1, 5), {{2, q(1, 2)}, {7, q(7)}}),
                           Idele::diagonal(q(6, 5))}) {
        const auto rep = scale_by_idele(spec, a);
        EXPECT_NEAR(rep.mass.value, 1.0, 1e-9);
        EXPECT_EQ(rep.grid.size(), 20u);
        EXPECT_LE(rep.max_transform_defect, 1e-8);
    }
}

TEST(ScaleByIdele, StableRealFactorKeepsMass) {
    const auto spec = spec_with(RealFactor::stable(1.0, 1.0, 1.0), {{3, {0.5, 1.0, 2.0}}});
    const auto rep = scale_by_idele(spec, Idele(q(2), {{3, q(3)}}));
    EXPECT_NEAR(rep.mass.value, 1.0, 1e-9);
    EXPECT_LE(rep.max_transform_defect, 1e-8);
}

TEST(ScaleByIdele, DiagonalRationalLeavesDensityUnscaled) {
    const auto spec = spec_with(RealFactor::gaussian(1.0), {{2, {1.0, 1.0, 1.0}}});
    const Idele a = Idele::diagonal(q(3, 2));
    const auto rep = scale_by_idele(spec, a);
    EXPECT_EQ(rep.scaled.norm, q(1));
    const AdelePoint x(q(1, 3), {{2, q(5, 2)}});
    EXPECT_EQ(rep.scaled(x).value, bs_eval(spec, a.act(x), BsSide::density).value);
}

TEST(EnumerateD, Examples) {
    const auto d = enumerate_D({2}, 2);
    const std::set<Rational> got(d.begin(), d.end());
    const std::set<Rational> want{q(0), q(1), q(-1), q(2), q(-2), q(1, 2), q(-1, 2)};
    EXPECT_EQ(got, want);
    EXPECT_EQ(d.size(), want.size());
    // 0 = 0/1 has height 1, like the units.
    EXPECT_EQ(std::vector<Rational>(d.begin(), d.begin() + 3), (std::vector<Rational>{q(-1), q(0), q(1)}));
    EXPECT_FALSE(in_D({2}, q(1, 3)));
    EXPECT_TRUE(in_D({2, 3}, q(5, 12)));
    for (const auto& r : enumerate_D({}, 5)) EXPECT_TRUE(r.is_integer());
    EXPECT_EQ(enumerate_D({}, 5).size(), 11u);
}

TEST(EnumerateD, OrderedByHeightThenValue) {
    const auto d = enumerate_D({2, 3}, 30);
    for (std::size_t i = 1; i < d.size(); ++i) {
        EXPECT_TRUE(height(d[i - 1]) < height(d[i]) || (height(d[i - 1]) == height(d[i]) && d[i - 1] < d[i]));
        EXPECT_TRUE(in_D({2, 3}, d[i]));
    }
    EXPECT_EQ(height(q(-7, 4)), 7);
    EXPECT_EQ(height(q(3, 8)), 8);
}

TEST(CharSum, DirectPartialSumsAreMonotone) {
    const auto spec = spec_with(RealFactor::stable(1.0, 1.0, 1.0), {{2, {1.0, 1.0, 1.0}}});
    const auto rep = rational_char_sum(spec, {8, 16, 32, 64});
    EXPECT_TRUE(rep.monotone);
    ASSERT_EQ(rep.partial_sums.size(), 4u);
    for (std::size_t i = 1; i < 4; ++i) {
        EXPECT_GE(rep.partial_sums[i], rep.partial_sums[i - 1]);
        EXPECT_GT(rep.terms[i], rep.terms[i - 1]);
        EXPECT_NEAR(rep.differences[i], rep.partial_sums[i] - rep.partial_sums[i - 1], 1e-15);
    }
    EXPECT_THROW(rational_char_sum(spec_with(RealFactor::gaussian(1.0)), {8}), ParameterError);
}

TEST(CharSum, DisplayedBoundSeries) {
    const auto spec = spec_with(RealFactor::stable(1.0, 1.0, 1.0), {{2, {1.0, 1.0, 1.0}}});
    const auto s = paper_bound_series(spec, 1, 100);
    EXPECT_GE(s.first_partial.back(), 90.0);
    EXPECT_NEAR(s.first_last_term, 1.0, 1e-12);
    EXPECT_NEAR(s.second_partial.back(), 0.153987, 1e-6);
    EXPECT_THROW(paper_bound_series(spec, 4, 10), ParameterError);
}

TEST(AdelicTheta, ReducesToThetaFunctionalEquation) {
    const auto spec = spec_with(RealFactor::gaussian(1.0));
    EXPECT_NEAR(adelic_theta_reduction(spec, 2.0).left.value, 1.0000070, 5e-8);
    EXPECT_NEAR(adelic_theta_reduction(spec, 1.0).left.value, theta(1.0).value, 1e-14);
    EXPECT_NEAR(adelic_theta_reduction(spec, 0.5).left.value, 2.0000139, 5e-8);
    for (double lambda : {0.5, 1.0, 2.0, 4.0}) EXPECT_LE(adelic_theta_reduction(spec, lambda).defect, 1e-12) << lambda;
    EXPECT_THROW(adelic_theta_reduction(spec_with(RealFactor::gaussian(1.0), {{2, {}}}), 1.0), ParameterError);
    EXPECT_THROW(adelic_theta_reduction(spec, 0.0), ParameterError);
}
