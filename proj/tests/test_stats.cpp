#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "collabscope/rng.hpp"
#include "collabscope/stats.hpp"

using namespace collabscope;
using namespace collabscope::stats;

namespace {

// Independent oracle: exact one-tailed MWU p-value by enumerating every
// C(n1+n2, n1) assignment of the pooled values to group 1 and counting
// assignments whose U is at least the observed one. Values must be untied.
double mwu_enumeration_p_greater(const std::vector<double>& s1, const std::vector<double>& s2) {
    const std::size_t n1 = s1.size(), n2 = s2.size(), n = n1 + n2;
    std::vector<double> pool(s1);
    pool.insert(pool.end(), s2.begin(), s2.end());
    auto u_of = [&](const std::vector<std::size_t>& group1) {
        double u = 0.0;
        for (std::size_t i : group1)
            for (std::size_t j = 0; j < n; ++j) {
                if (std::find(group1.begin(), group1.end(), j) != group1.end()) continue;
                if (pool[i] > pool[j]) u += 1.0;
            }
        return u;
    };
    std::vector<std::size_t> obs_group(n1);
    std::iota(obs_group.begin(), obs_group.end(), 0u);
    const double u_obs = u_of(obs_group);

    std::vector<char> mask(n, 0);
    std::fill(mask.begin(), mask.begin() + n1, 1);
    std::sort(mask.begin(), mask.end());
    std::uint64_t total = 0, at_least = 0;
    do {
        std::vector<std::size_t> group1;
        for (std::size_t i = 0; i < n; ++i)
            if (mask[i]) group1.push_back(i);
        ++total;
        if (u_of(group1) >= u_obs) ++at_least;
    } while (std::next_permutation(mask.begin(), mask.end()));
    return static_cast<double>(at_least) / static_cast<double>(total);
}

std::vector<double> untied_sample(Rng& rng, std::size_t n) {
    std::vector<double> s(n);
    for (auto& v : s) v = rng.uniform01();
    return s;
}

}  // namespace

TEST(TwoProportionZ, EqualProportionsGiveZero) {
    const auto r = two_proportion_z(30, 100, 15, 50, Tails::two);
    EXPECT_DOUBLE_EQ(r.statistic, 0.0);
    EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(TwoProportionZ, HandComputedExample) {
    const auto r = two_proportion_z(81, 100, 75, 100, Tails::two);
    EXPECT_NEAR(r.statistic, 1.024, 0.001);
    EXPECT_FALSE(r.degenerate);
    EXPECT_EQ(r.n1, 100u);
}

TEST(TwoProportionZ, LargeSampleExample) {
    // 81%/75% at n1 = 5002, n2 = 2038229 (counts rounded from those rates)
    const auto r = two_proportion_z(4052, 5002, 1528672, 2038229, Tails::two);
    EXPECT_NEAR(r.statistic, 9.802, 0.01);
    EXPECT_LT(r.p_value, 0.01);
}

TEST(TwoProportionZ, SwappingGroupsNegatesZ) {
    Rng rng(414);
    for (int trial = 0; trial < 50; ++trial) {
        const std::uint64_t n1 = 10 + rng.uniform_index(200), n2 = 10 + rng.uniform_index(200);
        const std::uint64_t x1 = rng.uniform_index(n1 + 1), x2 = rng.uniform_index(n2 + 1);
        const auto a = two_proportion_z(x1, n1, x2, n2, Tails::two);
        const auto b = two_proportion_z(x2, n2, x1, n1, Tails::two);
        if (a.degenerate) {
            EXPECT_TRUE(b.degenerate);
            continue;
        }
        EXPECT_NEAR(a.statistic, -b.statistic, 1e-12);
        EXPECT_NEAR(a.p_value, b.p_value, 1e-12);
    }
}

TEST(TwoProportionZ, DegeneratePooledProportionFlagged) {
    EXPECT_TRUE(two_proportion_z(0, 50, 0, 80, Tails::two).degenerate);
    EXPECT_TRUE(two_proportion_z(50, 50, 80, 80, Tails::one).degenerate);
    EXPECT_FALSE(two_proportion_z(50, 50, 0, 80, Tails::one).degenerate);
}

TEST(TwoProportionZ, PreconditionsChecked) {
    EXPECT_THROW(two_proportion_z(5, 0, 1, 10, Tails::two), std::invalid_argument);
    EXPECT_THROW(two_proportion_z(11, 10, 1, 10, Tails::two), std::invalid_argument);
}

TEST(MannWhitney, IdenticalSamplesCentered) {
    std::vector<double> s;
    for (int i = 1; i <= 40; ++i) s.push_back(i);
    const auto r = mann_whitney_u(s, s, Alternative::greater);
    EXPECT_DOUBLE_EQ(r.statistic, 40.0 * 40.0 / 2.0);
    EXPECT_NEAR(r.p_value, 0.5, 0.02);
    EXPECT_EQ(*r.median1, *r.median2);
}

TEST(MannWhitney, FullySeparatedSmallSamples) {
    const std::vector<double> hi{4, 5, 6}, lo{1, 2, 3};
    const auto r = mann_whitney_u(hi, lo, Alternative::greater);
    EXPECT_DOUBLE_EQ(r.statistic, 9.0);
    EXPECT_DOUBLE_EQ(r.p_value, 0.05);  // 1 of C(6,3) = 20 arrangements
    EXPECT_TRUE(r.exact);
    EXPECT_DOUBLE_EQ(*r.median1, 5.0);
    EXPECT_DOUBLE_EQ(*r.median2, 2.0);
}

TEST(MannWhitney, ExactMatchesEnumeration) {
    Rng rng(272);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n1 = 2 + rng.uniform_index(4);
        const std::size_t n2 = 2 + rng.uniform_index(std::min<std::size_t>(10 - n1, 4) - 1);
        const auto s1 = untied_sample(rng, n1);
        const auto s2 = untied_sample(rng, n2);
        const auto r = mann_whitney_u(s1, s2, Alternative::greater);
        ASSERT_TRUE(r.exact);
        const double oracle = mwu_enumeration_p_greater(s1, s2);
        ASSERT_DOUBLE_EQ(r.p_value, oracle)
            << "n1=" << n1 << " n2=" << n2 << " U=" << r.statistic;
    }
}

TEST(MannWhitney, UStatisticsSumToProduct) {
    Rng rng(515);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n1 = 2 + rng.uniform_index(30), n2 = 2 + rng.uniform_index(30);
        std::vector<double> s1(n1), s2(n2);
        // coarse grid on purpose: plenty of ties
        for (auto& v : s1) v = static_cast<double>(rng.uniform_index(8));
        for (auto& v : s2) v = static_cast<double>(rng.uniform_index(8));
        const auto a = mann_whitney_u(s1, s2, Alternative::greater);
        const auto b = mann_whitney_u(s2, s1, Alternative::greater);
        EXPECT_DOUBLE_EQ(a.statistic + b.statistic,
                         static_cast<double>(n1) * static_cast<double>(n2));
    }
}

TEST(MannWhitney, OneTailedComplementarity) {
    Rng rng(616);
    MwuOptions no_cc;
    no_cc.continuity_correction = false;
    MwuOptions with_cc;
    for (int trial = 0; trial < 50; ++trial) {
        const auto s1 = untied_sample(rng, 20 + rng.uniform_index(30));
        const auto s2 = untied_sample(rng, 20 + rng.uniform_index(30));
        const double sum_no_cc = mann_whitney_u(s1, s2, Alternative::greater, no_cc).p_value +
                                 mann_whitney_u(s2, s1, Alternative::greater, no_cc).p_value;
        EXPECT_NEAR(sum_no_cc, 1.0, 1e-9);
        const double sum_cc = mann_whitney_u(s1, s2, Alternative::greater, with_cc).p_value +
                              mann_whitney_u(s2, s1, Alternative::greater, with_cc).p_value;
        EXPECT_NEAR(sum_cc, 1.0, 0.01);
    }
}

TEST(MannWhitney, LargePlantedShiftDetected) {
    Rng rng(717);
    std::vector<double> s1(1000), s2(1000);
    for (auto& v : s1) v = 1.0 + rng.normal();
    for (auto& v : s2) v = rng.normal();
    const auto r = mann_whitney_u(s1, s2, Alternative::greater);
    EXPECT_FALSE(r.exact);
    EXPECT_LT(r.p_value, 1e-10);
    // cross-check the approximation path against exact p on small subsamples
    const std::vector<double> sub1(s1.begin(), s1.begin() + 6);
    const std::vector<double> sub2(s2.begin(), s2.begin() + 6);
    const auto small = mann_whitney_u(sub1, sub2, Alternative::greater);
    ASSERT_TRUE(small.exact);
    EXPECT_DOUBLE_EQ(small.p_value, mwu_enumeration_p_greater(sub1, sub2));
}

TEST(MannWhitney, AlternativesAndDegenerateCase) {
    const std::vector<double> a{1, 2, 3, 4}, b{2, 3, 4, 5};
    const auto less = mann_whitney_u(a, b, Alternative::less);
    const auto greater = mann_whitney_u(a, b, Alternative::greater);
    EXPECT_LT(less.p_value, greater.p_value);
    const auto two = mann_whitney_u(a, b, Alternative::two_sided);
    EXPECT_EQ(two.tails, Tails::two);

    const std::vector<double> flat(10, 3.0);
    const auto degen = mann_whitney_u(flat, flat, Alternative::greater);
    EXPECT_TRUE(degen.degenerate);
    EXPECT_DOUBLE_EQ(degen.p_value, 1.0);

    EXPECT_THROW(mann_whitney_u({}, a, Alternative::greater), std::invalid_argument);
}

TEST(KolmogorovSmirnov, IdenticalSamples) {
    const std::vector<double> s{1, 2, 2, 3, 7};
    const auto r = ks_two_sample(s, s);
    EXPECT_DOUBLE_EQ(r.statistic, 0.0);
    EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(KolmogorovSmirnov, FullySeparatedSamples) {
    const auto r = ks_two_sample(std::vector<double>{1, 2, 3, 4},
                                 std::vector<double>{5, 6, 7, 8});
    EXPECT_DOUBLE_EQ(r.statistic, 1.0);
}

TEST(KolmogorovSmirnov, InterleavedExample) {
    const auto r =
        ks_two_sample(std::vector<double>{1, 3}, std::vector<double>{2, 4});
    EXPECT_DOUBLE_EQ(r.statistic, 0.5);
}

TEST(KolmogorovSmirnov, SymmetricInArguments) {
    Rng rng(818);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s1 = untied_sample(rng, 5 + rng.uniform_index(40));
        const auto s2 = untied_sample(rng, 5 + rng.uniform_index(40));
        const auto a = ks_two_sample(s1, s2);
        const auto b = ks_two_sample(s2, s1);
        EXPECT_DOUBLE_EQ(a.statistic, b.statistic);
        EXPECT_DOUBLE_EQ(a.p_value, b.p_value);
    }
}

TEST(KolmogorovSmirnov, ShiftedDistributionsRejected) {
    Rng rng(919);
    std::vector<double> s1(800), s2(800);
    for (auto& v : s1) v = rng.normal() + 0.6;
    for (auto& v : s2) v = rng.normal();
    const auto r = ks_two_sample(s1, s2);
    EXPECT_LT(r.p_value, 0.01);
    EXPECT_GT(r.statistic, 0.15);
}

TEST(Kde, SymmetricSampleGivesSymmetricCurve) {
    std::vector<double> s;
    for (int k = 0; k < 30; ++k) {
        s.push_back(-2.0);
        s.push_back(2.0);
    }
    const auto c = kde(s);
    const std::size_t g = c.grid.size();
    for (std::size_t i = 0; i < g; ++i) {
        EXPECT_NEAR(c.density[i], c.density[g - 1 - i], 1e-9);
        EXPECT_NEAR(c.grid[i], -c.grid[g - 1 - i], 1e-9);
    }
}

TEST(Kde, UnitMassOnEveryFixture) {
    Rng rng(111);
    std::vector<std::vector<double>> fixtures;
    std::vector<double> normal(400), uniform(300), atoms;
    for (auto& v : normal) v = rng.normal();
    for (auto& v : uniform) v = rng.uniform01();
    for (int k = 0; k < 50; ++k) {
        atoms.push_back(-1.0);
        atoms.push_back(1.0);
    }
    fixtures = {normal, uniform, atoms, {0.0, 1.0}};
    for (const auto& s : fixtures) {
        const auto c = kde(s);
        EXPECT_NEAR(trapezoid_integral(c), 1.0, 1e-3);
        for (double d : c.density) EXPECT_GE(d, 0.0);
        EXPECT_EQ(c.grid.size(), 512u);
        EXPECT_EQ(c.n, s.size());
    }
}

TEST(Kde, RecoversStandardNormalDensity) {
    Rng rng(222);
    std::vector<double> s(10000);
    for (auto& v : s) v = rng.normal();
    const auto c = kde(s);
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    double sup = 0.0;
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
        const double x = c.grid[i];
        const double truth = inv_sqrt_2pi * std::exp(-0.5 * x * x);
        sup = std::max(sup, std::abs(c.density[i] - truth));
    }
    EXPECT_LT(sup, 0.03);
}

TEST(Kde, GridSpansThreeBandwidths) {
    const std::vector<double> s{0.0, 1.0, 2.0, 3.0};
    const auto c = kde(s, 0.5, 16);
    EXPECT_DOUBLE_EQ(c.grid.front(), -1.5);
    EXPECT_DOUBLE_EQ(c.grid.back(), 4.5);
    EXPECT_DOUBLE_EQ(c.bandwidth, 0.5);
}

TEST(Kde, RejectsDegenerateInputs) {
    EXPECT_THROW(kde(std::vector<double>{1.0}), std::invalid_argument);
    EXPECT_THROW(kde(std::vector<double>(20, 5.0)), std::invalid_argument);  // zero spread
    EXPECT_NO_THROW(kde(std::vector<double>(20, 5.0), 0.3));  // explicit bandwidth is fine
    EXPECT_THROW(kde(std::vector<double>{1.0, 2.0}, -0.1), std::invalid_argument);
    EXPECT_THROW(kde(std::vector<double>{1.0, 2.0}, std::nullopt, 1), std::invalid_argument);
}

TEST(Kde, SilvermanFallsBackToSdWhenIqrCollapses) {
    // three quarters of the mass at one point: IQR = 0 but sd > 0
    std::vector<double> s(30, 2.0);
    s.push_back(9.0);
    s.push_back(9.5);
    const double h = silverman_bandwidth(s);
    EXPECT_GT(h, 0.0);
}

TEST(KolmogorovQ, Extremes) {
    EXPECT_DOUBLE_EQ(kolmogorov_q(1e-4), 1.0);
    EXPECT_NEAR(kolmogorov_q(5.0), 0.0, 1e-12);
    // Q(1.36) is about 0.049, the classic 5% critical point
    EXPECT_NEAR(kolmogorov_q(1.36), 0.049, 0.002);
}
