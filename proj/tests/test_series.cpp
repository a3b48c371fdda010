#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include <matrixmech/series.hpp>

using matrixmech::series;

TEST(Series, ConstructionAndAccess)
{
    const series s{1.0, 2.0, 3.0};
    EXPECT_EQ(s.degree(), 2u);
    EXPECT_EQ(s[1], 2.0);
    EXPECT_EQ(s[7], 0.0);
    series z(3);
    EXPECT_TRUE(z.is_zero());
    EXPECT_THROW(z.coeff(4), std::out_of_range);
    const series c(2, 5.0);
    EXPECT_EQ(c[0], 5.0);
    EXPECT_EQ(c[2], 0.0);
}

TEST(Series, HornerEvaluation)
{
    const series s{1.0, -2.0, 0.5};
    EXPECT_DOUBLE_EQ(s(2.0), 1.0 - 4.0 + 2.0);
    EXPECT_DOUBLE_EQ(s(0.0), 1.0);
}

TEST(Series, ProductTruncatesAtSmallerDegree)
{
    const series a{1.0, 1.0, 1.0};
    const series b{1.0, -1.0};
    const series p = a * b;
    EXPECT_EQ(p.degree(), 1u);
    EXPECT_EQ(p[0], 1.0);
    EXPECT_EQ(p[1], 0.0);
}

TEST(Series, AddProductTruncatesAtOwnDegree)
{
    series acc(1);
    acc.add_product(series{1.0, 2.0, 3.0}, series{1.0, 1.0, 1.0});
    EXPECT_EQ(acc, (series{1.0, 3.0}));
}

TEST(Series, Shifts)
{
    const series s{1.0, 2.0, 3.0};
    EXPECT_EQ(s.shifted_up(1), (series{0.0, 1.0, 2.0}));
    EXPECT_EQ(series({0.0, 0.0, 4.0}).shifted_down(2), (series{4.0, 0.0, 0.0}));
    EXPECT_EQ(s.with_degree(4), (series{1.0, 2.0, 3.0, 0.0, 0.0}));
    EXPECT_EQ(s.with_degree(0), series{1.0});
}

TEST(Series, EqualityIgnoresTrailingZeros)
{
    EXPECT_EQ((series{1.0, 0.0}), series{1.0});
    EXPECT_FALSE((series{1.0, 1e-300}) == series{1.0});
}

TEST(Series, SquareRoot)
{
    const series w2{1.0, 0.75, 0.0};
    const series w = sqrt(w2);
    EXPECT_DOUBLE_EQ(w[0], 1.0);
    EXPECT_DOUBLE_EQ(w[1], 0.375);
    EXPECT_DOUBLE_EQ(w[2], -0.375 * 0.375 / 2.0);
    EXPECT_THROW(sqrt(series{0.0, 1.0}), std::domain_error);
    EXPECT_THROW(sqrt(series{-1.0}), std::domain_error);
}

TEST(Series, MaxAbsWeighted)
{
    const series s{1.0, -3.0, 2.0};
    EXPECT_EQ(max_abs(s), 3.0);
    EXPECT_EQ(max_abs(s, 10.0), 200.0);
}

TEST(Series, Printing)
{
    std::ostringstream os;
    os << series{1.0, 0.5};
    EXPECT_EQ(os.str(), "[1, 0.5]");
}

TEST(SeriesProperty, RingIdentitiesOnRandomSeries)
{
    std::mt19937_64 rng(20250611);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    auto random_series = [&](std::size_t deg) {
        std::vector<double> c(deg + 1);
        for (auto &x : c) {
            x = u(rng);
        }
        return series::from_coefficients(c);
    };
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t deg = trial % 5;
        const series a = random_series(deg), b = random_series(deg), c = random_series(deg);
        const double lambda = 0.01 * u(rng);
        // evaluation is a ring homomorphism up to the truncation error
        EXPECT_NEAR((a * b)(lambda), a(lambda) * b(lambda), 64.0 * std::pow(std::abs(lambda), deg + 1) + 1e-14);
        EXPECT_NEAR((a + b)(lambda), a(lambda) + b(lambda), 1e-14);
        const series lhs = a * (b + c);
        const series rhs = a * b + a * c;
        for (std::size_t k = 0; k <= deg; ++k) {
            EXPECT_NEAR(lhs[k], rhs[k], 1e-13);
            EXPECT_NEAR((a * b)[k], (b * a)[k], 1e-15);
        }
        series pos = a;
        pos.coeff(0) = 1.0 + std::abs(a[0]);
        const series r = sqrt(pos);
        const series back = r * r;
        for (std::size_t k = 0; k <= deg; ++k) {
            EXPECT_NEAR(back[k], pos[k], 1e-12);
        }
    }
}
