#include <gtest/gtest.h>

#include <matrixmech/translation.hpp>

using namespace matrixmech;

TEST(Rational, Normalizes)
{
    const Rational r(6, -4);
    EXPECT_EQ(r.num, -3);
    EXPECT_EQ(r.den, 2);
    EXPECT_EQ(Rational(1, 2) + Rational(1, 3), Rational(5, 6));
    EXPECT_EQ(Rational(2, 3) * Rational(3, 4), Rational(1, 2));
    EXPECT_THROW(Rational(1, 0), std::domain_error);
}

TEST(TranslateProduct, SquareOfFundamentalAtSecondHarmonic)
{
    const auto tr = translate_product({1, 1}, 5, 2);
    EXPECT_TRUE(tr.reachable);
    EXPECT_EQ(tr.to_string(), "a(n,n-1)*a(n-1,n-2)");
}

TEST(TranslateProduct, FundamentalTimesSecondHarmonic)
{
    const auto tr = translate_product({1, 2}, 5, 3);
    EXPECT_EQ(tr.to_string(), "1/2*a(n,n-1)*a(n-1,n-3) + 1/2*a(n,n-2)*a(n-2,n-3)");
}

TEST(TranslateProduct, ConstantTermOfSquare)
{
    const auto tr = translate_product({1, 1}, 4, 0);
    EXPECT_EQ(tr.to_string(), "1/2*a(n,n+1)*a(n+1,n) + 1/2*a(n,n-1)*a(n-1,n)");
    const auto canon = tr.canonical();
    ASSERT_EQ(canon.size(), 2u);
    EXPECT_EQ(canon[0].second, Rational(1, 2));
    EXPECT_EQ(canon[1].second, Rational(1, 2));
}

TEST(TranslatePolynomial, SecondOrderThirdHarmonicTerms)
{
    const ClassicalMonomial monos[] = {{Rational(1), {1, 4}}, {Rational(2), {0, 3}}};
    const auto tr = translate_polynomial(monos, 6, 3);
    EXPECT_EQ(tr.to_string(),
              "1/2*a(n,n+1)*a(n+1,n-3) + 1/2*a(n,n-4)*a(n-4,n-3) + a0(n)*a(n,n-3) + a(n,n-3)*a0(n-3)");
}

TEST(TranslateProduct, GroundStateDropsNegativeStates)
{
    const auto tr = translate_product({1, 1}, 0, 0);
    EXPECT_EQ(tr.to_string(), "1/2*a(n,n+1)*a(n+1,n)");
    const auto low = translate_product({1, 2}, 1, 3);
    EXPECT_FALSE(low.reachable);
    EXPECT_EQ(low.to_string(), "0");
}

TEST(TranslateProduct, ParityForbiddenHarmonic)
{
    const auto tr = translate_product({1, 1, 1}, 5, 2);
    EXPECT_FALSE(tr.reachable);
    EXPECT_TRUE(tr.terms.empty());
}

TEST(TranslateProduct, CubeOfFundamental)
{
    const auto tr = translate_product({1, 1, 1}, 5, 3);
    EXPECT_EQ(tr.to_string(), "a(n,n-1)*a(n-1,n-2)*a(n-2,n-3)");
    const auto fund = translate_product({1, 1, 1}, 5, 1);
    // three one-up two-down paths, weights averaging to 1
    double total = 0.0;
    for (const auto &t : fund.terms) {
        total += t.coefficient.value();
    }
    EXPECT_DOUBLE_EQ(total, 1.0);
    EXPECT_EQ(fund.terms.size(), 3u);
}

TEST(TranslateProduct, Errors)
{
    EXPECT_THROW(translate_product(std::initializer_list<int>{}, 2, 1), invalid_spec);
    EXPECT_THROW(translate_product({1, -1}, 2, 1), invalid_spec);
    EXPECT_THROW(translate_product({1, 1}, -1, 1), invalid_spec);
    EXPECT_THROW(translate_product({1, 1}, 2, -2), invalid_spec);
}

TEST(TranslateProduct, EqualAmplitudesAverageToOne)
{
    const int cases[][3] = {{1, 1, 2}, {1, 2, 3}, {1, 2, 1}, {2, 3, 5}, {1, 3, 2}};
    for (const auto &c : cases) {
        const auto tr = translate_product({c[0], c[1]}, 10, c[2]);
        const double v = evaluate(tr, [](int, int) { return 1.0; }, [](int) { return 1.0; });
        EXPECT_DOUBLE_EQ(v, 1.0) << c[0] << c[1] << c[2];
    }
}

TEST(TranslateProduct, AgreesWithMatrixProduct)
{
    OscillatorSpec spec;
    spec.kind = Kind::QuadraticForce;
    spec.lambda = 1e-3;
    const auto t = solve_with_levels(spec, 12, 1);
    // 2 (X X)(n, n-3) with X = a/2, restricted to one fundamental and one n-2 step
    for (int n = 3; n <= t.trusted_max(); ++n) {
        const auto tr = translate_product({1, 2}, n, 3);
        const double via_translation = evaluate(
            tr, [&](int a, int b) { return t.leading_amplitude(a, b); }, [&](int s) { return t.dc(s)[0]; });
        double via_matrix = 0.0;
        for (int k = 0; k < t.ladder_size(); ++k) {
            const int d1 = std::abs(n - k), d2 = std::abs(k - (n - 3));
            if ((d1 == 1 && d2 == 2) || (d1 == 2 && d2 == 1)) {
                via_matrix += t.leading_amplitude(n, k) * t.leading_amplitude(k, n - 3);
            }
        }
        EXPECT_NEAR(via_translation, 0.5 * via_matrix, 1e-14) << n;
        EXPECT_NEAR(evaluate_leading(tr, t), via_translation, 1e-14);
    }
}

TEST(TranslateProduct, DeterministicOrdering)
{
    const auto a = translate_product({2, 1, 1}, 7, 2);
    const auto b = translate_product({1, 2, 1}, 7, 2);
    EXPECT_EQ(a.to_string(), b.to_string());
}
