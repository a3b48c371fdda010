#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <matrixmech/classical_series.hpp>
#include <matrixmech/quantum_ladder.hpp>

using namespace matrixmech;

namespace
{

OscillatorSpec spec_of(Kind kind, double lambda, double h = 2.0 * std::numbers::pi)
{
    OscillatorSpec s;
    s.kind = kind;
    s.lambda = lambda;
    s.planck_h = h;
    return s;
}

} // namespace

TEST(BaseAmplitudes, Values)
{
    const auto t = base_amplitudes(spec_of(Kind::Harmonic, 0.0, std::numbers::pi), 4);
    EXPECT_DOUBLE_EQ(t.amplitude(1, 0)[0], 1.0);
    EXPECT_EQ(t.amplitude(0, -1)[0], 0.0);
    const auto u = base_amplitudes(OscillatorSpec{}, 4);
    EXPECT_DOUBLE_EQ(u.amplitude(2, 1)[0], 2.0);
    EXPECT_DOUBLE_EQ(u.amplitude(1, 2)[0], 2.0);
    EXPECT_EQ(u.amplitude(2, 0)[0], 0.0);
    EXPECT_THROW(base_amplitudes(OscillatorSpec{}, 0), invalid_spec);
}

TEST(QuantizationResidual, ZeroOnBaseLadder)
{
    OscillatorSpec spec;
    spec.mass = 0.7;
    spec.omega0 = 2.5;
    spec.planck_h = 0.3;
    const auto t = base_amplitudes(spec, 12);
    for (int n = 0; n < 12; ++n) {
        EXPECT_LE(std::abs(quantization_residual(spec, t, n)), 1e-12 * spec.planck_h) << n;
    }
    EXPECT_THROW(quantization_residual(spec, t, 12), invalid_spec);
}

TEST(QuantizationResidual, DoubledAmplitude)
{
    const OscillatorSpec spec;
    auto t = base_amplitudes(spec, 6);
    const double orig = t.amplitude(3, 2)[0];
    t.amplitude_ref(3, 2).coeff(0) *= 2.0;
    EXPECT_NEAR(quantization_residual(spec, t, 2), 3.0 * std::numbers::pi * orig * orig, 1e-12);
}

TEST(SolveQuantum, QuadraticForceOvertone)
{
    const auto spec = spec_of(Kind::QuadraticForce, 1e-3, std::numbers::pi);
    const auto t = solve_quantum(spec, 8, 1);
    EXPECT_NEAR(t.amplitude(2, 0)[1], std::sqrt(2.0) / 6.0, 1e-14);
    for (int n = 2; n <= t.trusted_max(); ++n) {
        const double ratio = t.amplitude(n, n - 2)[1] / (t.amplitude(n, n - 1)[0] * t.amplitude(n - 1, n - 2)[0]);
        EXPECT_NEAR(ratio, 1.0 / 6.0, 1e-14) << n;
    }
}

TEST(SolveQuantum, HarmonicHasOnlyFundamentals)
{
    const auto t = solve_quantum(OscillatorSpec{}, 8, 1);
    for (int n = 0; n < t.ladder_size(); ++n) {
        EXPECT_TRUE(t.dc(n).is_zero());
        for (int m = 0; m < n - 1; ++m) {
            EXPECT_TRUE(t.amplitude(n, m).is_zero()) << n << "," << m;
        }
    }
}

TEST(SolveQuantum, CubicForceFundamentalAmplitude)
{
    const auto t = solve_quantum(spec_of(Kind::CubicForce, 1e-3), 8, 1);
    EXPECT_NEAR(t.amplitude(1, 0)[0], std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(t.amplitude(1, 0)[1], -std::sqrt(2.0) * 3.0 / 8.0, 1e-14);
    for (int n = 1; n <= t.trusted_max(); ++n) {
        EXPECT_TRUE(t.amplitude(n, n - 2).is_zero()); // parity
    }
}

TEST(SolveQuantum, Errors)
{
    EXPECT_THROW(solve_quantum(OscillatorSpec{}, 3, 1), invalid_spec); // too small for order 1
    EXPECT_THROW(solve_quantum(OscillatorSpec{}, 10, max_quantum_order + 1), invalid_spec);
    EXPECT_THROW(solve_quantum(spec_of(Kind::CubicForce, 0.05), 20, 1), smallness_violation);
    OscillatorSpec bad;
    bad.mass = -1.0;
    EXPECT_THROW(solve_quantum(bad, 10, 1), invalid_spec);
    EXPECT_NO_THROW(solve_quantum(OscillatorSpec{}, 4, 1));
}

TEST(EnergyLevels, Harmonic)
{
    const auto t = solve_with_levels(OscillatorSpec{}, 23, 1);
    for (int n = 0; n <= 20; ++n) {
        EXPECT_NEAR(t.level(n)(0.0), n + 0.5, 1e-12);
    }
}

TEST(EnergyLevels, QuadraticForceHasNoFirstOrderShift)
{
    const auto t = solve_with_levels(spec_of(Kind::QuadraticForce, 1e-3), 10, 1);
    for (int n = 0; n <= t.trusted_max(); ++n) {
        EXPECT_NEAR(t.level(n)[0], n + 0.5, 1e-13);
        EXPECT_NEAR(t.level(n)[1], 0.0, 1e-13);
    }
}

TEST(EnergyLevels, CubicForceShift)
{
    const auto t = solve_with_levels(spec_of(Kind::CubicForce, 1e-3), 10, 1);
    EXPECT_NEAR(t.level(0)(1e-3), 0.5001875, 1e-13);
    for (int n = 0; n <= t.trusted_max(); ++n) {
        EXPECT_NEAR(t.level(n)[1], 0.375 * (n * n + n + 0.5), 1e-12) << n;
    }
}

TEST(EnergyLevels, RequireComputation)
{
    const auto t = solve_quantum(OscillatorSpec{}, 6, 1);
    EXPECT_FALSE(t.has_levels());
    EXPECT_THROW((void)t.level(0), std::logic_error);
}

TEST(LineSpectrum, HarmonicFundamentalsOnly)
{
    const auto t = solve_with_levels(OscillatorSpec{}, 8, 1);
    const auto lines = line_spectrum(t);
    double last = 0.0;
    for (const auto &l : lines) {
        EXPECT_EQ(l.upper - l.lower, 1);
        EXPECT_NEAR(l.omega, 1.0, 1e-14);
        EXPECT_GT(l.rel_intensity, last);
        last = l.rel_intensity;
    }
    EXPECT_DOUBLE_EQ(last, 1.0);
}

TEST(LineSpectrum, CubicForceFundamentalFrequency)
{
    const auto t = solve_with_levels(spec_of(Kind::CubicForce, 1e-3), 8, 1);
    EXPECT_NEAR(t.frequency(1, 0)(1e-3), 1.00075, 1e-14);
    const auto lines = line_spectrum(t);
    bool found_overtone = false;
    for (const auto &l : lines) {
        if (l.upper - l.lower == 3) {
            found_overtone = true;
            EXPECT_EQ(l.amplitude_order, 1);
        }
        if (l.upper - l.lower == 1) {
            EXPECT_EQ(l.amplitude_order, 0);
        }
    }
    EXPECT_TRUE(found_overtone);
}

TEST(LineSpectrum, QuadraticForceOvertoneIntensity)
{
    const double lambda = 1e-3;
    const auto t = solve_with_levels(spec_of(Kind::QuadraticForce, lambda), 10, 1);
    const auto lines = line_spectrum(t);
    double strongest = 0.0;
    for (const auto &l : lines) {
        strongest = std::max(strongest, l.amplitude * l.amplitude);
    }
    for (const auto &l : lines) {
        if (l.upper - l.lower == 2) {
            const int n = l.upper;
            const double predicted = lambda * lambda * n * (n - 1) * 4.0 / 36.0;
            EXPECT_NEAR(l.rel_intensity * strongest / predicted, 1.0, 1e-2) << n;
            EXPECT_EQ(l.amplitude_order, 1);
        }
    }
}

TEST(Ritz, CombinationIsExact)
{
    const auto t = solve_with_levels(spec_of(Kind::CubicForce, 2e-3), 10, 1);
    for (int n = 0; n <= 10; ++n) {
        for (int k = 0; k <= n; ++k) {
            for (int m = 0; m <= k; ++m) {
                const series d = t.frequency(n, k) + t.frequency(k, m) - t.frequency(n, m);
                EXPECT_LE(max_abs(d), 1e-13);
            }
        }
    }
}

TEST(QuantumResiduals, SolvedTablesVanish)
{
    for (Kind k : {Kind::Harmonic, Kind::QuadraticForce, Kind::CubicForce}) {
        const auto spec = spec_of(k, k == Kind::Harmonic ? 0.0 : 1e-3);
        const auto t = solve_with_levels(spec, 12, 1);
        EXPECT_LE(quantum_residuals(spec, t).max_scaled(), 1e-12) << to_string(k);
    }
}

TEST(QuantumResiduals, PerturbedOvertone)
{
    const auto spec = spec_of(Kind::QuadraticForce, 1e-3);
    auto t = solve_with_levels(spec, 10, 1);
    const double eps = 1e-4;
    t.amplitude_ref(4, 2).coeff(1) += eps;
    const auto r = quantum_residuals(spec, t).find(4, 2, 1);
    ASSERT_TRUE(r.has_value());
    EXPECT_NEAR(r->value, -3.0 * eps, 1e-13);
}

TEST(QuantumResiduals, HarmonicFundamentalFrequency)
{
    const OscillatorSpec spec;
    const auto t = solve_with_levels(spec, 8, 1);
    for (int n = 1; n <= t.trusted_max(); ++n) {
        const series w = t.frequency(n, n - 1);
        EXPECT_NEAR(spec.omega0 * spec.omega0 - w[0] * w[0], 0.0, 1e-14);
    }
    for (const auto &e : quantum_residuals(spec, t).entries) {
        EXPECT_LE(std::abs(e.value), 1e-13);
    }
}

TEST(OffDiagonalEnergy, VanishesAndDetectsFaults)
{
    for (Kind k : {Kind::QuadraticForce, Kind::CubicForce}) {
        const auto spec = spec_of(k, 1e-3);
        auto t = solve_with_levels(spec, 12, 1);
        EXPECT_LE(offdiagonal_energy_check(spec, t), 1e-12);
        // a(n,n-1) at order lambda only reaches the energy matrix at lambda^2
        const int tau = force_degree(k);
        t.amplitude_ref(tau + 1, 1).coeff(1) += 0.01;
        EXPECT_GT(offdiagonal_energy_check(spec, t), 1e-4);
    }
}

TEST(Correspondence, QuadraticOvertoneRatioMatchesClassical)
{
    const auto spec = spec_of(Kind::QuadraticForce, 1e-3, std::numbers::pi);
    const auto t = solve_with_levels(spec, 10, 1);
    const auto s = solve_classical(spec, 1.0, 1);
    const auto r = correspondence_check(spec, t, s, 2);
    ASSERT_TRUE(r.defined);
    EXPECT_NEAR(r.classical_ratio, 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(r.quantum_ratio, 1.0 / 6.0, 1e-14);
    EXPECT_NEAR(r.fundamental_ratio, 1.0, 1e-14);
    for (int n = 2; n <= t.trusted_max(); ++n) {
        EXPECT_NEAR(correspondence_check(spec, t, s, n).quantum_ratio, 1.0 / 6.0, 1e-14) << n;
    }
    EXPECT_THROW(correspondence_check(spec, t, s, 1), invalid_spec);
}

TEST(Correspondence, OvertoneApproachesClassicalForLargeN)
{
    const auto spec = spec_of(Kind::CubicForce, 1e-4);
    const auto t = solve_with_levels(spec, 40, 1);
    const auto s = solve_classical(spec, 1.0, 1);
    double prev = 0.0;
    for (int n = 3; n <= 30; n += 9) {
        const double dev = std::abs(std::abs(correspondence_check(spec, t, s, n).overtone_ratio) - 1.0);
        if (n > 3) {
            EXPECT_LT(dev, prev);
        }
        prev = dev;
    }
}

TEST(QuantumProperty, IdentitiesHoldForRandomUnits)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (int trial = 0; trial < 12; ++trial) {
        OscillatorSpec spec;
        spec.mass = u(rng);
        spec.omega0 = u(rng);
        spec.planck_h = u(rng);
        spec.kind = trial % 2 ? Kind::CubicForce : Kind::QuadraticForce;
        const NaturalUnits units = NaturalUnits::of(spec);
        spec.lambda = 1e-3 * units.coupling;
        const auto t = solve_with_levels(spec, 9, 1);
        EXPECT_LE(quantum_residuals(spec, t).max_scaled(), 1e-12);
        EXPECT_LE(offdiagonal_energy_check(spec, t), 1e-12);
        for (int n = 0; n < t.trusted_max(); ++n) {
            EXPECT_LE(std::abs(quantization_residual(spec, t, n)), 1e-12 * spec.planck_h);
            EXPECT_NEAR(t.level(n)[0] / units.energy, n + 0.5, 1e-12);
            // a^2(n+1,n) w(n+1,n) = (n+1) h / (m pi) through first order
            const series a = t.amplitude(n + 1, n);
            const series product = a * a * t.frequency(n + 1, n);
            const double target = (n + 1) * spec.planck_h / (spec.mass * std::numbers::pi);
            EXPECT_NEAR(product[0] / target, 1.0, 1e-12);
            EXPECT_NEAR(product[1] * units.coupling / target, 0.0, 1e-12);
        }
    }
}
