#ifndef MATRIXMECH_CLASSICAL_SERIES_HPP
#define MATRIXMECH_CLASSICAL_SERIES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "oscillator.hpp"
#include "series.hpp"

namespace matrixmech
{

inline constexpr int max_classical_order = 4;

/// Cosine series whose coefficients are lambda-series: entry tau multiplies cos(tau w t).
using trig_series = std::vector<series>;

namespace detail
{

inline void accumulate(series &target, const series &a, const series &b, double weight)
{
    series tmp(target.degree());
    tmp.add_product(a, b);
    tmp *= weight;
    target += tmp;
}

/// Product of two cosine series via cos a cos b = (cos(a+b) + cos(a-b)) / 2.
inline trig_series cos_product(const trig_series &a, const trig_series &b, std::size_t degree)
{
    trig_series r(a.size() + b.size() - 1, series(degree));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) {
            continue;
        }
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (b[j].is_zero()) {
                continue;
            }
            const std::size_t diff = i > j ? i - j : j - i;
            accumulate(r[i + j], a[i], b[j], 0.5);
            accumulate(r[diff], a[i], b[j], 0.5);
        }
    }
    return r;
}

/// Square of sum_tau s_tau sin(tau w t) as a cosine series.
inline trig_series sin_square(const trig_series &s, std::size_t degree)
{
    trig_series r(2 * s.size() - 1, series(degree));
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i].is_zero()) {
            continue;
        }
        for (std::size_t j = 1; j < s.size(); ++j) {
            if (s[j].is_zero()) {
                continue;
            }
            const std::size_t diff = i > j ? i - j : j - i;
            accumulate(r[diff], s[i], s[j], 0.5);
            accumulate(r[i + j], s[i], s[j], -0.5);
        }
    }
    return r;
}

inline trig_series cos_power(const trig_series &x, int p, std::size_t degree)
{
    trig_series r = x;
    for (int i = 1; i < p; ++i) {
        r = cos_product(r, x, degree);
    }
    return r;
}

inline void trim(trig_series &t)
{
    while (t.size() > 1 && t.back().is_zero()) {
        t.pop_back();
    }
}

} // namespace detail

/// How the free lambda-corrections of the fundamental coefficient are fixed.
enum class AmplitudeNormalization
{
    /// The action  pi m w sum_tau tau^2 a_tau^2  stays equal to pi m w0 a1^2,
    /// so a1 labels the orbit by its action (the quantum ladder's convention).
    ActionMatched,
    /// The fundamental coefficient is exactly a1 at every order.
    FixedFundamental,
};

/// Classical harmonic-balance solution
///   x(t) = sum_tau sum_k coeff(tau, k) lambda^k cos(tau w t).
///
/// Orders 0..max_order are solved completely; in addition, the leading
/// coefficient of every harmonic that first appears at order max_order + 1
/// is kept (the next overtone of the ladder).
struct FourierSeries
{
    Kind kind = Kind::Harmonic;
    double a1 = 0.0;
    int max_order = 0;
    AmplitudeNormalization normalization = AmplitudeNormalization::ActionMatched;
    trig_series harmonics;
    series omega_squared;

    [[nodiscard]] int highest_harmonic() const noexcept { return static_cast<int>(harmonics.size()) - 1; }
    [[nodiscard]] int table_degree() const noexcept { return static_cast<int>(omega_squared.degree()); }

    [[nodiscard]] double coeff(int tau, int k) const noexcept
    {
        if (tau < 0 || tau > highest_harmonic() || k < 0) {
            return 0.0;
        }
        return harmonics[static_cast<std::size_t>(tau)][static_cast<std::size_t>(k)];
    }

    /// Whether the (tau, k) coefficient is fully determined by the solve.
    [[nodiscard]] bool solved(int tau, int k) const noexcept
    {
        if (k <= max_order) {
            return true;
        }
        return k == max_order + 1 && tau != 1 && leading_order(kind, tau) == k;
    }

    /// Fundamental frequency series (positive root of omega_squared).
    [[nodiscard]] series omega() const { return sqrt(omega_squared); }

    [[nodiscard]] double omega_at(double lambda) const { return std::sqrt(omega_squared(lambda)); }

    [[nodiscard]] double displacement(double lambda, double t) const
    {
        const double w = omega_at(lambda);
        double x = 0.0;
        for (std::size_t tau = 0; tau < harmonics.size(); ++tau) {
            x += harmonics[tau](lambda) * std::cos(static_cast<double>(tau) * w * t);
        }
        return x;
    }
};

namespace detail
{

inline trig_series force_term(const FourierSeries &s, std::size_t degree)
{
    const int p = force_degree(s.kind);
    if (p < 2) {
        return trig_series(1, series(degree));
    }
    return cos_power(s.harmonics, p, degree);
}

inline void check_divisor(double d, const char *what)
{
    if (!(std::abs(d) > 1e-300) || !std::isfinite(d)) {
        throw vanishing_divisor(what);
    }
}

} // namespace detail

/// Solves  x'' + w0^2 x + lambda f(x) = 0  order by order in lambda by
/// harmonic balance, with the fundamental amplitude a1 as the free datum.
inline FourierSeries solve_classical(const OscillatorSpec &spec, double a1, int order,
                                     AmplitudeNormalization normalization = AmplitudeNormalization::ActionMatched)
{
    spec.validate();
    if (order < 0) {
        throw invalid_spec("classical order must be non-negative");
    }
    if (order > max_classical_order) {
        throw invalid_spec("classical order exceeds the implementation cap of " +
                           std::to_string(max_classical_order));
    }
    if (!std::isfinite(a1)) {
        throw invalid_spec("a1 must be finite");
    }
    spec.require_small(a1, "solve_classical");

    FourierSeries s;
    s.kind = spec.effective_kind();
    s.a1 = a1;
    s.max_order = order;
    s.normalization = normalization;

    const int p = force_degree(s.kind);
    const bool nonlinear = p >= 2;
    const int K = nonlinear && order >= 1 ? order + 1 : order;
    const auto deg = static_cast<std::size_t>(K);
    const int T = nonlinear ? (p - 1) * K + 1 : 1;
    const double w0sq = spec.omega0 * spec.omega0;

    s.harmonics.assign(static_cast<std::size_t>(T) + 1, series(deg));
    s.harmonics[1].coeff(0) = a1;
    s.omega_squared = series(deg, w0sq);
    if (!nonlinear || K == 0) {
        return s;
    }
    detail::check_divisor(a1, "fundamental amplitude a1 vanishes; the frequency correction is undefined");

    for (int k = 1; k <= K; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const trig_series force = detail::force_term(s, deg);
        auto forced = [&](int tau) { return static_cast<std::size_t>(tau) < force.size() ? force[static_cast<std::size_t>(tau)][uk - 1] : 0.0; };

        if (k <= order) {
            // cos(w t) balance fixes the frequency correction
            double acc = forced(1);
            for (int j = 1; j < k; ++j) {
                acc -= s.omega_squared[static_cast<std::size_t>(j)] * s.coeff(1, k - j);
            }
            s.omega_squared.coeff(uk) = acc / a1;
        }
        for (int tau = 0; tau <= T; ++tau) {
            if (tau == 1 || !s.solved(tau, k)) {
                continue;
            }
            const double tau2 = static_cast<double>(tau) * tau;
            double rhs = -forced(tau);
            for (int j = 1; j <= k; ++j) {
                rhs += tau2 * s.omega_squared[static_cast<std::size_t>(j)] * s.coeff(tau, k - j);
            }
            const double divisor = w0sq - tau2 * w0sq;
            detail::check_divisor(divisor, "resonant harmonic divisor");
            s.harmonics[static_cast<std::size_t>(tau)].coeff(uk) = rhs / divisor;
        }
        if (k <= order && normalization == AmplitudeNormalization::ActionMatched) {
            // w * sum tau^2 a_tau^2 is lambda-independent; its order-k part is
            // linear in the unknown fundamental correction.
            series sum_sq(deg);
            for (int tau = 1; tau <= T; ++tau) {
                const auto ut = static_cast<std::size_t>(tau);
                detail::accumulate(sum_sq, s.harmonics[ut], s.harmonics[ut], static_cast<double>(tau) * tau);
            }
            const series action_rate = s.omega() * sum_sq;
            const double divisor = 2.0 * a1 * spec.omega0;
            detail::check_divisor(divisor, "action normalization divisor");
            s.harmonics[1].coeff(uk) = -action_rate[uk] / divisor;
        }
    }
    return s;
}

/// Coefficients of cos(tau w t) lambda^k left after substituting the series
/// into the equation of motion; index [tau][k].
struct ClassicalResidual
{
    trig_series table;

    [[nodiscard]] double at(int tau, int k) const noexcept
    {
        if (tau < 0 || static_cast<std::size_t>(tau) >= table.size()) {
            return 0.0;
        }
        return table[static_cast<std::size_t>(tau)][static_cast<std::size_t>(k)];
    }
};

inline ClassicalResidual classical_residual(const OscillatorSpec &spec, const FourierSeries &s)
{
    const auto deg = static_cast<std::size_t>(s.table_degree());
    const double w0sq = spec.omega0 * spec.omega0;
    ClassicalResidual r;
    trig_series force = detail::force_term(s, deg);
    const bool nonlinear = force_degree(s.kind) >= 2;
    r.table.assign(std::max(force.size(), s.harmonics.size()), series(deg));
    for (std::size_t tau = 0; tau < s.harmonics.size(); ++tau) {
        const double tau2 = static_cast<double>(tau) * static_cast<double>(tau);
        r.table[tau] += s.harmonics[tau] * w0sq;
        r.table[tau] -= (s.omega_squared * s.harmonics[tau]) * tau2;
    }
    if (nonlinear) {
        for (std::size_t tau = 0; tau < force.size(); ++tau) {
            r.table[tau] += force[tau].shifted_up(1);
        }
    }
    return r;
}

/// Largest residual over the solved (tau, k) entries, in units of w0^2 |a1|
/// with lambda measured against w0^2 / |a1|^(p-1).
inline double max_scaled_residual(const OscillatorSpec &spec, const FourierSeries &s, const ClassicalResidual &r)
{
    const double amp = std::abs(s.a1) > 0.0 ? std::abs(s.a1) : 1.0;
    const int p = std::max(force_degree(s.kind), 2);
    const double coupling_unit = spec.omega0 * spec.omega0 / std::pow(amp, p - 1);
    const double unit = spec.omega0 * spec.omega0 * amp;
    double worst = 0.0;
    for (std::size_t tau = 0; tau < r.table.size(); ++tau) {
        for (std::size_t k = 0; k <= r.table[tau].degree(); ++k) {
            if (!s.solved(static_cast<int>(tau), static_cast<int>(k))) {
                continue;
            }
            worst = std::max(worst, std::abs(r.table[tau][k]) * std::pow(coupling_unit, static_cast<double>(k)) / unit);
        }
    }
    return worst;
}

/// Energy of the classical orbit, reduced to a cosine series and truncated
/// to the fully solved order.
struct ClassicalEnergy
{
    series constant;
    trig_series periodic; // index tau >= 1; entry 0 unused

    [[nodiscard]] double max_periodic() const noexcept
    {
        double m = 0.0;
        for (std::size_t tau = 1; tau < periodic.size(); ++tau) {
            m = std::max(m, max_abs(periodic[tau]));
        }
        return m;
    }
};

inline ClassicalEnergy classical_energy(const OscillatorSpec &spec, const FourierSeries &s)
{
    const auto deg = static_cast<std::size_t>(s.table_degree());
    const double m = spec.mass;

    trig_series velocity_weights(s.harmonics.size(), series(deg));
    for (std::size_t tau = 1; tau < s.harmonics.size(); ++tau) {
        velocity_weights[tau] = s.harmonics[tau] * static_cast<double>(tau);
    }
    // xdot^2 = w^2 (sum tau a_tau sin tau w t)^2
    trig_series kinetic = detail::sin_square(velocity_weights, deg);
    for (auto &c : kinetic) {
        c = (s.omega_squared * c) * (0.5 * m);
    }
    trig_series total = kinetic;
    trig_series x2 = detail::cos_product(s.harmonics, s.harmonics, deg);
    auto add = [&total](const trig_series &t, double w) {
        if (t.size() > total.size()) {
            total.resize(t.size(), series(total.front().degree()));
        }
        for (std::size_t i = 0; i < t.size(); ++i) {
            total[i] += t[i] * w;
        }
    };
    add(x2, 0.5 * m * spec.omega0 * spec.omega0);
    const int p = force_degree(s.kind);
    if (p >= 2) {
        trig_series xp1 = detail::cos_power(s.harmonics, p + 1, deg);
        for (auto &c : xp1) {
            c = c.shifted_up(1);
        }
        add(xp1, m / static_cast<double>(p + 1));
    }

    const auto solved_deg = static_cast<std::size_t>(s.max_order);
    ClassicalEnergy e;
    e.constant = total[0].with_degree(solved_deg);
    e.periodic.assign(total.size(), series(solved_deg));
    for (std::size_t tau = 1; tau < total.size(); ++tau) {
        e.periodic[tau] = total[tau].with_degree(solved_deg);
    }
    detail::trim(e.periodic);
    return e;
}

/// Action J = closed integral of p dx = pi m a1^2 w for the orbit x = a1 cos(w t).
inline double action_integral(const OscillatorSpec &spec, double a1)
{
    spec.validate();
    if (spec.kind != Kind::Harmonic) {
        throw invalid_spec("the action integral is defined here for the harmonic oscillator only");
    }
    return std::numbers::pi * spec.mass * a1 * a1 * spec.omega0;
}

} // namespace matrixmech

#endif
