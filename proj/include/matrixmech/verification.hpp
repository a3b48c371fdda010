#ifndef MATRIXMECH_VERIFICATION_HPP
#define MATRIXMECH_VERIFICATION_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "classical_series.hpp"
#include "oracle.hpp"
#include "quantum_ladder.hpp"

namespace matrixmech
{

/// Deliberate faults used to prove that the checks can fail.
enum class Mutation
{
    None,
    ScaleOvertone2, // a(n,n-2) scaled by 1.1
    FlipDc,         // a0(n) sign-flipped
    ShiftLevel,     // W(1) raised by 1e-6 hbar w0
};

inline std::optional<Mutation> parse_mutation(std::string_view s) noexcept
{
    if (s.empty() || s == "none") {
        return Mutation::None;
    }
    if (s == "a2") {
        return Mutation::ScaleOvertone2;
    }
    if (s == "a0") {
        return Mutation::FlipDc;
    }
    if (s == "W") {
        return Mutation::ShiftLevel;
    }
    return std::nullopt;
}

inline std::string_view to_string(Mutation m) noexcept
{
    switch (m) {
    case Mutation::ScaleOvertone2: return "a2";
    case Mutation::FlipDc: return "a0";
    case Mutation::ShiftLevel: return "W";
    case Mutation::None: break;
    }
    return "none";
}

/// Applies the fault in place; returns false when it leaves the table unchanged.
inline bool apply_mutation(TransitionTable &t, Mutation m)
{
    bool changed = false;
    switch (m) {
    case Mutation::None:
        return false;
    case Mutation::ScaleOvertone2:
        for (int n = 2; n < t.ladder_size(); ++n) {
            series &a = t.amplitude_ref(n, n - 2);
            changed = changed || !a.is_zero();
            a *= 1.1;
        }
        return changed;
    case Mutation::FlipDc:
        for (int n = 0; n < t.ladder_size(); ++n) {
            series &a = t.dc_ref(n);
            changed = changed || !a.is_zero();
            a *= -1.0;
        }
        return changed;
    case Mutation::ShiftLevel:
        if (!t.has_levels() || t.ladder_size() < 2) {
            return false;
        }
        t.level_ref(1).coeff(0) += 1e-6 * t.spec().hbar() * t.spec().omega0;
        return true;
    }
    return false;
}

enum class CheckStatus
{
    Pass,
    Fail,
    Skip,
};

inline std::string_view to_string(CheckStatus s) noexcept
{
    switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skip: return "SKIP";
    }
    return "?";
}

struct Check
{
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    CheckStatus status = CheckStatus::Pass;
    std::string detail;
};

struct VerifyOptions
{
    int n_max = 10; // highest reported (trusted) state
    int order = 1;
    double tol = 1e-12;
    std::size_t oracle_n = 0; // 0 selects default_oracle_dim
    Mutation mutation = Mutation::None;
};

struct VerifyReport
{
    std::vector<Check> checks;
    bool mutation_applied = false;

    [[nodiscard]] bool pass() const noexcept
    {
        return std::none_of(checks.begin(), checks.end(), [](const Check &c) { return c.status == CheckStatus::Fail; });
    }

    [[nodiscard]] const Check *find(std::string_view name) const noexcept
    {
        for (const auto &c : checks) {
            if (c.name == name) {
                return &c;
            }
        }
        return nullptr;
    }
};

/// lambda^1 coefficient of the level closed form.
inline double level_first_order(const OscillatorSpec &spec, int n)
{
    if (spec.effective_kind() != Kind::CubicForce) {
        return 0.0;
    }
    OscillatorSpec unit = spec;
    unit.lambda = 1.0;
    return rs_first_order(unit, n);
}

/// lambda^1 coefficient of w(n,n-1): (3/8) h n / (pi w0^2 m) for the cubic force.
inline double fundamental_frequency_first_order(const OscillatorSpec &spec, int n)
{
    if (spec.effective_kind() != Kind::CubicForce) {
        return 0.0;
    }
    return 0.375 * spec.planck_h * n / (std::numbers::pi * spec.omega0 * spec.omega0 * spec.mass);
}

/// a(n,n-1) = sqrt(n h / (m pi w0)) (1 - lambda (3/16) h n / (pi w0^3 m)) to first order.
inline series fundamental_amplitude_closed_form(const OscillatorSpec &spec, int n)
{
    const double base = ladder_amplitude(spec, n, spec.omega0);
    series a(1, base);
    if (spec.effective_kind() == Kind::CubicForce) {
        a.coeff(1) = -base * 0.1875 * spec.planck_h * n /
                     (std::numbers::pi * std::pow(spec.omega0, 3) * spec.mass);
    }
    return a;
}

namespace detail
{

inline Check make_check(std::string name, double measured, double tolerance, std::string detail = {})
{
    Check c;
    c.name = std::move(name);
    c.measured = measured;
    c.tolerance = tolerance;
    c.status = measured <= tolerance ? CheckStatus::Pass : CheckStatus::Fail;
    c.detail = std::move(detail);
    return c;
}

inline Check skipped(std::string name, std::string why)
{
    Check c;
    c.name = std::move(name);
    c.status = CheckStatus::Skip;
    c.detail = std::move(why);
    return c;
}

/// Worst relative deviation of a(n,n-1) from sqrt(n h / (m pi w(n,n-1))) at one coupling.
inline double quantization_deviation(const TransitionTable &t, double lambda)
{
    const OscillatorSpec &spec = t.spec();
    double worst = 0.0;
    for (int n = 1; n <= t.trusted_max(); ++n) {
        const double w = t.frequency(n, n - 1)(lambda);
        const double exact = std::sqrt(n * spec.planck_h / (spec.mass * std::numbers::pi * w));
        worst = std::max(worst, std::abs(t.amplitude(n, n - 1)(lambda) - exact) / exact);
    }
    return worst;
}

} // namespace detail

/// Couplings for an oracle sweep: {lambda, 2 lambda}, or {lambda/2, lambda}
/// when doubling would leave the small-coupling regime at state top.
inline std::vector<double> oracle_lambdas(const OscillatorSpec &spec, int top)
{
    if (spec.lambda == 0.0) {
        return {0.0};
    }
    OscillatorSpec doubled = spec;
    doubled.lambda = 2.0 * spec.lambda;
    if (doubled.smallness_ratio(state_amplitude(doubled, top)) < doubled.smallness_max) {
        return {spec.lambda, 2.0 * spec.lambda};
    }
    return {spec.lambda / 2.0, spec.lambda};
}

/// Ladder size used so that states 0..n_max are trusted at the given order.
inline int padded_ladder(int n_max, int order) { return n_max + 3 * order; }

/// Runs every identity, residual and oracle check on a solve whose trusted
/// states are 0..opt.n_max.
inline VerifyReport run_verification(const OscillatorSpec &spec, const VerifyOptions &opt)
{
    spec.validate();
    if (opt.n_max < 1) {
        throw invalid_spec("verification needs n_max >= 1");
    }
    if (!(opt.tol > 0.0)) {
        throw invalid_spec("tolerance must be positive");
    }
    TransitionTable t = solve_with_levels(spec, padded_ladder(opt.n_max, opt.order), opt.order);
    VerifyReport rep;
    rep.mutation_applied = apply_mutation(t, opt.mutation);

    const Kind kind = spec.effective_kind();
    const int top = t.trusted_max();
    const int order = t.order();
    const double lambda = spec.lambda;
    const NaturalUnits units = NaturalUnits::of(spec);
    auto scale = [&units](int k) { return std::pow(units.coupling, static_cast<double>(k)); };
    auto &out = rep.checks;

    {
        double worst = 0.0;
        for (int n = 0; n <= top; ++n) {
            worst = std::max(worst, std::abs(quantization_residual(spec, t, n)) / spec.planck_h);
        }
        out.push_back(detail::make_check("sum_rule", worst, opt.tol, "pi m w0 [a^2(n+1,n) - a^2(n,n-1)] - h, units of h"));
    }
    {
        double worst = 0.0;
        for (int n = 0; n <= top; ++n) {
            for (int m = 0; m <= top; ++m) {
                worst = std::max(worst, max_abs(t.amplitude(n, m) - t.amplitude(m, n)));
                worst = std::max(worst, max_abs(t.frequency(n, m) + t.frequency(m, n)) / spec.omega0);
            }
        }
        out.push_back(detail::make_check("symmetry", worst, opt.tol, "a(n,m) = a(m,n) and w(n,m) = -w(m,n)"));
    }
    {
        double worst = 0.0;
        for (int n = 0; n <= top; ++n) {
            for (int k = 0; k < n; ++k) {
                for (int m = 0; m < k; ++m) {
                    const double d = t.frequency(n, k)(lambda) + t.frequency(k, m)(lambda) - t.frequency(n, m)(lambda);
                    worst = std::max(worst, std::abs(d) / spec.omega0);
                }
            }
        }
        out.push_back(detail::make_check("ritz_additivity", worst, opt.tol, "w(n,k) + w(k,m) - w(n,m), units of w0"));
    }
    {
        double worst = 0.0;
        int where = 0;
        for (int n = 0; n <= top; ++n) {
            const series &w = t.level(n);
            for (int k = 0; k <= order; ++k) {
                const double closed = k == 0 ? (n + 0.5) * units.energy : k == 1 ? level_first_order(spec, n) : 0.0;
                const double d = std::abs(w[static_cast<std::size_t>(k)] - closed) * scale(k) / units.energy;
                if (d > worst) {
                    worst = d;
                    where = n;
                }
            }
        }
        out.push_back(detail::make_check("level_closed_form", worst, opt.tol,
                                         "W(n) against (n+1/2) hbar w0 + first-order shift; worst n=" + std::to_string(where)));
    }

    const QuantumResiduals qr = quantum_residuals(spec, t);
    out.push_back(detail::make_check("residual_dc", qr.max_scaled(0, 0), opt.tol, "diagonal equation, a0(n)"));
    out.push_back(detail::make_check("residual_fundamental", qr.max_scaled(1, 1), opt.tol, "transitions n -> n-1"));
    out.push_back(detail::make_check("residual_overtone2", qr.max_scaled(2, 2), opt.tol, "transitions n -> n-2"));
    out.push_back(detail::make_check("residual_overtone3", qr.max_scaled(3, 3), opt.tol, "transitions n -> n-3"));
    out.push_back(detail::make_check("residual_overtone_high", qr.max_scaled(4), opt.tol, "transitions n -> n-tau, tau >= 4"));
    out.push_back(detail::make_check("offdiagonal_energy", offdiagonal_energy_check(spec, t), opt.tol,
                                     "largest off-diagonal energy entry, units of hbar w0"));

    {
        double worst = 0.0;
        for (int n = 1; n <= top; ++n) {
            const series w = t.frequency(n, n - 1);
            for (int k = 0; k <= order; ++k) {
                const double closed = k == 0 ? spec.omega0 : k == 1 ? fundamental_frequency_first_order(spec, n) : 0.0;
                worst = std::max(worst, std::abs(w[static_cast<std::size_t>(k)] - closed) * scale(k) / spec.omega0);
            }
        }
        out.push_back(detail::make_check("fundamental_frequency_closed_form", worst, opt.tol,
                                         "w(n,n-1) from level differences, units of w0"));
    }
    {
        double worst = 0.0;
        for (int n = 1; n <= top; ++n) {
            const series a = t.amplitude(n, n - 1);
            const series closed = fundamental_amplitude_closed_form(spec, n);
            for (int k = 0; k <= order; ++k) {
                const auto uk = static_cast<std::size_t>(k);
                worst = std::max(worst, std::abs(a[uk] - closed[uk]) * scale(k) / units.length);
            }
        }
        out.push_back(detail::make_check("fundamental_amplitude_closed_form", worst, opt.tol,
                                         "a(n,n-1) series, units of sqrt(hbar/m w0)"));
    }

    if (kind == Kind::CubicForce && order >= 1) {
        const double d_full = detail::quantization_deviation(t, lambda);
        const double d_half = detail::quantization_deviation(t, lambda / 2.0);
        if (d_full < 1e-13) {
            out.push_back(detail::skipped("amplitude_second_order_scaling",
                                          "deviation below rounding resolution at this coupling"));
        } else {
            const double exponent = std::log2(d_full / d_half);
            auto c = detail::make_check("amplitude_second_order_scaling", std::abs(exponent - 2.0), 0.2,
                                        "exponent of |a - sqrt(n h / m pi w)| under halving lambda: " +
                                            std::to_string(exponent));
            out.push_back(std::move(c));
        }
    } else {
        out.push_back(detail::skipped("amplitude_second_order_scaling", "needs the cubic force at order 1"));
    }

    const int overtone = std::max(force_degree(kind), 2);
    if (kind != Kind::Harmonic && order >= 1 && top >= overtone) {
        const double a1 = ladder_amplitude(spec, 1, spec.omega0);
        const FourierSeries s = solve_classical(spec, a1, 1);
        double worst = 0.0;
        for (int n = overtone; n <= top; ++n) {
            const CorrespondenceReport c = correspondence_check(spec, t, s, n);
            if (c.defined) {
                worst = std::max(worst, std::abs(c.quantum_ratio - c.classical_ratio) / std::abs(c.classical_ratio));
            } else {
                worst = std::max(worst, 1.0);
            }
        }
        out.push_back(detail::make_check("overtone_correspondence", worst, opt.tol,
                                         "a(n,n-tau)/chain of fundamentals against a_tau/a1^tau"));
    } else {
        out.push_back(detail::skipped("overtone_correspondence", "needs a nonlinear force at order >= 1"));
    }

    {
        const double a1 = ladder_amplitude(spec, 1, spec.omega0);
        const FourierSeries s = solve_classical(spec, a1, std::min(order, max_classical_order));
        out.push_back(detail::make_check("classical_residual", max_scaled_residual(spec, s, classical_residual(spec, s)),
                                         opt.tol, "harmonic balance back-substitution"));
        const ClassicalEnergy e = classical_energy(spec, s);
        const int p = std::max(force_degree(kind), 2);
        const double e_unit = spec.mass * spec.omega0 * spec.omega0 * a1 * a1;
        const double c_unit = spec.omega0 * spec.omega0 / std::pow(a1, p - 1);
        double worst = 0.0;
        for (std::size_t tau = 1; tau < e.periodic.size(); ++tau) {
            for (std::size_t k = 0; k <= e.periodic[tau].degree(); ++k) {
                worst = std::max(worst, std::abs(e.periodic[tau][k]) * std::pow(c_unit, static_cast<double>(k)) / e_unit);
            }
        }
        out.push_back(detail::make_check("classical_energy_periodic", worst, opt.tol,
                                         "periodic part of the classical energy, units of m w0^2 a1^2"));
    }

    {
        const std::vector<double> lambdas = oracle_lambdas(spec, top);
        CompareOptions co;
        co.basis = opt.oracle_n;
        co.n_track = top;
        const CompareReport cr = compare(t, lambdas, co);
        double lev = 0.0, amp = 0.0, ot = 0.0;
        bool has_ot = false;
        for (const auto &row : cr.rows) {
            lev = std::max(lev, row.level_diff / row.level_tol);
            if (row.n >= 1) {
                amp = std::max(amp, row.amp_rel_diff / row.amp_tol);
            }
            if (row.overtone_tol > 0.0) {
                has_ot = true;
                ot = std::max(ot, row.overtone_rel_diff / row.overtone_tol);
            }
        }
        const std::string basis = "basis " + std::to_string(cr.basis);
        out.push_back(detail::make_check("oracle_levels", lev, 1.0, "max |W - E| / tolerance, " + basis));
        out.push_back(detail::make_check("oracle_amplitudes", amp, 1.0, "max relative a(n,n-1) error / tolerance"));
        if (has_ot) {
            out.push_back(detail::make_check("oracle_overtone_amplitudes", ot, 1.0,
                                             "max relative a(n,n-" + std::to_string(overtone) + ") error / tolerance"));
        } else {
            out.push_back(detail::skipped("oracle_overtone_amplitudes", "no overtone lines at this coupling"));
        }
        if (cr.exponent_defined) {
            out.push_back(detail::make_check("oracle_scaling_exponent", std::abs(cr.scaling_exponent - 2.0), 0.2,
                                             "exponent " + std::to_string(cr.scaling_exponent) + " from lambda " +
                                                 std::to_string(lambdas.front()) + ".." + std::to_string(lambdas.back())));
        } else {
            out.push_back(detail::skipped("oracle_scaling_exponent", "needs a nonzero coupling"));
        }
        out.push_back(detail::make_check("oracle_convergence", cr.convergence_delta / units.energy, 1e-10,
                                         "max eigenvalue change from N to 2N, units of hbar w0"));
    }
    return rep;
}

} // namespace matrixmech

#endif
