#ifndef MATRIXMECH_QUANTUM_LADDER_HPP
#define MATRIXMECH_QUANTUM_LADDER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "classical_series.hpp"
#include "operator_matrix.hpp"
#include "oscillator.hpp"
#include "series.hpp"

namespace matrixmech
{

inline constexpr int max_quantum_order = 1;

/// Quantum solution on the ladder 0..n_max: transition amplitudes a(n,m),
/// constant displacements a0(n) and (once filled) level energies W(n), all
/// as lambda-series.
///
/// The table is solved on one extra guard state above n_max so that the
/// top reported level sees its absorption partner. Frequencies are never
/// stored; w(n,m) = (2 pi / h)(W(n) - W(m)).
class TransitionTable
{
public:
    TransitionTable() = default;

    TransitionTable(const OscillatorSpec &spec, int n_max, int order, std::size_t degree)
        : spec_(spec), n_max_(n_max), order_(order), degree_(degree)
    {
        const auto size = static_cast<std::size_t>(ladder_size());
        amplitudes_.assign(size * (size - 1) / 2, series(degree));
        dc_.assign(size, series(degree));
    }

    [[nodiscard]] const OscillatorSpec &spec() const noexcept { return spec_; }
    [[nodiscard]] int n_max() const noexcept { return n_max_; }
    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] std::size_t degree() const noexcept { return degree_; }
    /// Number of states actually carried, including the guard state.
    [[nodiscard]] int ladder_size() const noexcept { return n_max_ + 2; }
    /// States whose equations only reference solved neighbours.
    [[nodiscard]] int trusted_max() const noexcept { return n_max_ - 3 * order_; }
    [[nodiscard]] bool trusted(int n) const noexcept { return n >= 0 && n <= trusted_max(); }

    /// Symmetric amplitude a(n,m); zero on the diagonal and for any index outside the ladder.
    [[nodiscard]] series amplitude(int n, int m) const
    {
        if (n == m || !in_ladder(n) || !in_ladder(m)) {
            return series(degree_);
        }
        return amplitudes_[packed(n, m)];
    }

    series &amplitude_ref(int n, int m)
    {
        if (n == m || !in_ladder(n) || !in_ladder(m)) {
            throw std::out_of_range("amplitude index outside the ladder");
        }
        return amplitudes_[packed(n, m)];
    }

    /// a0(n), with the diagonal of the displacement matrix equal to lambda * a0(n).
    [[nodiscard]] series dc(int n) const { return in_ladder(n) ? dc_[static_cast<std::size_t>(n)] : series(degree_); }

    series &dc_ref(int n)
    {
        if (!in_ladder(n)) {
            throw std::out_of_range("state index outside the ladder");
        }
        return dc_[static_cast<std::size_t>(n)];
    }

    [[nodiscard]] bool has_levels() const noexcept { return levels_.has_value(); }

    [[nodiscard]] const series &level(int n) const
    {
        if (!levels_) {
            throw std::logic_error("levels have not been computed; call energy_levels first");
        }
        return levels_->at(static_cast<std::size_t>(n));
    }

    series &level_ref(int n)
    {
        if (!levels_) {
            throw std::logic_error("levels have not been computed; call energy_levels first");
        }
        return levels_->at(static_cast<std::size_t>(n));
    }

    void set_levels(std::vector<series> levels)
    {
        if (levels.size() != static_cast<std::size_t>(ladder_size())) {
            throw std::invalid_argument("level vector does not match the ladder size");
        }
        levels_ = std::move(levels);
    }

    /// w(n,m) = (2 pi / h)(W(n) - W(m)); antisymmetric by construction.
    [[nodiscard]] series frequency(int n, int m) const { return (level(n) - level(m)) * (1.0 / spec_.hbar()); }

    /// Coefficient of the lowest power of lambda at which a(n,m) can appear;
    /// this is the number the classical labels a_tau translate to.
    [[nodiscard]] double leading_amplitude(int n, int m) const
    {
        const int tau = std::abs(n - m);
        return amplitude(n, m)[static_cast<std::size_t>(leading_order(spec_.kind, tau))];
    }

private:
    [[nodiscard]] bool in_ladder(int n) const noexcept { return n >= 0 && n < ladder_size(); }

    [[nodiscard]] static std::size_t packed(int n, int m) noexcept
    {
        const auto hi = static_cast<std::size_t>(std::max(n, m));
        const auto lo = static_cast<std::size_t>(std::min(n, m));
        return hi * (hi - 1) / 2 + lo;
    }

    OscillatorSpec spec_{};
    int n_max_ = 0;
    int order_ = 0;
    std::size_t degree_ = 0;
    std::vector<series> amplitudes_;
    std::vector<series> dc_;
    std::optional<std::vector<series>> levels_;
};

/// Fundamental amplitude from the quantized action: a^2(n,n-1) = n h / (m pi w).
inline double ladder_amplitude(const OscillatorSpec &spec, int n, double omega)
{
    if (n <= 0) {
        return 0.0; // no emission below the ground state
    }
    return std::sqrt(n * spec.planck_h / (spec.mass * std::numbers::pi * omega));
}

namespace detail
{

inline std::size_t quantum_degree(Kind kind, int order)
{
    return static_cast<std::size_t>(force_degree(kind) >= 2 && order >= 1 ? order + 1 : order);
}

inline void check_ladder(int n_max, int order)
{
    if (order < 0 || order > max_quantum_order) {
        throw invalid_spec("quantum order must be 0 or 1");
    }
    if (n_max < 1 || n_max < 3 * order + 1) {
        throw invalid_spec("n_max too small for the requested order (need n_max >= 3 order + 1)");
    }
}

/// Displacement matrix X with X(n,m) = a(n,m)/2 and X(n,n) = lambda a0(n).
inline OperatorMatrix displacement_matrix(const TransitionTable &t)
{
    const auto size = static_cast<std::size_t>(t.ladder_size());
    OperatorMatrix x(size, t.degree());
    for (int n = 0; n < t.ladder_size(); ++n) {
        x(static_cast<std::size_t>(n), static_cast<std::size_t>(n)) = t.dc(n).shifted_up(1);
        for (int m = 0; m < n; ++m) {
            const series a = t.amplitude(n, m);
            if (!a.is_zero()) {
                x.set_symmetric(static_cast<std::size_t>(n), static_cast<std::size_t>(m), a * 0.5);
            }
        }
    }
    return x;
}

/// Order-k correction of the fundamental frequency w(n,n-1) from the
/// equation of motion, given lambda X^p in `force` (coefficient k-1 is the
/// lambda^k term) and the squared-frequency series accumulated so far.
inline void fundamental_frequency_order(const OperatorMatrix &x, const OperatorMatrix &force, std::size_t n,
                                        std::size_t k, series &omega)
{
    const series &x_fund = x(n, n - 1);
    const double x0 = x_fund[0];
    check_divisor(x0, "fundamental amplitude vanishes");
    const series omega_sq = omega * omega;
    double acc = force(n, n - 1)[k - 1];
    for (std::size_t j = 1; j < k; ++j) {
        acc -= omega_sq[j] * x_fund[k - j];
    }
    const double omega_sq_k = acc / x0;
    double cross = 0.0;
    for (std::size_t j = 1; j < k; ++j) {
        cross += omega[j] * omega[k - j];
    }
    omega.coeff(k) = (omega_sq_k - cross) / (2.0 * omega[0]);
}

/// Ritz terms from the fundamental frequencies: term(n) = sum_{j<=n} w(j,j-1).
inline std::vector<series> ritz_terms(const std::vector<series> &fundamental)
{
    std::vector<series> terms(fundamental.size(), series(fundamental.front().degree()));
    for (std::size_t n = 1; n < fundamental.size(); ++n) {
        terms[n] = terms[n - 1] + fundamental[n];
    }
    return terms;
}

/// Fundamental frequencies implied by the equations of motion, through the solved order.
inline std::vector<series> dynamical_fundamentals(const OscillatorSpec &spec, const TransitionTable &t)
{
    const OperatorMatrix x = displacement_matrix(t);
    const std::size_t size = x.dim();
    std::vector<series> fund(size, series(t.degree(), spec.omega0));
    fund[0] = series(t.degree());
    const int p = force_degree(spec.effective_kind());
    if (p < 2 || t.order() < 1) {
        return fund;
    }
    const OperatorMatrix force = x.power(p);
    for (std::size_t k = 1; k <= static_cast<std::size_t>(t.order()); ++k) {
        for (std::size_t n = 1; n < size; ++n) {
            fundamental_frequency_order(x, force, n, k, fund[n]);
        }
    }
    return fund;
}

/// Energy matrix  -m V^2 / 2 + m w0^2 X^2 / 2 + m lambda X^(p+1) / (p+1).
inline OperatorMatrix energy_matrix(const OscillatorSpec &spec, const OperatorMatrix &x)
{
    const double m = spec.mass;
    const OperatorMatrix v = x.velocity();
    OperatorMatrix h = (v * v) * (-0.5 * m);
    h += (x * x) * (0.5 * m * spec.omega0 * spec.omega0);
    const int p = force_degree(spec.effective_kind());
    if (p >= 2) {
        h += x.power(p + 1).shifted_up(1) * (m / static_cast<double>(p + 1));
    }
    return h;
}

inline std::vector<series> level_terms(const TransitionTable &t)
{
    std::vector<series> terms;
    terms.reserve(static_cast<std::size_t>(t.ladder_size()));
    for (int n = 0; n < t.ladder_size(); ++n) {
        terms.push_back(t.level(n) * (1.0 / t.spec().hbar()));
    }
    return terms;
}

} // namespace detail

/// Order-0 ladder: a(n,n-1) = sqrt(n h / (m pi w0)), a(0,-1) = 0, nothing else.
inline TransitionTable base_amplitudes(const OscillatorSpec &spec, int n_max)
{
    spec.validate();
    if (n_max < 1) {
        throw invalid_spec("n_max must be at least 1");
    }
    TransitionTable t(spec, n_max, 0, 0);
    for (int n = 1; n < t.ladder_size(); ++n) {
        t.amplitude_ref(n, n - 1) = series{ladder_amplitude(spec, n, spec.omega0)};
    }
    return t;
}

/// pi m w0 [a^2(n+1,n) - a^2(n,n-1)] - h at order 0; zero on a quantized ladder.
inline double quantization_residual(const OscillatorSpec &spec, const TransitionTable &t, int n)
{
    if (n < 0 || n + 1 > t.n_max()) {
        throw invalid_spec("quantization residual needs 0 <= n and n + 1 <= n_max");
    }
    const double up = t.amplitude(n + 1, n)[0];
    const double down = t.amplitude(n, n - 1)[0];
    return std::numbers::pi * spec.mass * spec.omega0 * (up * up - down * down) - spec.planck_h;
}

/// Solves the quantum equations of motion
///   (w0^2 - w(n,m)^2) X(n,m) + lambda (X^p)(n,m) = 0
/// order by order. Diagonal entries give a0(n); the fundamental entries fix
/// the frequency corrections, and the quantization a^2(n,n-1) w(n,n-1) = n h / (m pi)
/// fixes the fundamental amplitude corrections; overtones follow from the
/// product terms. Levels are left empty (see energy_levels).
inline TransitionTable solve_quantum(const OscillatorSpec &spec, int n_max, int order)
{
    spec.validate();
    detail::check_ladder(n_max, order);
    const Kind kind = spec.effective_kind();
    spec.require_small(state_amplitude(spec, n_max), "solve_quantum");

    const std::size_t degree = detail::quantum_degree(kind, order);
    TransitionTable t(spec, n_max, order, degree);
    const auto size = static_cast<std::size_t>(t.ladder_size());
    OperatorMatrix x(size, degree);
    for (std::size_t n = 1; n < size; ++n) {
        x.set_symmetric(n, n - 1, series(degree, 0.5 * ladder_amplitude(spec, static_cast<int>(n), spec.omega0)));
    }

    const int p = force_degree(kind);
    const double w0sq = spec.omega0 * spec.omega0;
    std::vector<series> fund(size, series(degree, spec.omega0));
    fund[0] = series(degree);

    if (p >= 2 && order >= 1) {
        for (std::size_t k = 1; k <= degree; ++k) {
            const OperatorMatrix force = x.power(p);
            const auto ki = static_cast<int>(k);
            // diagonal: constant displacement
            if (ki <= order) {
                for (std::size_t n = 0; n < size; ++n) {
                    x(n, n).coeff(k) = -force(n, n)[k - 1] / w0sq;
                }
                for (std::size_t n = 1; n < size; ++n) {
                    detail::fundamental_frequency_order(x, force, n, k, fund[n]);
                    // a^2 w is lambda-independent; solve its order-k part for the amplitude
                    series amp = x(n, n - 1);
                    const series invariant = amp * amp * fund[n];
                    const double correction = -invariant[k] / (2.0 * amp[0] * fund[n][0]);
                    amp.coeff(k) = correction;
                    x.set_symmetric(n, n - 1, amp);
                }
            }
            const std::vector<series> terms = detail::ritz_terms(fund);
            for (std::size_t n = 2; n < size; ++n) {
                for (std::size_t m = 0; m + 1 < n; ++m) {
                    const int tau = static_cast<int>(n - m);
                    if (!(ki <= order || (ki == order + 1 && leading_order(kind, tau) == ki))) {
                        continue;
                    }
                    const series w = terms[n] - terms[m];
                    const series wsq = w * w;
                    series entry = x(n, m);
                    double rhs = -force(n, m)[k - 1];
                    for (std::size_t j = 1; j <= k; ++j) {
                        rhs += wsq[j] * entry[k - j];
                    }
                    const double divisor = w0sq - wsq[0];
                    detail::check_divisor(divisor, "resonant overtone divisor");
                    entry.coeff(k) = rhs / divisor;
                    x.set_symmetric(n, m, entry);
                }
            }
        }
    }

    for (int n = 0; n < t.ladder_size(); ++n) {
        const auto un = static_cast<std::size_t>(n);
        t.dc_ref(n) = x(un, un).shifted_down(1);
        for (int m = 0; m < n; ++m) {
            const series &e = x(un, static_cast<std::size_t>(m));
            if (!e.is_zero()) {
                t.amplitude_ref(n, m) = e * 2.0;
            }
        }
    }
    return t;
}

/// Fills W(n) with the diagonal of the energy matrix built from the
/// amplitudes and the dynamical frequencies, truncated to the solved order.
inline TransitionTable energy_levels(const OscillatorSpec &spec, TransitionTable t)
{
    OperatorMatrix x = detail::displacement_matrix(t);
    x.set_terms(detail::ritz_terms(detail::dynamical_fundamentals(spec, t)));
    const OperatorMatrix h = detail::energy_matrix(spec, x);
    std::vector<series> levels;
    levels.reserve(x.dim());
    for (std::size_t n = 0; n < x.dim(); ++n) {
        levels.push_back(h(n, n).with_degree(static_cast<std::size_t>(t.order())));
    }
    t.set_levels(std::move(levels));
    return t;
}

/// Solve followed by energy_levels.
inline TransitionTable solve_with_levels(const OscillatorSpec &spec, int n_max, int order)
{
    return energy_levels(spec, solve_quantum(spec, n_max, order));
}

struct SpectralLine
{
    int upper = 0;
    int lower = 0;
    double omega = 0.0;
    double amplitude = 0.0;
    double rel_intensity = 0.0; // a^2 normalized to the strongest line
    int amplitude_order = 0;    // lowest lambda power present in a(n,m)
    bool trusted = true;
};

/// Emission lines n -> m (n > m) with nonzero amplitude at the table's coupling.
/// Relative intensity is modelled as the squared amplitude.
inline std::vector<SpectralLine> line_spectrum(const TransitionTable &t)
{
    const double lambda = t.spec().lambda;
    std::vector<SpectralLine> lines;
    for (int n = 1; n <= t.n_max(); ++n) {
        for (int m = n - 1; m >= 0; --m) {
            const series a = t.amplitude(n, m);
            const double value = a(lambda);
            if (value == 0.0) {
                continue;
            }
            SpectralLine line;
            line.upper = n;
            line.lower = m;
            line.omega = t.frequency(n, m)(lambda);
            line.amplitude = value;
            line.rel_intensity = value * value;
            for (std::size_t k = 0; k <= a.degree(); ++k) {
                if (a[k] != 0.0) {
                    line.amplitude_order = static_cast<int>(k);
                    break;
                }
            }
            line.trusted = t.trusted(n) && t.trusted(m);
            lines.push_back(line);
        }
    }
    double strongest = 0.0;
    for (const auto &l : lines) {
        strongest = std::max(strongest, l.rel_intensity);
    }
    if (strongest > 0.0) {
        for (auto &l : lines) {
            l.rel_intensity /= strongest;
        }
    }
    return lines;
}

/// One equation-of-motion residual, in the amplitude convention: off-diagonal
/// entries are doubled so they read  (w0^2 - w^2) a + ...; diagonal entries
/// read  w0^2 a0 + ... at the given power of lambda.
struct ResidualEntry
{
    int n = 0;
    int m = 0;
    int order = 0;
    double value = 0.0;
    double scaled = 0.0; // dimensionless, natural units
};

struct QuantumResiduals
{
    std::vector<ResidualEntry> entries;

    /// Largest scaled residual among transitions with |n - m| in [tau_lo, tau_hi].
    [[nodiscard]] double max_scaled(int tau_lo = 0, int tau_hi = 1 << 20) const noexcept
    {
        double worst = 0.0;
        for (const auto &e : entries) {
            const int tau = std::abs(e.n - e.m);
            if (tau >= tau_lo && tau <= tau_hi) {
                worst = std::max(worst, std::abs(e.scaled));
            }
        }
        return worst;
    }

    [[nodiscard]] std::optional<ResidualEntry> find(int n, int m, int order) const
    {
        for (const auto &e : entries) {
            if (e.n == n && e.m == m && e.order == order) {
                return e;
            }
        }
        return std::nullopt;
    }
};

/// Residuals of the equations of motion on trusted entries and solved orders,
/// with frequencies taken from the level differences.
inline QuantumResiduals quantum_residuals(const OscillatorSpec &spec, const TransitionTable &t)
{
    OperatorMatrix x = detail::displacement_matrix(t);
    x.set_terms(detail::level_terms(t));
    const Kind kind = spec.effective_kind();
    const int p = force_degree(kind);
    const OperatorMatrix force = p >= 2 ? x.power(p).shifted_up(1) : OperatorMatrix(x.dim(), x.degree());
    const NaturalUnits units = NaturalUnits::of(spec);
    const double w0sq = spec.omega0 * spec.omega0;

    QuantumResiduals out;
    for (int n = 0; n <= t.trusted_max(); ++n) {
        for (int m = 0; m <= n; ++m) {
            const auto un = static_cast<std::size_t>(n);
            const auto um = static_cast<std::size_t>(m);
            const series w = x.frequency(un, um);
            series r = x(un, um) * w0sq - (w * w) * x(un, um);
            r += force(un, um);
            const int tau = n - m;
            const double convention = tau == 0 ? 1.0 : 2.0;
            for (std::size_t k = 0; k <= r.degree(); ++k) {
                const int ki = static_cast<int>(k);
                const bool solved = ki <= t.order() || (ki == t.order() + 1 && tau >= 2 && leading_order(kind, tau) == ki);
                if (!solved) {
                    continue;
                }
                ResidualEntry e;
                e.n = n;
                e.m = m;
                e.order = ki;
                e.value = convention * r[k];
                e.scaled = e.value * std::pow(units.coupling, static_cast<double>(k)) / units.acceleration;
                out.entries.push_back(e);
            }
        }
    }
    return out;
}

/// Largest off-diagonal entry of the energy matrix on trusted states through
/// the solved order, in units of hbar w0.
inline double offdiagonal_energy_check(const OscillatorSpec &spec, const TransitionTable &t)
{
    OperatorMatrix x = detail::displacement_matrix(t);
    if (t.has_levels()) {
        x.set_terms(detail::level_terms(t));
    } else {
        x.set_terms(detail::ritz_terms(detail::dynamical_fundamentals(spec, t)));
    }
    const OperatorMatrix h = detail::energy_matrix(spec, x);
    const NaturalUnits units = NaturalUnits::of(spec);
    double worst = 0.0;
    for (int n = 0; n <= t.trusted_max(); ++n) {
        for (int m = 0; m <= t.trusted_max(); ++m) {
            if (n == m) {
                continue;
            }
            const series &e = h(static_cast<std::size_t>(n), static_cast<std::size_t>(m));
            for (int k = 0; k <= t.order(); ++k) {
                worst = std::max(worst, std::abs(e[static_cast<std::size_t>(k)]) *
                                            std::pow(units.coupling, static_cast<double>(k)) / units.energy);
            }
        }
    }
    return worst;
}

/// Quantum-classical comparison for the lowest overtone (tau = 2 for the
/// quadratic force, 3 for the cubic force).
struct CorrespondenceReport
{
    int n = 0;
    int overtone = 0;
    bool defined = false;
    /// a(n,n-tau) / prod of the chained fundamentals a(n,n-1) a(n-1,n-2) ...
    double quantum_ratio = 0.0;
    /// a_tau / a1^tau from the classical series
    double classical_ratio = 0.0;
    /// a(n,n-1) / a1 with a1 chosen so that the action J = n h
    double fundamental_ratio = 0.0;
    /// a(n,n-tau) / a_tau(a1) with the same a1; tends to 1 as n grows
    double overtone_ratio = 0.0;
};

inline CorrespondenceReport correspondence_check(const OscillatorSpec &spec, const TransitionTable &t,
                                                 const FourierSeries &s, int n)
{
    if (n < 2) {
        throw invalid_spec("correspondence check needs n >= 2");
    }
    if (t.order() < 1 || s.max_order < 1) {
        throw invalid_spec("correspondence check needs both solutions at order 1");
    }
    CorrespondenceReport r;
    r.n = n;
    const Kind kind = spec.effective_kind();
    r.overtone = std::max(force_degree(kind), 2);
    const double a1_action = std::sqrt(n * spec.planck_h / (std::numbers::pi * spec.mass * spec.omega0));
    r.fundamental_ratio = t.amplitude(n, n - 1)[0] / a1_action;
    if (kind == Kind::Harmonic || n < r.overtone) {
        return r;
    }
    const int tau = r.overtone;
    const double overtone = t.amplitude(n, n - tau)[1];
    double chain = 1.0;
    for (int j = 0; j < tau; ++j) {
        chain *= t.amplitude(n - j, n - j - 1)[0];
    }
    const double classical = s.coeff(tau, 1);
    if (chain == 0.0 || overtone == 0.0 || classical == 0.0 || s.a1 == 0.0) {
        return r;
    }
    r.defined = true;
    r.quantum_ratio = overtone / chain;
    r.classical_ratio = classical / std::pow(s.a1, tau);
    r.overtone_ratio = overtone / (r.classical_ratio * std::pow(a1_action, tau));
    return r;
}

} // namespace matrixmech

#endif
