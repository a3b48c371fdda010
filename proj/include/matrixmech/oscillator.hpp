#ifndef MATRIXMECH_OSCILLATOR_HPP
#define MATRIXMECH_OSCILLATOR_HPP

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace matrixmech
{

/// Invalid physical parameters or a violated precondition.
class invalid_spec : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// The coupling is too large for a perturbative series to be meaningful.
class smallness_violation : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// A recursion hit a zero (or numerically vanishing) divisor.
class vanishing_divisor : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// Form of the nonlinear restoring term in  x'' + w0^2 x + lambda f(x) = 0.
enum class Kind
{
    Harmonic,       // f = 0
    QuadraticForce, // f = x^2, potential (1/3) m lambda x^3
    CubicForce,     // f = x^3, potential (1/4) m lambda x^4
};

inline std::string_view to_string(Kind k) noexcept
{
    switch (k) {
    case Kind::Harmonic:
        return "harmonic";
    case Kind::QuadraticForce:
        return "x2";
    case Kind::CubicForce:
        return "x3";
    }
    return "?";
}

inline std::optional<Kind> parse_kind(std::string_view s) noexcept
{
    if (s == "harmonic") {
        return Kind::Harmonic;
    }
    if (s == "x2" || s == "quadratic") {
        return Kind::QuadraticForce;
    }
    if (s == "x3" || s == "cubic") {
        return Kind::CubicForce;
    }
    return std::nullopt;
}

/// Power of x in the force term (1 for the harmonic case, where it is absent).
inline int force_degree(Kind k) noexcept
{
    switch (k) {
    case Kind::QuadraticForce:
        return 2;
    case Kind::CubicForce:
        return 3;
    default:
        return 1;
    }
}

/// Lowest power of lambda at which harmonic tau first appears, i.e.
/// ceil((tau - 1) / (p - 1)) for a force of degree p; the constant term
/// (tau = 0) first appears at order 1.
inline int leading_order(Kind k, int tau) noexcept
{
    const int p = force_degree(k);
    if (p < 2) {
        return tau == 1 ? 0 : 1 << 20;
    }
    if (tau == 1) {
        return 0;
    }
    if (tau == 0) {
        return 1;
    }
    return (tau - 1 + p - 2) / (p - 1);
}

struct OscillatorSpec
{
    double mass = 1.0;
    double omega0 = 1.0;
    double lambda = 0.0;
    double planck_h = 2.0 * std::numbers::pi;
    Kind kind = Kind::Harmonic;
    /// Upper bound on the dimensionless coupling accepted by series operations.
    double smallness_max = 0.1;

    [[nodiscard]] double hbar() const noexcept { return planck_h / (2.0 * std::numbers::pi); }

    /// A vanishing coupling reduces every kind to the harmonic problem.
    [[nodiscard]] Kind effective_kind() const noexcept { return lambda == 0.0 ? Kind::Harmonic : kind; }

    /// Throws invalid_spec when a field is out of range.
    void validate() const
    {
        auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
        if (!positive(mass)) {
            throw invalid_spec("mass must be positive and finite");
        }
        if (!positive(omega0)) {
            throw invalid_spec("omega0 must be positive and finite");
        }
        if (!positive(planck_h)) {
            throw invalid_spec("planck_h must be positive and finite");
        }
        if (!std::isfinite(lambda)) {
            throw invalid_spec("lambda must be finite");
        }
        if (kind == Kind::Harmonic && lambda != 0.0) {
            throw invalid_spec("a harmonic oscillator requires lambda = 0");
        }
        if (!positive(smallness_max)) {
            throw invalid_spec("smallness bound must be positive");
        }
    }

    /// Dimensionless coupling |lambda| x^(p-1) / omega0^2 at amplitude x.
    [[nodiscard]] double smallness_ratio(double amplitude) const noexcept
    {
        const int p = force_degree(effective_kind());
        if (p < 2) {
            return 0.0;
        }
        return std::abs(lambda) * std::pow(std::abs(amplitude), p - 1) / (omega0 * omega0);
    }

    void require_small(double amplitude, std::string_view what) const
    {
        const double r = smallness_ratio(amplitude);
        if (!(r < smallness_max)) {
            throw smallness_violation(std::string(what) + ": coupling ratio " + std::to_string(r) +
                                      " exceeds bound " + std::to_string(smallness_max));
        }
    }
};

/// Natural scales used to make residuals and identities dimensionless.
struct NaturalUnits
{
    double length;       // sqrt(hbar / (m w0))
    double energy;       // hbar w0
    double acceleration; // w0^2 * length
    double coupling;     // lambda that makes the smallness ratio 1 at one length unit

    static NaturalUnits of(const OscillatorSpec &spec) noexcept
    {
        NaturalUnits u{};
        u.length = std::sqrt(spec.hbar() / (spec.mass * spec.omega0));
        u.energy = spec.hbar() * spec.omega0;
        u.acceleration = spec.omega0 * spec.omega0 * u.length;
        const int p = force_degree(spec.kind);
        u.coupling = spec.omega0 * spec.omega0 / std::pow(u.length, std::max(p - 1, 1));
        return u;
    }
};

/// Amplitude scale of ladder state n: sqrt((2n+1) hbar / (m w0)).
inline double state_amplitude(const OscillatorSpec &spec, int n) noexcept
{
    return std::sqrt((2.0 * n + 1.0) * spec.hbar() / (spec.mass * spec.omega0));
}

} // namespace matrixmech

#endif
