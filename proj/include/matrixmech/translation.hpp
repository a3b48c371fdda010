#ifndef MATRIXMECH_TRANSLATION_HPP
#define MATRIXMECH_TRANSLATION_HPP

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "quantum_ladder.hpp"

namespace matrixmech
{

/// Small exact rational used for translation weights.
struct Rational
{
    std::int64_t num = 0;
    std::int64_t den = 1;

    constexpr Rational() = default;
    constexpr Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) { normalize(); }

    constexpr void normalize()
    {
        if (den == 0) {
            throw std::domain_error("rational with zero denominator");
        }
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    [[nodiscard]] constexpr double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

    friend constexpr Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
    friend constexpr Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
    friend constexpr bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
    friend constexpr bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }
};

/// One amplitude in a translated product, with state labels as offsets from n.
/// A constant factor stands for a0(n + from) (from == to).
struct AmplitudeFactor
{
    int from = 0;
    int to = 0;
    bool constant = false;

    friend bool operator==(const AmplitudeFactor &, const AmplitudeFactor &) = default;
};

struct TranslatedTerm
{
    Rational coefficient;
    std::vector<AmplitudeFactor> factors;
};

/// A classical monomial coefficient * a_{p1} a_{p2} ...; label 0 is the constant a0.
struct ClassicalMonomial
{
    Rational coefficient{1};
    std::vector<int> labels;
};

/// Quantum counterpart of a classical product, attached to the transition n -> n - tau.
struct Translation
{
    int n = 0;
    int tau = 0;
    bool reachable = false;
    std::vector<TranslatedTerm> terms;

    /// Symbolic rendering in terms of n, e.g. "1/2*a(n,n-1)*a(n-1,n-3)".
    [[nodiscard]] std::string to_string() const
    {
        if (terms.empty()) {
            return "0";
        }
        std::ostringstream os;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const auto &t = terms[i];
            Rational c = t.coefficient;
            if (i > 0) {
                os << (c.num < 0 ? " - " : " + ");
                c.num = std::abs(c.num);
            } else if (c.num < 0) {
                os << '-';
                c.num = -c.num;
            }
            if (!(c.num == 1 && c.den == 1)) {
                os << c.num;
                if (c.den != 1) {
                    os << '/' << c.den;
                }
                os << '*';
            }
            for (std::size_t j = 0; j < t.factors.size(); ++j) {
                const auto &f = t.factors[j];
                if (j > 0) {
                    os << '*';
                }
                if (f.constant) {
                    os << "a0(" << label(f.from) << ')';
                } else {
                    os << "a(" << label(f.from) << ',' << label(f.to) << ')';
                }
            }
        }
        return os.str();
    }

    using canonical_factor = std::tuple<bool, int, int>;
    using canonical_term = std::pair<std::vector<canonical_factor>, Rational>;

    /// Terms with a(n,m) = a(m,n) identified, factors sorted, like terms merged.
    [[nodiscard]] std::vector<canonical_term> canonical() const
    {
        std::vector<canonical_term> out;
        for (const auto &t : terms) {
            std::vector<canonical_factor> fs;
            for (const auto &f : t.factors) {
                fs.emplace_back(f.constant, std::max(f.from, f.to), std::min(f.from, f.to));
            }
            std::sort(fs.begin(), fs.end());
            auto it = std::find_if(out.begin(), out.end(), [&](const canonical_term &c) { return c.first == fs; });
            if (it == out.end()) {
                out.emplace_back(std::move(fs), t.coefficient);
            } else {
                it->second = it->second + t.coefficient;
            }
        }
        std::erase_if(out, [](const canonical_term &c) { return c.second.num == 0; });
        std::sort(out.begin(), out.end(), [](const canonical_term &a, const canonical_term &b) { return a.first < b.first; });
        return out;
    }

private:
    static std::string label(int offset)
    {
        if (offset == 0) {
            return "n";
        }
        return offset > 0 ? "n+" + std::to_string(offset) : "n-" + std::to_string(-offset);
    }
};

namespace detail
{

inline std::int64_t factorial(int k)
{
    std::int64_t f = 1;
    for (int i = 2; i <= k; ++i) {
        f *= i;
    }
    return f;
}

/// Number of sign assignments to the nonzero labels whose signed sum is `target`.
inline std::int64_t count_signed_sums(const std::vector<int> &nonzero, int target)
{
    std::int64_t count = 0;
    const std::size_t m = nonzero.size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        int sum = 0;
        for (std::size_t i = 0; i < m; ++i) {
            sum += (mask >> i & 1U) ? -nonzero[i] : nonzero[i];
        }
        if (sum == target) {
            ++count;
        }
    }
    return count;
}

inline void merge_term(std::vector<TranslatedTerm> &terms, TranslatedTerm term)
{
    for (auto &t : terms) {
        if (t.factors == term.factors) {
            t.coefficient = t.coefficient + term.coefficient;
            return;
        }
    }
    terms.push_back(std::move(term));
}

} // namespace detail

/// Quantum translation of a classical product of Fourier coefficients
/// contributing to cos(tau w t), for the transition n -> n - tau.
///
/// Every ordering of the factors is a chain of single-quantum jumps through
/// intermediate states; each factor a_p jumps by +-p and a0 stays put.
/// Chains through negative states are dropped. The weights make the result
/// the average over chains, so that a classical product of equal amplitudes
/// maps to the same number; equivalently it is the (n, n-tau) entry of the
/// matching displacement-matrix product in the amplitude convention.
inline Translation translate_product(std::span<const int> labels, int n, int tau)
{
    if (labels.empty()) {
        throw invalid_spec("translate_product needs at least one factor");
    }
    if (tau < 0 || n < 0) {
        throw invalid_spec("translate_product needs n >= 0 and tau >= 0");
    }
    std::vector<int> sorted(labels.begin(), labels.end());
    if (std::any_of(sorted.begin(), sorted.end(), [](int p) { return p < 0; })) {
        throw invalid_spec("harmonic labels must be non-negative");
    }
    std::sort(sorted.begin(), sorted.end());

    Translation out;
    out.n = n;
    out.tau = tau;

    std::vector<int> nonzero;
    std::copy_if(sorted.begin(), sorted.end(), std::back_inserter(nonzero), [](int p) { return p != 0; });
    std::int64_t multinomial = detail::factorial(static_cast<int>(sorted.size()));
    for (auto it = sorted.begin(); it != sorted.end();) {
        auto next = std::upper_bound(it, sorted.end(), *it);
        multinomial /= detail::factorial(static_cast<int>(next - it));
        it = next;
    }
    const std::int64_t sign_count = tau == 0 ? detail::count_signed_sums(nonzero, 0)
                                             : detail::count_signed_sums(nonzero, tau) + detail::count_signed_sums(nonzero, -tau);
    if (sign_count == 0) {
        return out; // the classical product has no cos(tau w t) component
    }
    const Rational weight(tau == 0 ? 1 : 2, multinomial * sign_count);

    std::vector<int> order = sorted;
    do {
        std::vector<std::size_t> movable;
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (order[i] != 0) {
                movable.push_back(i);
            }
        }
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << movable.size()); ++mask) {
            std::vector<int> steps(order.size(), 0);
            for (std::size_t i = 0; i < movable.size(); ++i) {
                const int p = order[movable[i]];
                steps[movable[i]] = (mask >> i & 1U) ? p : -p;
            }
            TranslatedTerm term;
            term.coefficient = weight;
            int pos = 0;
            bool admissible = true;
            for (std::size_t i = 0; i < steps.size(); ++i) {
                const int next = pos + steps[i];
                if (n + next < 0) {
                    admissible = false;
                    break;
                }
                term.factors.push_back(AmplitudeFactor{pos, next, order[i] == 0});
                pos = next;
            }
            if (admissible && pos == -tau) {
                detail::merge_term(out.terms, std::move(term));
            }
        }
    } while (std::next_permutation(order.begin(), order.end()));

    out.reachable = !out.terms.empty();
    return out;
}

inline Translation translate_product(std::initializer_list<int> labels, int n, int tau)
{
    return translate_product(std::span<const int>(labels.begin(), labels.size()), n, tau);
}

/// Sum of translated monomials, each scaled by its classical coefficient.
inline Translation translate_polynomial(std::span<const ClassicalMonomial> monomials, int n, int tau)
{
    Translation out;
    out.n = n;
    out.tau = tau;
    for (const auto &mono : monomials) {
        Translation part = translate_product(mono.labels, n, tau);
        for (auto &t : part.terms) {
            t.coefficient = t.coefficient * mono.coefficient;
            detail::merge_term(out.terms, std::move(t));
        }
    }
    out.reachable = !out.terms.empty();
    return out;
}

/// Numeric value with user-supplied amplitude(from, to) and constant(state) lookups.
template <typename AmplitudeFn, typename ConstantFn>
double evaluate(const Translation &tr, AmplitudeFn &&amplitude, ConstantFn &&constant)
{
    double total = 0.0;
    for (const auto &t : tr.terms) {
        double prod = t.coefficient.value();
        for (const auto &f : t.factors) {
            prod *= f.constant ? constant(tr.n + f.from) : amplitude(tr.n + f.from, tr.n + f.to);
        }
        total += prod;
    }
    return total;
}

/// Evaluates with the leading lambda coefficients of a solved table, which
/// is what the classical labels a_tau and a0 denote.
inline double evaluate_leading(const Translation &tr, const TransitionTable &t)
{
    return evaluate(
        tr, [&t](int a, int b) { return t.leading_amplitude(a, b); }, [&t](int s) { return t.dc(s)[0]; });
}

} // namespace matrixmech

#endif
