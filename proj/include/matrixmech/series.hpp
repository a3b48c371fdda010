#ifndef MATRIXMECH_SERIES_HPP
#define MATRIXMECH_SERIES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace matrixmech
{

/// Truncated power series in the anharmonic coupling lambda.
///
/// A series of degree K stores the coefficients of lambda^0 .. lambda^K.
/// Products are truncated at the smaller of the two degrees, so every
/// quantity built from series of degree K stays exact through order K.
template <typename T>
class basic_series
{
public:
    using value_type = T;

    basic_series() : coeffs_(1, T(0)) {}

    explicit basic_series(std::size_t degree) : coeffs_(degree + 1, T(0)) {}

    basic_series(std::size_t degree, T constant) : coeffs_(degree + 1, T(0)) { coeffs_[0] = constant; }

    basic_series(std::initializer_list<T> coeffs) : coeffs_(coeffs)
    {
        if (coeffs_.empty()) {
            coeffs_.push_back(T(0));
        }
    }

    static basic_series from_coefficients(std::vector<T> coeffs)
    {
        basic_series s;
        if (!coeffs.empty()) {
            s.coeffs_ = std::move(coeffs);
        }
        return s;
    }

    [[nodiscard]] std::size_t degree() const noexcept { return coeffs_.size() - 1; }

    /// Coefficient of lambda^k; zero beyond the stored degree.
    [[nodiscard]] T operator[](std::size_t k) const noexcept { return k < coeffs_.size() ? coeffs_[k] : T(0); }

    T &coeff(std::size_t k)
    {
        if (k >= coeffs_.size()) {
            throw std::out_of_range("series coefficient index beyond degree");
        }
        return coeffs_[k];
    }

    [[nodiscard]] const std::vector<T> &coefficients() const noexcept { return coeffs_; }

    /// Horner evaluation at a concrete coupling.
    [[nodiscard]] T operator()(T lambda) const noexcept
    {
        T acc(0);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            acc = acc * lambda + *it;
        }
        return acc;
    }

    [[nodiscard]] bool is_zero() const noexcept
    {
        return std::all_of(coeffs_.begin(), coeffs_.end(), [](const T &c) { return c == T(0); });
    }

    /// Same coefficients, different truncation degree (pads with zeros or drops).
    [[nodiscard]] basic_series with_degree(std::size_t degree) const
    {
        basic_series r(degree);
        for (std::size_t k = 0; k <= degree && k < coeffs_.size(); ++k) {
            r.coeffs_[k] = coeffs_[k];
        }
        return r;
    }

    /// Multiplication by lambda^shift, keeping the degree.
    [[nodiscard]] basic_series shifted_up(std::size_t shift) const
    {
        basic_series r(degree());
        for (std::size_t k = 0; k + shift <= degree(); ++k) {
            r.coeffs_[k + shift] = coeffs_[k];
        }
        return r;
    }

    /// Division by lambda^shift; the dropped low coefficients must be zero.
    [[nodiscard]] basic_series shifted_down(std::size_t shift) const
    {
        basic_series r(degree());
        for (std::size_t k = shift; k <= degree(); ++k) {
            r.coeffs_[k - shift] = coeffs_[k];
        }
        return r;
    }

    basic_series &operator+=(const basic_series &o)
    {
        if (o.coeffs_.size() > coeffs_.size()) {
            coeffs_.resize(o.coeffs_.size(), T(0));
        }
        for (std::size_t k = 0; k < o.coeffs_.size(); ++k) {
            coeffs_[k] += o.coeffs_[k];
        }
        return *this;
    }

    basic_series &operator-=(const basic_series &o)
    {
        if (o.coeffs_.size() > coeffs_.size()) {
            coeffs_.resize(o.coeffs_.size(), T(0));
        }
        for (std::size_t k = 0; k < o.coeffs_.size(); ++k) {
            coeffs_[k] -= o.coeffs_[k];
        }
        return *this;
    }

    basic_series &operator*=(T s)
    {
        for (auto &c : coeffs_) {
            c *= s;
        }
        return *this;
    }

    /// Accumulates a*b truncated at this series' degree.
    void add_product(const basic_series &a, const basic_series &b)
    {
        const std::size_t deg = degree();
        for (std::size_t i = 0; i <= a.degree() && i <= deg; ++i) {
            if (a.coeffs_[i] == T(0)) {
                continue;
            }
            for (std::size_t j = 0; j <= b.degree() && i + j <= deg; ++j) {
                coeffs_[i + j] += a.coeffs_[i] * b.coeffs_[j];
            }
        }
    }

    friend basic_series operator+(basic_series a, const basic_series &b) { return a += b; }
    friend basic_series operator-(basic_series a, const basic_series &b) { return a -= b; }
    friend basic_series operator-(basic_series a)
    {
        a *= T(-1);
        return a;
    }
    friend basic_series operator*(basic_series a, T s) { return a *= s; }
    friend basic_series operator*(T s, basic_series a) { return a *= s; }

    friend basic_series operator*(const basic_series &a, const basic_series &b)
    {
        basic_series r(std::min(a.degree(), b.degree()));
        r.add_product(a, b);
        return r;
    }

    friend bool operator==(const basic_series &a, const basic_series &b)
    {
        const std::size_t n = std::max(a.coeffs_.size(), b.coeffs_.size());
        for (std::size_t k = 0; k < n; ++k) {
            if (a[k] != b[k]) {
                return false;
            }
        }
        return true;
    }

    friend std::ostream &operator<<(std::ostream &os, const basic_series &s)
    {
        os << '[';
        for (std::size_t k = 0; k < s.coeffs_.size(); ++k) {
            os << (k ? ", " : "") << s.coeffs_[k];
        }
        return os << ']';
    }

private:
    std::vector<T> coeffs_;
};

/// Square root of a series with positive constant term (positive branch).
template <typename T>
basic_series<T> sqrt(const basic_series<T> &s)
{
    if (!(s[0] > T(0))) {
        throw std::domain_error("series square root needs a positive constant term");
    }
    const std::size_t deg = s.degree();
    basic_series<T> r(deg);
    r.coeff(0) = std::sqrt(s[0]);
    for (std::size_t k = 1; k <= deg; ++k) {
        T acc = s[k];
        for (std::size_t j = 1; j < k; ++j) {
            acc -= r[j] * r[k - j];
        }
        r.coeff(k) = acc / (T(2) * r[0]);
    }
    return r;
}

/// Largest coefficient magnitude, optionally weighted by scale^k.
template <typename T>
T max_abs(const basic_series<T> &s, T scale = T(1))
{
    T m(0);
    T w(1);
    for (std::size_t k = 0; k <= s.degree(); ++k) {
        m = std::max(m, std::abs(s[k]) * w);
        w *= scale;
    }
    return m;
}

using series = basic_series<double>;

} // namespace matrixmech

#endif
