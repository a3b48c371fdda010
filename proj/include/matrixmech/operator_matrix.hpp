#ifndef MATRIXMECH_OPERATOR_MATRIX_HPP
#define MATRIXMECH_OPERATOR_MATRIX_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "series.hpp"

namespace matrixmech
{

/// Square matrix of lambda-series over the ladder states 0..dim-1.
///
/// Entry (n, m) oscillates as exp(i w(n,m) t) with w(n,m) = term(n) - term(m),
/// so frequencies combine by the Ritz rule under the ordinary matrix product.
class OperatorMatrix
{
public:
    OperatorMatrix() = default;

    OperatorMatrix(std::size_t dim, std::size_t degree)
        : dim_(dim), degree_(degree), entries_(dim * dim, series(degree)), terms_(dim, series(degree))
    {
    }

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t degree() const noexcept { return degree_; }

    series &operator()(std::size_t n, std::size_t m) { return entries_[n * dim_ + m]; }
    const series &operator()(std::size_t n, std::size_t m) const { return entries_[n * dim_ + m]; }

    void set_symmetric(std::size_t n, std::size_t m, const series &value)
    {
        (*this)(n, m) = value.with_degree(degree_);
        (*this)(m, n) = value.with_degree(degree_);
    }

    /// Frequency terms w(n,m) = term(n) - term(m), in angular-frequency units.
    [[nodiscard]] const std::vector<series> &terms() const noexcept { return terms_; }

    void set_terms(std::vector<series> terms)
    {
        if (terms.size() != dim_) {
            throw std::invalid_argument("frequency term vector has the wrong size");
        }
        for (auto &t : terms) {
            t = t.with_degree(degree_);
        }
        terms_ = std::move(terms);
    }

    [[nodiscard]] series frequency(std::size_t n, std::size_t m) const { return terms_[n] - terms_[m]; }

    /// V with Xdot = i V, i.e. V(n,m) = w(n,m) X(n,m); antisymmetric when X is symmetric.
    [[nodiscard]] OperatorMatrix velocity() const
    {
        OperatorMatrix v(dim_, degree_);
        v.terms_ = terms_;
        for (std::size_t n = 0; n < dim_; ++n) {
            for (std::size_t m = 0; m < dim_; ++m) {
                if (n != m && !(*this)(n, m).is_zero()) {
                    v(n, m) = frequency(n, m) * (*this)(n, m);
                }
            }
        }
        return v;
    }

    [[nodiscard]] OperatorMatrix power(int p) const
    {
        if (p < 1) {
            throw std::invalid_argument("operator power must be at least 1");
        }
        OperatorMatrix r = *this;
        for (int i = 1; i < p; ++i) {
            r = r * *this;
        }
        return r;
    }

    OperatorMatrix &operator+=(const OperatorMatrix &o)
    {
        check_shape(o);
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            entries_[i] += o.entries_[i];
        }
        return *this;
    }

    OperatorMatrix &operator*=(double s)
    {
        for (auto &e : entries_) {
            e *= s;
        }
        return *this;
    }

    /// Every entry multiplied by lambda^shift.
    [[nodiscard]] OperatorMatrix shifted_up(std::size_t shift) const
    {
        OperatorMatrix r = *this;
        for (auto &e : r.entries_) {
            e = e.shifted_up(shift);
        }
        return r;
    }

    friend OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix &b) { return a += b; }
    friend OperatorMatrix operator*(OperatorMatrix a, double s) { return a *= s; }
    friend OperatorMatrix operator*(double s, OperatorMatrix a) { return a *= s; }

    friend OperatorMatrix operator*(const OperatorMatrix &a, const OperatorMatrix &b)
    {
        a.check_shape(b);
        OperatorMatrix r(a.dim_, a.degree_);
        r.terms_ = a.terms_;
        for (std::size_t n = 0; n < a.dim_; ++n) {
            for (std::size_t k = 0; k < a.dim_; ++k) {
                const series &x = a(n, k);
                if (x.is_zero()) {
                    continue;
                }
                for (std::size_t m = 0; m < a.dim_; ++m) {
                    const series &y = b(k, m);
                    if (!y.is_zero()) {
                        r(n, m).add_product(x, y);
                    }
                }
            }
        }
        return r;
    }

private:
    void check_shape(const OperatorMatrix &o) const
    {
        if (o.dim_ != dim_ || o.degree_ != degree_) {
            throw std::invalid_argument("operator matrices differ in dimension or degree");
        }
    }

    std::size_t dim_ = 0;
    std::size_t degree_ = 0;
    std::vector<series> entries_;
    std::vector<series> terms_;
};

} // namespace matrixmech

#endif
