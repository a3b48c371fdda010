#ifndef MATRIXMECH_ORACLE_HPP
#define MATRIXMECH_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscillator.hpp"
#include "quantum_ladder.hpp"

namespace matrixmech
{

/// The symmetric eigensolver ran out of sweeps.
class eigensolver_failure : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Row-major dense square matrix.
class DenseMatrix
{
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    double &operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

    static DenseMatrix identity(std::size_t n)
    {
        DenseMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    friend DenseMatrix operator*(const DenseMatrix &a, const DenseMatrix &b)
    {
        DenseMatrix r(a.n_);
        for (std::size_t i = 0; i < a.n_; ++i) {
            for (std::size_t k = 0; k < a.n_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) {
                    continue;
                }
                for (std::size_t j = 0; j < a.n_; ++j) {
                    r(i, j) += aik * b(k, j);
                }
            }
        }
        return r;
    }

    [[nodiscard]] DenseMatrix transposed() const
    {
        DenseMatrix t(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                t(j, i) = (*this)(i, j);
            }
        }
        return t;
    }

    [[nodiscard]] DenseMatrix leading_block(std::size_t n) const
    {
        DenseMatrix r(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                r(i, j) = (*this)(i, j);
            }
        }
        return r;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

struct TruncatedHamiltonian
{
    OscillatorSpec spec;
    std::size_t dim = 0;
    DenseMatrix h;
    DenseMatrix x; // position in the same truncated number basis
};

namespace detail
{

/// Position and (a^dagger - a) in a number basis of size n, scaled so that
/// x = s (a + a^dagger) with s = sqrt(hbar / (2 m w0)).
inline DenseMatrix ladder_position(std::size_t n, double s)
{
    DenseMatrix x(n);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double v = s * std::sqrt(static_cast<double>(k + 1));
        x(k, k + 1) = v;
        x(k + 1, k) = v;
    }
    return x;
}

inline DenseMatrix ladder_antisymmetric(std::size_t n)
{
    DenseMatrix q(n);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double v = std::sqrt(static_cast<double>(k + 1));
        q(k + 1, k) = v;
        q(k, k + 1) = -v;
    }
    return q;
}

} // namespace detail

/// H = p^2/2m + m w0^2 x^2/2 + m lambda x^3/3  (or m lambda x^4/4) in the
/// harmonic number basis 0..N-1. Powers are formed in a basis padded by the
/// highest power so that every retained element is exact.
inline TruncatedHamiltonian build_hamiltonian(const OscillatorSpec &spec, std::size_t N)
{
    spec.validate();
    if (N < 8) {
        throw invalid_spec("oracle basis size must be at least 8");
    }
    const std::size_t pad = 4;
    const std::size_t big = N + pad;
    const double s = std::sqrt(spec.hbar() / (2.0 * spec.mass * spec.omega0));
    const DenseMatrix x = detail::ladder_position(big, s);
    const DenseMatrix q = detail::ladder_antisymmetric(big);
    const DenseMatrix x2 = x * x;
    const DenseMatrix q2 = q * q;
    // p = i sqrt(m hbar w0 / 2) (a^dagger - a), so p^2 = -(m hbar w0 / 2) q^2
    const double kinetic = -0.5 * spec.mass * spec.hbar() * spec.omega0 / 2.0 / spec.mass;
    const double harmonic = 0.5 * spec.mass * spec.omega0 * spec.omega0;

    DenseMatrix h(big);
    for (std::size_t i = 0; i < big; ++i) {
        for (std::size_t j = 0; j < big; ++j) {
            h(i, j) = kinetic * q2(i, j) + harmonic * x2(i, j);
        }
    }
    const int p = force_degree(spec.effective_kind());
    if (p >= 2) {
        DenseMatrix xp = x2;
        for (int i = 2; i < p + 1; ++i) {
            xp = xp * x;
        }
        const double c = spec.mass * spec.lambda / static_cast<double>(p + 1);
        for (std::size_t i = 0; i < big; ++i) {
            for (std::size_t j = 0; j < big; ++j) {
                h(i, j) += c * xp(i, j);
            }
        }
    }
    TruncatedHamiltonian th;
    th.spec = spec;
    th.dim = N;
    th.h = h.leading_block(N);
    th.x = x.leading_block(N);
    return th;
}

struct EigenOptions
{
    int max_sweeps = 100;
    double tolerance = 1e-15; // off-diagonal Frobenius norm relative to the full norm
};

struct EigenDecomposition
{
    std::vector<double> values; // ascending
    DenseMatrix vectors;        // column j is the eigenvector of values[j]
    int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a real symmetric matrix. The sweep
/// order is fixed, eigenvalues are sorted ascending (ties by index) and each
/// eigenvector's largest component is made positive, so the output is
/// deterministic.
inline EigenDecomposition jacobi_eigen(DenseMatrix a, const EigenOptions &opt = {})
{
    const std::size_t n = a.size();
    DenseMatrix v = DenseMatrix::identity(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            total += a(i, j) * a(i, j);
        }
    }
    const double scale = std::sqrt(total) > 0.0 ? std::sqrt(total) : 1.0;

    auto offdiag = [&]() {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                off += 2.0 * a(i, j) * a(i, j);
            }
        }
        return std::sqrt(off);
    };

    int sweep = 0;
    for (; sweep < opt.max_sweeps; ++sweep) {
        if (offdiag() <= opt.tolerance * scale) {
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }
    if (offdiag() > opt.tolerance * scale) {
        throw eigensolver_failure("Jacobi iteration did not converge within " + std::to_string(opt.max_sweeps) + " sweeps");
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    EigenDecomposition out;
    out.sweeps = sweep;
    out.values.resize(n);
    out.vectors = DenseMatrix(n);
    for (std::size_t col = 0; col < n; ++col) {
        const std::size_t src = idx[col];
        out.values[col] = a(src, src);
        std::size_t big = 0;
        for (std::size_t k = 1; k < n; ++k) {
            if (std::abs(v(k, src)) > std::abs(v(big, src)) * (1.0 + 1e-12)) {
                big = k;
            }
        }
        const double sign = v(big, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            out.vectors(k, col) = sign * v(k, src);
        }
    }
    return out;
}

struct OracleResult
{
    std::vector<double> eigenvalues;
    DenseMatrix eigenvectors;
    DenseMatrix x_elements; // |<E_i| x |E_j>|
    DenseMatrix x_signed;   // <E_i| x |E_j> with the eigenvector sign convention
    std::size_t N_used = 0;
    int n_track = 0;
    double convergence_delta = 0.0; // max |E_i(N) - E_i(2N)|, i <= n_track
    int sweeps = 0;
};

/// Full eigendecomposition plus position elements in the eigenbasis and the
/// N -> 2N convergence check on eigenvalues 0..n_track.
inline OracleResult diagonalize(const TruncatedHamiltonian &h, int n_track, const EigenOptions &opt = {})
{
    if (n_track < 0 || static_cast<std::size_t>(n_track) >= h.dim) {
        throw invalid_spec("tracked level index must lie inside the basis");
    }
    EigenDecomposition eig = jacobi_eigen(h.h, opt);
    OracleResult r;
    r.N_used = h.dim;
    r.n_track = n_track;
    r.sweeps = eig.sweeps;
    r.eigenvalues = eig.values;
    r.x_signed = eig.vectors.transposed() * (h.x * eig.vectors);
    r.x_elements = DenseMatrix(h.dim);
    for (std::size_t i = 0; i < h.dim; ++i) {
        for (std::size_t j = 0; j < h.dim; ++j) {
            r.x_elements(i, j) = std::abs(r.x_signed(i, j));
        }
    }
    r.eigenvectors = std::move(eig.vectors);

    const TruncatedHamiltonian doubled = build_hamiltonian(h.spec, 2 * h.dim);
    const EigenDecomposition big = jacobi_eigen(doubled.h, opt);
    for (int i = 0; i <= n_track; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        r.convergence_delta = std::max(r.convergence_delta, std::abs(r.eigenvalues[ui] - big.values[ui]));
    }
    return r;
}

/// Default basis size 4 (n_track + 1) + 32.
inline std::size_t default_oracle_dim(int n_track) { return static_cast<std::size_t>(4 * (n_track + 1) + 32); }

/// First-order energy shift <n| V_anh |n> in closed form.
inline double rs_first_order(const OscillatorSpec &spec, int n)
{
    spec.validate();
    if (n < 0) {
        throw invalid_spec("state index must be non-negative");
    }
    if (spec.effective_kind() != Kind::CubicForce) {
        return 0.0; // odd parity kills <n|x^3|n>
    }
    const double hb = spec.hbar();
    return 0.375 * spec.lambda * (n * n + n + 0.5) * hb * hb / (spec.mass * spec.omega0 * spec.omega0);
}

struct CompareOptions
{
    std::size_t basis = 0; // 0 selects default_oracle_dim
    int n_track = -1;      // -1 selects the table's trusted states
    /// Level tolerance: floor + level_factor r(n)^2 (n + 1/2) hbar w0, r(n)
    /// the smallness ratio at the amplitude of state n.
    double level_floor = 1e-10;
    double level_factor = 2.0;
    /// Relative amplitude tolerance: floor + amplitude_factor r(n)^2 for the
    /// fundamental, floor + amplitude_factor r(n) for the first overtone.
    double amplitude_floor = 1e-10;
    double amplitude_factor = 5.0;
    double exponent_target = 2.0;
    double exponent_window = 0.2;
    double convergence_tol = 1e-10;
    EigenOptions eigen{};
};

struct CompareRow
{
    double lambda = 0.0;
    int n = 0;
    double w_pert = 0.0;
    double e_oracle = 0.0;
    double level_diff = 0.0;
    double level_tol = 0.0;
    double amp_pert = 0.0;   // a(n,n-1) from the table (0 for n = 0)
    double amp_oracle = 0.0; // 2 |<E_{n-1}|x|E_n>|
    double amp_rel_diff = 0.0;
    double amp_tol = 0.0;
    int overtone = 0;
    double overtone_pert = 0.0;
    double overtone_oracle = 0.0;
    double overtone_rel_diff = 0.0;
    double overtone_tol = 0.0;
    bool pass = true;
};

struct CompareReport
{
    std::vector<CompareRow> rows;
    std::size_t basis = 0;
    int n_track = 0;
    double convergence_delta = 0.0;
    bool exponent_defined = false;
    double scaling_exponent = 0.0;
    double scaling_constant = 0.0; // C in residual ~ C lambda^exponent
    bool pass = true;
};

/// Least-squares slope and intercept of log(residual) against log(lambda).
inline std::pair<double, double> fit_power_law(std::span<const double> lambdas, std::span<const double> residuals)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const double x = std::log(std::abs(lambdas[i]));
        const double y = std::log(residuals[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    return {slope, std::exp(intercept)};
}

/// Compares the perturbative table with exact diagonalization at each coupling.
inline CompareReport compare(const TransitionTable &table, std::span<const double> lambdas, const CompareOptions &opt = {})
{
    if (!table.has_levels()) {
        throw std::logic_error("compare needs a table with levels");
    }
    CompareReport rep;
    rep.n_track = opt.n_track >= 0 ? std::min(opt.n_track, table.trusted_max()) : table.trusted_max();
    rep.basis = opt.basis > 0 ? opt.basis : default_oracle_dim(rep.n_track);
    const OscillatorSpec &base = table.spec();
    const int overtone = std::max(force_degree(base.kind), 2);

    std::vector<double> fit_lambda;
    std::vector<double> fit_residual;
    for (const double lambda : lambdas) {
        OscillatorSpec spec = base;
        spec.lambda = lambda;
        spec.require_small(state_amplitude(spec, rep.n_track), "oracle compare");
        const OracleResult res = diagonalize(build_hamiltonian(spec, rep.basis), rep.n_track, opt.eigen);
        rep.convergence_delta = std::max(rep.convergence_delta, res.convergence_delta);
        const double energy_unit = spec.hbar() * spec.omega0;
        double residual_sum = 0.0;
        for (int n = 0; n <= rep.n_track; ++n) {
            const auto un = static_cast<std::size_t>(n);
            CompareRow row;
            row.lambda = lambda;
            row.n = n;
            const double r = spec.smallness_ratio(state_amplitude(spec, n));
            row.w_pert = table.level(n)(lambda);
            row.e_oracle = res.eigenvalues[un];
            row.level_diff = std::abs(row.w_pert - row.e_oracle);
            row.level_tol = (opt.level_floor + opt.level_factor * r * r * (n + 0.5)) * energy_unit;
            residual_sum += row.level_diff;
            bool ok = row.level_diff <= row.level_tol;
            if (n >= 1) {
                row.amp_pert = table.amplitude(n, n - 1)(lambda);
                row.amp_oracle = 2.0 * res.x_elements(un - 1, un);
                row.amp_rel_diff = std::abs(row.amp_pert - row.amp_oracle) / std::abs(row.amp_pert);
                row.amp_tol = opt.amplitude_floor + opt.amplitude_factor * r * r;
                ok = ok && row.amp_rel_diff <= row.amp_tol;
            }
            if (n >= overtone && lambda != 0.0) {
                row.overtone = overtone;
                row.overtone_pert = table.amplitude(n, n - overtone)(lambda);
                row.overtone_oracle = 2.0 * res.x_elements(un - static_cast<std::size_t>(overtone), un);
                if (row.overtone_pert != 0.0) {
                    row.overtone_rel_diff = std::abs(std::abs(row.overtone_pert) - row.overtone_oracle) / std::abs(row.overtone_pert);
                    row.overtone_tol = opt.amplitude_floor + opt.amplitude_factor * r;
                    ok = ok && row.overtone_rel_diff <= row.overtone_tol;
                }
            }
            row.pass = ok;
            rep.pass = rep.pass && ok;
            rep.rows.push_back(row);
        }
        if (lambda != 0.0 && residual_sum > 0.0) {
            fit_lambda.push_back(lambda);
            fit_residual.push_back(residual_sum);
        }
    }
    if (fit_lambda.size() >= 2) {
        const auto [slope, constant] = fit_power_law(fit_lambda, fit_residual);
        rep.exponent_defined = true;
        rep.scaling_exponent = slope;
        rep.scaling_constant = constant;
        rep.pass = rep.pass && std::abs(slope - opt.exponent_target) <= opt.exponent_window;
    }
    rep.pass = rep.pass && rep.convergence_delta <= opt.convergence_tol;
    return rep;
}

} // namespace matrixmech

#endif
