// Quartic-potential oscillator from the classical series to exact diagonalization.
#include <cstdio>

#include <matrixmech/classical_series.hpp>
#include <matrixmech/oracle.hpp>
#include <matrixmech/quantum_ladder.hpp>
#include <matrixmech/translation.hpp>

using namespace matrixmech;

int main()
{
    OscillatorSpec spec;
    spec.kind = Kind::CubicForce;
    spec.lambda = 1e-3;

    const FourierSeries s = solve_classical(spec, 1.0, 1);
    std::printf("classical: a3 = %.6g lambda, w^2 = %.6g + %.6g lambda\n", s.coeff(3, 1), s.omega_squared[0],
                s.omega_squared[1]);
    const ClassicalEnergy e = classical_energy(spec, s);
    std::printf("classical energy: %.6g + %.6g lambda\n", e.constant[0], e.constant[1]);

    const TransitionTable t = solve_with_levels(spec, 8, 1);
    std::printf("\n n  W(n)          a(n,n-1)      w(n,n-1)\n");
    for (int n = 0; n <= t.trusted_max(); ++n) {
        const double a = n > 0 ? t.amplitude(n, n - 1)(spec.lambda) : 0.0;
        const double w = n > 0 ? t.frequency(n, n - 1)(spec.lambda) : 0.0;
        std::printf("%2d  %.10f  %.10f  %.10f\n", n, t.level(n)(spec.lambda), a, w);
    }
    std::printf("largest equation-of-motion residual: %.3g\n", quantum_residuals(spec, t).max_scaled());
    std::printf("largest off-diagonal energy entry:   %.3g\n", offdiagonal_energy_check(spec, t));

    const Translation tr = translate_product({1, 1, 1}, 3, 3);
    std::printf("\na1^3 at n -> n-3 becomes %s\n", tr.to_string().c_str());

    const double lambdas[] = {5e-4, 1e-3, 2e-3};
    const CompareReport rep = compare(t, lambdas);
    std::printf("\noracle basis %zu, level residual ~ %.3g lambda^%.3f\n", rep.basis, rep.scaling_constant,
                rep.scaling_exponent);
    return rep.pass ? 0 : 1;
}
