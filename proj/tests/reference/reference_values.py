"""High-precision reference values frozen into the C++ test suites.

Run with `python3 tests/reference/reference_values.py`. Everything here is
computed with mpmath at 50 digits, independently of the C++ code paths.
"""
import mpmath as mp

mp.mp.dps = 50

PUMP_T = [94.32, 15.72, 62.88, 125.76, 5.24, 31.44, 1.048, 1.048, 2.096, 10.48]
PUMP_Y = [5, 1, 5, 14, 3, 19, 1, 1, 4, 22]


def show(name, v):
    print(f"{name:45s} {mp.nstr(v, 20)}")


def negbin(y, size, p):
    return mp.gamma(y + size) / (mp.gamma(size) * mp.factorial(y)) * p**size * (1 - p)**y


def gamma_mgf_deriv(a, b, k, t):
    return mp.gamma(a + k) / mp.gamma(a) * b**a / (b - t)**(a + k)


def main():
    show("lgamma(4.5)", mp.loggamma(4.5))
    show("lgamma(0.5)", mp.loggamma(0.5))
    show("E_1(1)", mp.expint(1, 1))
    show("log Gamma(-73.5, 350.032)", mp.log(mp.gammainc(-73.5, 350.032)))
    show("log Gamma(80, 0.1)", mp.log(mp.gammainc(80, 0.1)))
    show("log Gamma(2.5, 3)", mp.log(mp.gammainc(2.5, 3)))
    show("log E_{6}(3.50032)", mp.log(mp.expint(6, mp.mpf('3.50032'))))
    show("log E_{-3.3}(0.7)", mp.log(mp.expint(-3.3, 0.7)))
    show("log_poisson_pmf(2, 1.5)", 2 * mp.log(1.5) - 1.5 - mp.loggamma(3))
    show("log_negbin_pmf(3, 6, 5/6)", mp.log(negbin(3, 6, mp.mpf(5) / 6)))

    # Example 1-3
    show("ex1", negbin(0, 4, mp.mpf(5) / 6))
    show("ex2", mp.fprod(negbin(y, 6, mp.mpf(5) / 6) for y in range(4)))
    y3 = [0, 0, 1, 2]
    show("ex3", gamma_mgf_deriv(4, 6, 3, -4) / mp.fprod(mp.factorial(v) for v in y3))
    show("gamma(4,6) k=3 t=-4", gamma_mgf_deriv(4, 6, 3, -4))
    show("GammaPrior(2,3) y=(1,4)", negbin(1, 2, mp.mpf(3) / 4) * negbin(4, 2, mp.mpf(3) / 4))

    # Example 4: brute-force symbolic mixed partial via mpmath diff.
    A = [[0.1, 0, 0], [0.9, 0.1, 0], [0, 0.1, 0], [0, 0.8, 0.1], [0, 0, 0.9]]
    A = [[mp.mpf(str(v)) for v in row] for row in A]
    a, b = mp.mpf('4.5'), mp.mpf(2)
    y4 = [0, 1, 0, 2, 3]

    def joint(*t):
        out = mp.mpf(1)
        for i in range(3):
            u = sum(t[j] * A[j][i] for j in range(5))
            out *= (b / (b - u))**a
        return out

    d = mp.diff(joint, [-1] * 5, tuple(y4))
    show("ex4", d / mp.fprod(mp.factorial(v) for v in y4))

    # Example 5
    al, be = mp.mpf('1.27'), mp.mpf('0.82')
    p5 = mp.fprod(negbin(y, al, be / (be + t)) for y, t in zip(PUMP_Y, PUMP_T))
    show("ex5", p5)
    show("log ex5", mp.log(p5))

    # Example 6
    pref = mp.fprod(mp.mpf(str(t))**y / mp.factorial(y) for y, t in zip(PUMP_Y, PUMP_T))
    show("ex6 prefactor", pref)
    show("log ex6 prefactor", mp.log(pref))
    st = mp.fsum(mp.mpf(str(t)) for t in PUMP_T)
    show("sum t", st)
    al6, k6 = mp.mpf(80), mp.mpf('0.01')
    full = pref * al6 * k6**75 * mp.expint(al6 - 74, k6 * st)
    show("ex6 full (80, 0.01)", full)
    show("log ex6 full", mp.log(full))
    quad = pref * mp.quad(lambda l: l**75 * mp.e**(-l * st) * al6 * k6**al6 * l**(-al6 - 1), [k6, k6 * 1.01, k6 * 1.1, k6 * 1.5, k6 * 3, k6 * 10, mp.inf])
    show("log ex6 full via quad", mp.log(quad))

    # Example 7-9 (compound gamma)
    def compound(y, gam, nu, alpha, zeta):
        n = len(y)
        return (mp.gamma(n * alpha + gam) / (mp.gamma(alpha)**n * mp.gamma(gam)) * nu**gam
                / (nu + mp.fsum(z * v for z, v in zip(zeta, y)))**(n * alpha + gam)
                * mp.fprod(v**(alpha - 1) * z**alpha for z, v in zip(zeta, y)))

    show("ex7", compound([mp.mpf('3.4')], 1, 1, 1, [1]))
    lam = mp.mpf('0.9')
    e8 = compound([mp.mpf('0.4')], 1, lam, mp.mpf('1.5'), [1]) * compound([mp.mpf('2.2')], 1, lam, 2, [1])
    show("ex8", e8)
    y9 = [mp.mpf('2.7'), mp.mpf('3.3'), mp.mpf('3.6')]
    show("ex9", compound(y9, 1, mp.mpf('1.1'), mp.mpf('0.5'), [1, 1, 1]))
    show("ex9 with (0.7,2.3,3.6)", compound([mp.mpf('0.7'), mp.mpf('2.3'), mp.mpf('3.6')], 1, mp.mpf('1.1'), mp.mpf('0.5'), [1, 1, 1]))
    show("exp(1) alpha 0.7 y 1", compound([1], 1, 1, mp.mpf('0.7'), [1]))
    show("0.7/2^1.7", mp.mpf('0.7') / mp.mpf(2)**mp.mpf('1.7'))


    # mgf derivatives (integer and RL fractional orders)
    show("Exp(1.3) D^1.5 at -0.8", mp.gamma(2.5) * mp.mpf('1.3') / mp.mpf('2.1')**mp.mpf('2.5'))
    show("Gamma(4,5) D^0.5 at -1", mp.gamma(mp.mpf('4.5')) / mp.gamma(4) * 5**4 / 6**mp.mpf('4.5'))
    show("Gamma(2.5,3) D^2.7 at -1", mp.gamma(mp.mpf('5.2')) / mp.gamma(mp.mpf('2.5')) * 3**mp.mpf('2.5') / 4**mp.mpf('5.2'))
    show("log Pareto(80,0.01) D^75 at -350.032",
         mp.log(80 * mp.mpf('0.01')**75 * mp.expint(6, mp.mpf('3.50032'))))
    show("Pareto(5,0.5) D^2 at -1", 5 * mp.mpf('0.5')**2 * mp.expint(4, mp.mpf('0.5')))
    show("Pareto(5,0.5) M(0) moments k=2", 5 * mp.mpf('0.5')**2 / 3)
    show("PointMass(2) D^3 at -1", 8 * mp.e**-2)
    # RL derivative straight from its definition, Exp(1) order 0.5 at t=-1:
    # (1/Gamma(1/2)) d/dt int_{-inf}^t (t-s)^{-1/2} M(s) ds. With s = t - u^2
    # the integral is int_0^inf 2 M(t - u^2) du, differentiated under the sign
    # so the quadrature never meets the endpoint singularity.
    dM = lambda s: 1 / (1 - s)**2
    show("RL Exp(1) D^0.5 at -1", mp.quad(lambda u: 2 * dM(-1 - u**2), [0, 1, mp.inf]) / mp.gamma(0.5))

    # Binomial central 95% interval
    p0 = mp.mpf('0.005745693')
    n = 10**6
    from scipy.stats import binom
    print("binom interval", binom.ppf(0.025, n, float(p0)), binom.ppf(0.975, n, float(p0)))


if __name__ == "__main__":
    main()
