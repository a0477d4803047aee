"""Independent high-precision oracles for the frozen regression values.

Run with ``python3 tests/oracles/derive_values.py``. The script uses only
mpmath and sympy, never the package under test, and prints every value that
the test-suite freezes. Re-running it must reproduce the constants recorded in
``tests/frozen.py``.
"""

from __future__ import annotations

import mpmath as mp
import sympy as sp

mp.mp.dps = 40


def matching_integral(w, B, beta):
    """Angle reached by the autonomous first integral at height ``w``."""
    s = -1 - mp.mpf(2) / beta
    k = mp.mpf(2) / (1 - s)

    def integrand(eta):
        return 1 / mp.sqrt(beta**2 * (B**2 - eta**2) + k * (B ** (1 - s) - eta ** (1 - s)))

    return mp.quad(integrand, [0, w])


def matched_amplitude(beta, target):
    return mp.findroot(lambda B: matching_integral(B, B, beta) - target, (mp.mpf("0.8"), mp.mpf("1.0")),
                       solver="illinois", tol=mp.mpf(10) ** -35)


def largest_root(f, lo, hi):
    return mp.findroot(f, (lo, hi), solver="illinois", tol=mp.mpf(10) ** -35)


def lower_barrier(beta, c1, c2):
    beta = mp.mpf(beta)
    s = -1 - 2 / beta
    sp_ = -1 - 3 / beta
    lam = 4 - beta**2
    if c1 > 0:
        f1 = lambda a: c1 - a ** (s + 1) * lam
        f2 = lambda a: c1 - a * lam * (a + 1) ** s
    else:
        f1 = lambda a: c2 - 2 * a ** (sp_ + 1) * lam
        f2 = lambda a: c2 - 2 * a * lam * (a + 1) ** sp_
    return min(largest_root(f1, mp.mpf("1e-3"), mp.mpf(5)), largest_root(f2, mp.mpf("1e-3"), mp.mpf(5)))


def upper_barrier(beta, sigma, c1, c2):
    beta = mp.mpf(beta)
    sigma = mp.mpf(sigma)
    s = -1 - 2 / beta
    sp_ = -1 - 3 / beta
    m = min(4 * sigma * (1 - sigma), 4 * sigma - beta**2)
    return largest_root(lambda b: b * m - c1 * b ** (-s) - c2 * b ** (-sp_), mp.mpf("0.5"), mp.mpf(3))


def fitted_mu():
    x, mu = sp.symbols("x mu", real=True)
    out = {}
    om = x / (1 + x**2)
    u = -sp.atan(x)
    res = sp.simplify(om + x * sp.diff(om, x) / (0 + 1) + 0 * u * sp.diff(om, x) - mu * om * sp.diff(u, x))
    out["clm"] = sp.solve(sp.numer(sp.together(res)), mu)
    b = sp.sqrt(sp.Rational(3, 8))
    om = -2 * b * x / (x**2 + b**2) ** 2
    u = x / (x**2 + b**2)
    res = sp.simplify(om + x * sp.diff(om, x) / 3 + sp.Rational(1, 2) * u * sp.diff(om, x) - mu * om * sp.diff(u, x))
    out["gclm_half"] = sp.solve(sp.numer(sp.together(res)), mu)
    return out


def main():
    beta = mp.mpf(-1) / 2
    print("phi_s(0.5; 1), beta=-1/2:", mp.nstr(matching_integral(mp.mpf("0.5"), 1, beta), 30))
    print("phi_s(1; 1),   beta=-1/2:", mp.nstr(matching_integral(1, 1, beta), 30))
    for B in (10, 100, 1000):
        print(f"phi_s(B; B), B={B}:", mp.nstr(matching_integral(B, B, beta), 20))
    print("B_s (beta=-1/2, target pi/4):", mp.nstr(matched_amplitude(beta, mp.pi / 4), 30))
    print("lower a (beta=-1/2, c1=1, c2=0):", mp.nstr(lower_barrier(-0.5, 1, 0), 30))
    print("lower a (beta=-1/2, c1=1, c2=1):", mp.nstr(lower_barrier(-0.5, 1, 1), 30))
    print("lower a (beta=-1/2, c1=0, c2=1):", mp.nstr(lower_barrier(-0.5, 0, 1), 30))
    print("upper b (beta=-1/2, sigma=1/4, c1=1, c2=0):", mp.nstr(upper_barrier(-0.5, 0.25, 1, 0), 30),
          "closed form", mp.nstr((mp.mpf(4) / 3) ** (mp.mpf(1) / 4), 30))
    print("upper b (beta=-1/2, sigma=1/4, c1=1, c2=1):", mp.nstr(upper_barrier(-0.5, 0.25, 1, 1), 30))
    print("endpoint integral s=2:", mp.nstr(mp.quad(lambda t: 1 / mp.sqrt(1 - t**2), [0, 1]), 30))
    print("endpoint integral s=3:", mp.nstr(mp.quad(lambda t: 1 / mp.sqrt(1 - t**3), [0, 1]), 30))
    print("fitted mu:", fitted_mu())


if __name__ == "__main__":
    main()
