"""Shared oracles for the test suite.

Everything here is deliberately independent of the package internals: power
series, bisection, high-precision arithmetic and finite differences only, so
the tests check the implementation against routes it does not share.
"""

import math

import numpy as np
import pytest


def series_sph_jn(n, x, terms=60):
    """Power series for j_n, valid for moderate |x|; independent oracle."""
    # j_n(x) = x^n sum_k (-x^2/2)^k / (k! (2n+2k+1)!!)
    total = 0.0
    term_pref = 1.0
    for k in range(terms):
        dfact = 1.0
        for j in range(2 * n + 2 * k + 1, 1, -2):
            dfact *= j
        total += term_pref / dfact
        term_pref *= (-x * x / 2.0) / (k + 1)
    return x**n * total


def series_riccati_psi_d(n, x, terms=60):
    """d/dx [x j_n(x)] by term-wise differentiation of the series."""
    total = 0.0
    term_pref = 1.0
    for k in range(terms):
        dfact = 1.0
        for j in range(2 * n + 2 * k + 1, 1, -2):
            dfact *= j
        total += term_pref * (n + 1 + 2 * k) / dfact
        term_pref *= (-x * x / 2.0) / (k + 1)
    return x**n * total


def bisect_root(f, lo, hi, iters=200):
    flo = f(lo)
    fhi = f(hi)
    assert flo * fhi < 0, "oracle bracket must straddle a sign change"
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fd_curl(field, x, step=1e-5):
    """Central-difference curl of a C^3-valued field at a point."""
    J = np.zeros((3, 3), dtype=complex)
    for i in range(3):
        e = np.zeros(3)
        e[i] = step
        J[:, i] = (field(x + e) - field(x - e)) / (2 * step)
    return np.array([J[2, 1] - J[1, 2], J[0, 2] - J[2, 0], J[1, 0] - J[0, 1]])


def fd_div(field, x, step=1e-5):
    total = 0.0 + 0.0j
    for i in range(3):
        e = np.zeros(3)
        e[i] = step
        total += (field(x + e)[i] - field(x - e)[i]) / (2 * step)
    return total


@pytest.fixture(scope="session")
def mp():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 50
    return mpmath


def mp_sph_jn(mpmath, n, z):
    z = mpmath.mpc(z)
    return mpmath.sqrt(mpmath.pi / (2 * z)) * mpmath.besselj(n + mpmath.mpf(1) / 2, z)


def mp_sph_h1n(mpmath, n, z):
    """Exact closed form: h1_n = (-i)^{n+1} e^{iz}/z sum_k c_nk (i/2z)^k.

    Finite sum, so no cancellation for large Im z (unlike j + i y).
    """
    z = mpmath.mpc(z)
    total = mpmath.mpc(1)
    term = mpmath.mpc(1)
    for k in range(1, n + 1):
        term *= mpmath.mpf((n + k) * (n - k + 1)) / k * (mpmath.mpc(0, 0.5) / z)
        total += term
    return (-1j) ** (n + 1) * mpmath.exp(1j * z) / z * total


def random_unit_vectors(rng, count):
    v = rng.standard_normal((count, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)
