"""Spherical Bessel, Hankel and Riccati-Bessel functions of complex argument.

Every radial factor in this package reduces to the functions below.  They are
implemented from scratch because the mode computations need complex arguments
(conducting layers make the wavenumber complex), which ``scipy.special``'s
spherical Bessel routines do not accept.

Conventions
-----------
* ``j_n`` spherical Bessel of the first kind, ``y_n`` of the second kind,
  ``h1_n = j_n + i y_n`` the outgoing spherical Hankel function.
* Riccati-Bessel functions: ``psi_n(z) = z j_n(z)``, ``chi_n(z) = -z y_n(z)``,
  ``xi_n(z) = z h1_n(z)``.
* All functions are scalar-in, scalar-out on complex ``z``; sequence helpers
  return ``numpy`` arrays over degrees ``0..nmax``.

Stability
---------
Upward recurrence is used where it is stable (``|z| >= n``, and always for
``y_n`` / ``h1_n``).  Below the turning point ``j_n`` switches to downward
(Miller) recurrence with renormalisation against the closed-form ``j_0``.
``log_derivative_ratio`` evaluates ``psi_n'/psi_n`` by a Lentz continued
fraction and never forms ``psi_n`` itself, so it survives arguments far into
the complex plane where the direct forms overflow.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import NumericalError

DEFAULT_MAX_DEGREE = 60
# e^{|Im z|} overflows IEEE doubles near 709; beyond this only ratio forms work.
IMAG_GUARD = 700.0

_RESCALE_THRESHOLD = 1e250


def _check_args(n: int, z: complex, max_degree: int) -> complex:
    if n < 0 or n != int(n):
        raise ValueError(f"degree must be a nonnegative integer, got {n!r}")
    if n > max_degree:
        raise ValueError(f"degree overflow: n={n} exceeds max_degree={max_degree}")
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"argument must be finite, got {z!r}")
    if abs(z.imag) > IMAG_GUARD:
        raise ValueError(
            f"argument overflow: |Im z|={abs(z.imag):g} > {IMAG_GUARD:g}; "
            "use log_derivative_ratio / ratio forms instead"
        )
    return z


def sph_bessel_j_sequence(nmax: int, z: complex,
                          max_degree: int = DEFAULT_MAX_DEGREE) -> np.ndarray:
    """j_0(z) .. j_nmax(z) as a complex array.

    Upward recurrence for ``|z| >= nmax``, otherwise downward Miller recurrence
    normalised by the closed form of whichever of ``j_0``, ``j_1`` is larger.
    """
    z = _check_args(nmax, z, max_degree)
    if z == 0:
        out = np.zeros(nmax + 1, dtype=complex)
        out[0] = 1.0
        return out

    j0 = cmath.sin(z) / z
    if nmax == 0:
        return np.array([j0])
    j1 = cmath.sin(z) / z**2 - cmath.cos(z) / z

    if abs(z) >= nmax:
        out = np.empty(nmax + 1, dtype=complex)
        out[0], out[1] = j0, j1
        for k in range(1, nmax):
            out[k + 1] = (2 * k + 1) / z * out[k] - out[k - 1]
        return out

    # Miller: seed two orders above the requested top and recurse down.
    start = nmax + _miller_offset(nmax)
    fk1 = 0.0 + 0.0j   # f_{start+1}
    fk = 1e-30 + 0.0j  # f_{start}
    vals = np.zeros(nmax + 1, dtype=complex)
    scale = 1.0
    for k in range(start, 0, -1):
        fk1, fk = fk, (2 * k + 1) / z * fk - fk1
        if abs(fk.real) > _RESCALE_THRESHOLD or abs(fk.imag) > _RESCALE_THRESHOLD:
            fk *= 1e-250
            fk1 *= 1e-250
            scale *= 1e-250
            vals *= 1e-250
        if k - 1 <= nmax:
            vals[k - 1] = fk
            if k <= nmax:
                vals[k] = fk1
    # normalise against the better-conditioned closed form
    if abs(j0) >= abs(j1):
        norm = j0 / vals[0]
    else:
        norm = j1 / vals[1]
    return vals * norm


def _miller_offset(n: int) -> int:
    # +20 alone leaves ~1e-12 contamination just below the turning point;
    # the sqrt term restores full double precision there.
    return 20 + int(math.ceil(1.5 * math.sqrt(n)))


def sph_bessel_y_sequence(nmax: int, z: complex,
                          max_degree: int = DEFAULT_MAX_DEGREE) -> np.ndarray:
    """y_0(z) .. y_nmax(z); upward recurrence (always stable for y)."""
    z = _check_args(nmax, z, max_degree)
    if z == 0:
        raise ValueError("y_n is singular at z = 0")
    out = np.empty(nmax + 1, dtype=complex)
    out[0] = -cmath.cos(z) / z
    if nmax == 0:
        return out
    out[1] = -cmath.cos(z) / z**2 - cmath.sin(z) / z
    for k in range(1, nmax):
        out[k + 1] = (2 * k + 1) / z * out[k] - out[k - 1]
    return out


def sph_hankel1_sequence(nmax: int, z: complex,
                         max_degree: int = DEFAULT_MAX_DEGREE) -> np.ndarray:
    """h1_0(z) .. h1_nmax(z), seeded from the exact e^{iz} closed forms.

    Equivalent to ``j + i y`` but free of the cancellation that sum suffers
    for Im z > 0, where h1 is exponentially small against j and y.
    """
    z = _check_args(nmax, z, max_degree)
    if z == 0:
        raise ValueError("h1_n is singular at z = 0")
    eiz = cmath.exp(1j * z)
    out = np.empty(nmax + 1, dtype=complex)
    out[0] = -1j * eiz / z
    if nmax == 0:
        return out
    out[1] = -eiz * (z + 1j) / z**2
    for k in range(1, nmax):
        out[k + 1] = (2 * k + 1) / z * out[k] - out[k - 1]
    return out


def sph_bessel_j(n: int, z: complex, max_degree: int = DEFAULT_MAX_DEGREE) -> complex:
    return complex(sph_bessel_j_sequence(n, z, max_degree)[n])


def sph_bessel_y(n: int, z: complex, max_degree: int = DEFAULT_MAX_DEGREE) -> complex:
    return complex(sph_bessel_y_sequence(n, z, max_degree)[n])


def sph_hankel1(n: int, z: complex, max_degree: int = DEFAULT_MAX_DEGREE) -> complex:
    return complex(sph_hankel1_sequence(n, z, max_degree)[n])


def _derivative_from_sequence(seq: np.ndarray, n: int, z: complex) -> complex:
    # f_n' = f_{n-1} - (n+1)/z f_n ; f_0' = -f_1
    if n == 0:
        return complex(-seq[1])
    return complex(seq[n - 1] - (n + 1) / z * seq[n])


def sph_bessel_j_d(n: int, z: complex, max_degree: int = DEFAULT_MAX_DEGREE) -> complex:
    """d/dz j_n(z)."""
    z = complex(z)
    if z == 0:
        return 1.0 / 3.0 if n == 1 else 0.0
    seq = sph_bessel_j_sequence(max(n, 1), z, max_degree)
    return _derivative_from_sequence(seq, n, z)


def sph_bessel_y_d(n: int, z: complex, max_degree: int = DEFAULT_MAX_DEGREE) -> complex:
    seq = sph_bessel_y_sequence(max(n, 1), z, max_degree)
    return _derivative_from_sequence(seq, n, complex(z))


def sph_hankel1_d(n: int, z: complex, max_degree: int = DEFAULT_MAX_DEGREE) -> complex:
    seq = sph_hankel1_sequence(max(n, 1), z, max_degree)
    return _derivative_from_sequence(seq, n, complex(z))


# ---------------------------------------------------------------------------
# Riccati-Bessel forms.  psi_n' uses psi_n'(z) = z j_{n-1}(z) - n j_n(z),
# which is exact and avoids differentiating through the product.
# ---------------------------------------------------------------------------

def riccati_psi(n: int, z: complex, max_degree: int = DEFAULT_MAX_DEGREE) -> complex:
    z = complex(z)
    if z == 0:
        return 0.0 + 0.0j
    return z * sph_bessel_j(n, z, max_degree)


def riccati_psi_d(n: int, z: complex, max_degree: int = DEFAULT_MAX_DEGREE) -> complex:
    z = complex(z)
    if z == 0:
        return 1.0 + 0.0j if n == 0 else 0.0 + 0.0j
    if n == 0:
        return cmath.cos(z)
    seq = sph_bessel_j_sequence(n, z, max_degree)
    return complex(z * seq[n - 1] - n * seq[n])


def riccati_chi(n: int, z: complex, max_degree: int = DEFAULT_MAX_DEGREE) -> complex:
    return -complex(z) * sph_bessel_y(n, z, max_degree)


def riccati_chi_d(n: int, z: complex, max_degree: int = DEFAULT_MAX_DEGREE) -> complex:
    z = complex(z)
    if n == 0:
        return cmath.sin(z)
    seq = sph_bessel_y_sequence(n, z, max_degree)
    return complex(-(z * seq[n - 1] - n * seq[n]))


def riccati_xi(n: int, z: complex, max_degree: int = DEFAULT_MAX_DEGREE) -> complex:
    return complex(z) * sph_hankel1(n, z, max_degree)


def riccati_xi_d(n: int, z: complex, max_degree: int = DEFAULT_MAX_DEGREE) -> complex:
    z = complex(z)
    if n == 0:
        return 1j * cmath.exp(1j * z)
    seq = sph_hankel1_sequence(n, z, max_degree)
    return complex(z * seq[n - 1] - n * seq[n])


# ---------------------------------------------------------------------------
# Ratio forms
# ---------------------------------------------------------------------------

def log_derivative_ratio(n: int, z: complex, max_iter: int = 200_000) -> complex:
    """psi_n'(z)/psi_n(z) by Lentz continued fraction.

    Never forms psi_n itself, so arbitrarily large |Im z| is fine (the guard
    on direct forms does not apply here).  This is the quantity that keeps
    layer matching finite inside strongly conducting shells.

    Raises
    ------
    NumericalError
        if the continued fraction has not converged after ``max_iter`` terms.
    """
    if n < 0 or n != int(n):
        raise ValueError(f"degree must be a nonnegative integer, got {n!r}")
    z = complex(z)
    if z == 0:
        raise ValueError("log derivative is singular at z = 0")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"argument must be finite, got {z!r}")

    # psi_n'/psi_n = (f - n)/z with f = (2n+1) - z^2/((2n+3) - z^2/(...)).
    tiny = 1e-280
    b0 = 2 * n + 1.0
    f = b0 if b0 != 0 else tiny
    c = f
    d = 0.0 + 0.0j
    a = -z * z
    for k in range(1, max_iter + 1):
        b = 2.0 * (n + k) + 1.0
        d = b + a * d
        if d == 0:
            d = tiny
        c = b + a / c
        if c == 0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-15:
            return (f - n) / z
    raise NumericalError(
        f"continued fraction for log derivative did not converge "
        f"(n={n}, z={z!r}, {max_iter} iterations)"
    )


def hankel_log_derivative(n: int, z: complex) -> complex:
    """xi_n'(z)/xi_n(z) by upward recurrence (stable: xi is dominant in n)."""
    if n < 0 or n != int(n):
        raise ValueError(f"degree must be a nonnegative integer, got {n!r}")
    z = complex(z)
    if z == 0:
        raise ValueError("log derivative is singular at z = 0")
    d = 1j  # xi_0'/xi_0 = i
    for k in range(1, n + 1):
        d = 1.0 / (k / z - d) - k / z
    return d


def _hankel_poly(n: int, z: complex) -> complex:
    # S(z) = sum_k (n+k)!/(k!(n-k)!) (i/(2z))^k ; h1_n = (-i)^{n+1} e^{iz} S / z exactly
    term = 1.0 + 0.0j
    total = 1.0 + 0.0j
    for k in range(1, n + 1):
        term *= (n + k) * (n - k + 1) / k * (0.5j / z)
        total += term
    return total


def riccati_cross_ratio(n: int, za: complex, zb: complex) -> complex:
    """[psi_n(za) xi_n(zb)] / [psi_n(zb) xi_n(za)], overflow safe.

    Within the guard this is formed directly.  Beyond it, psi is dominated by
    the incoming Hankel part (relative error ~ e^{-2|Im z|}) and the ratio
    reduces to exact finite polynomial sums times e^{2i(zb - za)}.
    """
    za, zb = complex(za), complex(zb)
    if max(abs(za.imag), abs(zb.imag)) <= 650.0:
        return (riccati_psi(n, za) * riccati_xi(n, zb)) / (
            riccati_psi(n, zb) * riccati_xi(n, za))
    if za.imag < 0 or zb.imag < 0:
        raise NumericalError(
            "cross ratio beyond the overflow guard requires Im z > 0")
    s1a, s1b = _hankel_poly(n, za), _hankel_poly(n, zb)
    s2a, s2b = _hankel_poly(n, -za), _hankel_poly(n, -zb)  # conjugate-form sum
    return cmath.exp(2j * (zb - za)) * (s2a * s1b) / (s2b * s1a)
