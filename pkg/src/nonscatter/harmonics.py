"""Vector spherical harmonics, vector wave functions and quadrature on S^2.

For a rotationally invariant scatterer every operator in this package is
diagonal in the basis built here, so the conventions below fix all constants
used anywhere else:

* ``Y_nm`` orthonormal complex spherical harmonics with Condon-Shortley phase;
  ``Y_{n,-m} = (-1)^m conj(Y_{nm})``.
* ``U_nm = grad_S2 Y_nm / sqrt(n(n+1))`` (tangential, unit L^2 norm),
  ``V_nm = U_nm x rhat``.  The pair ``{U_nm, V_nm}`` is an orthonormal basis
  of tangential L^2 fields.
* Vector wave functions for radial kind ``z_n`` (``j_n`` regular, ``h1_n``
  outgoing); ``Z_n`` is the matching Riccati function (``psi`` or ``xi``)::

      M_nm(k; x) = z_n(kr) V_nm(xhat)
      N_nm(k; x) = sqrt(n(n+1)) (z_n(kr)/(kr)) Y_nm(xhat) xhat
                   + (Z_n'(kr)/(kr)) U_nm(xhat)

  with curl M = k N and curl N = k M, both divergence free.

Polarisation naming: a "TE" mode has electric field of M type (no radial
component), a "TM" mode has electric field of N type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun

POLS = ("TE", "TM")
DEFAULT_NMAX = 20


def pol_index(pol: str) -> int:
    try:
        return POLS.index(pol)
    except ValueError:
        raise ValueError(f"polarization must be one of {POLS}, got {pol!r}") from None


@dataclass(frozen=True)
class Mode:
    """One vector-spherical-harmonic channel: degree, order, polarization."""

    n: int
    m: int
    pol: str

    def __post_init__(self):
        if self.n < 1 or self.n != int(self.n):
            raise ValueError(f"mode degree must be an integer >= 1, got {self.n!r}")
        if abs(self.m) > self.n or self.m != int(self.m):
            raise ValueError(f"mode order must be an integer with |m| <= n, got {self.m!r}")
        if self.pol not in POLS:
            raise ValueError(f"polarization must be one of {POLS}, got {self.pol!r}")


@dataclass(frozen=True)
class Direction:
    """Unit vector on S^2 with both angular and Cartesian accessors."""

    theta: float
    phi: float

    @classmethod
    def from_vector(cls, v) -> "Direction":
        v = np.asarray(v, dtype=float)
        r = float(np.linalg.norm(v))
        if not math.isfinite(r) or r == 0.0:
            raise ValueError(f"cannot normalise direction vector {v!r}")
        return cls(theta=float(np.arccos(np.clip(v[2] / r, -1.0, 1.0))),
                   phi=float(np.arctan2(v[1], v[0])))

    @property
    def unit(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi),
                         math.cos(self.theta)])


# ---------------------------------------------------------------------------
# Flat mode indexing: degrees 1..nmax, orders -n..n, per polarization.
# ---------------------------------------------------------------------------

def mode_count(nmax: int) -> int:
    """Number of (n, m) pairs with 1 <= n <= nmax: nmax (nmax + 2)."""
    return nmax * (nmax + 2)


def mode_index(n: int, m: int) -> int:
    """Flat position of (n, m); pairs ordered by n, then m ascending."""
    return n * n - 1 + (m + n)


def mode_pairs(nmax: int) -> list[tuple[int, int]]:
    return [(n, m) for n in range(1, nmax + 1) for m in range(-n, n + 1)]


def degree_of_index(nmax: int) -> np.ndarray:
    """Array mapping flat index -> degree n."""
    out = np.empty(mode_count(nmax), dtype=int)
    for n in range(1, nmax + 1):
        out[n * n - 1: n * n - 1 + 2 * n + 1] = n
    return out


class SpectralField:
    """Truncated VSH coefficient vector with a role tag.

    ``coeffs`` has shape (2, mode_count(nmax)); axis 0 is polarization
    (0=TE, 1=TM).  The meaning of a coefficient depends on ``role``:

    ============  ========================================================
    role          slot (n, m, TE) / (n, m, TM) multiplies
    ============  ========================================================
    "density"     V_nm(d) / U_nm(d)            (tangential kernel on S^2)
    "interior"    regular M_nm(kappa; x) / N_nm(kappa; x)
    "scattered"   outgoing M_nm(kappa; x) / N_nm(kappa; x)
    "farfield"    V_nm(xhat) / U_nm(xhat)      (far-field pattern on S^2)
    ============  ========================================================
    """

    ROLES = ("density", "interior", "scattered", "farfield")

    __slots__ = ("nmax", "role", "kappa", "coeffs")

    def __init__(self, nmax: int, role: str, kappa: complex,
                 coeffs: np.ndarray | None = None):
        if role not in self.ROLES:
            raise ValueError(f"role must be one of {self.ROLES}, got {role!r}")
        if nmax < 1:
            raise ValueError("nmax must be >= 1")
        self.nmax = int(nmax)
        self.role = role
        self.kappa = complex(kappa)
        if coeffs is None:
            coeffs = np.zeros((2, mode_count(nmax)), dtype=complex)
        else:
            coeffs = np.asarray(coeffs, dtype=complex)
            if coeffs.shape != (2, mode_count(nmax)):
                raise ValueError(f"coefficient array has shape {coeffs.shape}, "
                                 f"expected {(2, mode_count(nmax))}")
            if not np.all(np.isfinite(coeffs)):
                raise ValueError("coefficients must be finite")
        self.coeffs = coeffs

    def copy(self) -> "SpectralField":
        return SpectralField(self.nmax, self.role, self.kappa, self.coeffs.copy())

    def get(self, n: int, m: int, pol: str) -> complex:
        return complex(self.coeffs[pol_index(pol), mode_index(n, m)])

    def set(self, n: int, m: int, pol: str, value: complex) -> None:
        Mode(n, m, pol)  # validate
        if n > self.nmax:
            raise ValueError(f"degree {n} exceeds truncation {self.nmax}")
        self.coeffs[pol_index(pol), mode_index(n, m)] = value

    def active_modes(self, tol: float = 0.0):
        """Yield (Mode, coefficient) for every coefficient with |c| > tol."""
        for p, pol in enumerate(POLS):
            for (n, m) in mode_pairs(self.nmax):
                c = self.coeffs[p, mode_index(n, m)]
                if abs(c) > tol:
                    yield Mode(n, m, pol), complex(c)

    def norm(self) -> float:
        """Euclidean norm of the coefficient vector."""
        return float(np.linalg.norm(self.coeffs))

    def __add__(self, other: "SpectralField") -> "SpectralField":
        if (other.nmax, other.role) != (self.nmax, self.role):
            raise ValueError("can only add fields with identical truncation and role")
        return SpectralField(self.nmax, self.role, self.kappa,
                             self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        if (other.nmax, other.role) != (self.nmax, self.role):
            raise ValueError("can only subtract fields with identical truncation and role")
        return SpectralField(self.nmax, self.role, self.kappa,
                             self.coeffs - other.coeffs)

    def scaled(self, factor: complex) -> "SpectralField":
        return SpectralField(self.nmax, self.role, self.kappa, self.coeffs * factor)


# ---------------------------------------------------------------------------
# Normalised associated Legendre machinery, pole safe.
#
# For m >= 1 the recurrences run on w_n^m := Ptilde_n^m / sin(theta), from
# which Ptilde, pi_nm = m Ptilde/sin(theta) and tau_nm = d Ptilde/d theta all
# follow without ever dividing by sin(theta).
# ---------------------------------------------------------------------------

def _legendre_tables(nmax: int, x: np.ndarray, s: np.ndarray):
    """Return (P, PI, TAU), each of shape (nmax+1, nmax+1, npts), index [n, m].

    P = normalised associated Legendre Ptilde_n^m(x) (Condon-Shortley),
    PI = m Ptilde / s, TAU = d Ptilde / d theta; entries with m > n are zero.
    """
    npts = x.shape[0]
    P = np.zeros((nmax + 1, nmax + 1, npts))
    PI = np.zeros_like(P)
    TAU = np.zeros_like(P)

    # m = 0 column
    P[0, 0] = 1.0 / math.sqrt(4.0 * math.pi)
    if nmax >= 1:
        P[1, 0] = math.sqrt(3.0 / (4.0 * math.pi)) * x
    for n in range(2, nmax + 1):
        a = math.sqrt((4.0 * n * n - 1.0) / (n * n))
        b = math.sqrt(((n - 1.0) ** 2) / (4.0 * (n - 1.0) ** 2 - 1.0))
        P[n, 0] = a * (x * P[n - 1, 0] - b * P[n - 2, 0])

    # m >= 1 columns via w = Ptilde / s
    w_prev_m: np.ndarray | None = None
    c_mm = -math.sqrt(3.0 / (8.0 * math.pi))  # coefficient of s^{m-1} at n=m=1
    for m in range(1, nmax + 1):
        w = np.zeros((nmax + 1, npts))
        w[m] = c_mm * s ** (m - 1)
        for n in range(m + 1, nmax + 1):
            a = math.sqrt((4.0 * n * n - 1.0) / (n * n - m * m))
            b2 = (n - 1.0) ** 2 - m * m
            b = math.sqrt(b2 / (4.0 * (n - 1.0) ** 2 - 1.0)) if b2 > 0 else 0.0
            w[n] = a * (x * w[n - 1] - b * w[n - 2]) if n - 2 >= m else a * x * w[n - 1]
        for n in range(m, nmax + 1):
            P[n, m] = s * w[n]
            PI[n, m] = m * w[n]
            A = math.sqrt((2.0 * n + 1.0) * (n * n - m * m) / (2.0 * n - 1.0))
            TAU[n, m] = n * x * w[n] - (A * w[n - 1] if n - 1 >= m else 0.0)
        if m == 1:
            w_prev_m = w
        c_mm = -c_mm * math.sqrt((2.0 * m + 3.0) / (2.0 * m + 2.0))

    # tau for m = 0: d Ptilde_n^0 / d theta = sqrt(n(n+1)) Ptilde_n^1
    if nmax >= 1 and w_prev_m is not None:
        for n in range(1, nmax + 1):
            TAU[n, 0] = math.sqrt(n * (n + 1.0)) * s * w_prev_m[n]
    return P, PI, TAU


def _unit_vectors(theta: np.ndarray, phi: np.ndarray):
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    rhat = np.stack([st * cp, st * sp, ct], axis=-1)
    that = np.stack([ct * cp, ct * sp, -st], axis=-1)
    phat = np.stack([-sp, cp, np.zeros_like(phi)], axis=-1)
    return rhat, that, phat


def sph_harm_y(n: int, m: int, theta, phi):
    """Orthonormal scalar spherical harmonic Y_nm (Condon-Shortley phase)."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    P, _, _ = _legendre_tables(n, np.cos(theta), np.sin(theta))
    ma = abs(m)
    val = P[n, ma] * np.exp(1j * ma * phi)
    if m < 0:
        val = (-1.0) ** ma * np.conj(val)
    return val


def vsh_table(nmax: int, theta, phi):
    """All U_nm and V_nm at the given angles.

    Returns (U, V, Y): U and V have shape (mode_count(nmax), npts, 3) in
    Cartesian components, Y has shape (mode_count(nmax), npts) and holds the
    scalar harmonics (needed for the radial part of N-type waves).
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    x, s = np.cos(theta), np.sin(theta)
    P, PI, TAU = _legendre_tables(nmax, x, s)
    _, that, phat = _unit_vectors(theta, phi)

    nflat = mode_count(nmax)
    npts = theta.shape[0]
    U = np.zeros((nflat, npts, 3), dtype=complex)
    V = np.zeros((nflat, npts, 3), dtype=complex)
    Y = np.zeros((nflat, npts), dtype=complex)

    for n in range(1, nmax + 1):
        invroot = 1.0 / math.sqrt(n * (n + 1.0))
        for m in range(0, n + 1):
            phase = np.exp(1j * m * phi)
            tau = TAU[n, m]
            pi_ = PI[n, m]
            u = invroot * phase[:, None] * (tau[:, None] * that
                                            + 1j * pi_[:, None] * phat)
            v = invroot * phase[:, None] * (1j * pi_[:, None] * that
                                            - tau[:, None] * phat)
            y = P[n, m] * phase
            U[mode_index(n, m)] = u
            V[mode_index(n, m)] = v
            Y[mode_index(n, m)] = y
            if m > 0:
                sign = (-1.0) ** m
                U[mode_index(n, -m)] = sign * np.conj(u)
                V[mode_index(n, -m)] = sign * np.conj(v)
                Y[mode_index(n, -m)] = sign * np.conj(y)
    return U, V, Y


def vsh_eval(mode: Mode, d: Direction):
    """The orthonormal tangential pair (U_nm, V_nm) at a single direction."""
    U, V, _ = vsh_table(mode.n, np.array([d.theta]), np.array([d.phi]))
    i = mode_index(mode.n, mode.m)
    return U[i, 0], V[i, 0]


# ---------------------------------------------------------------------------
# Vector wave functions
# ---------------------------------------------------------------------------

def _radial_factors(n: int, k: complex, r: float, kind: str):
    """(z_n(kr), sqrt(n(n+1)) z_n(kr)/(kr), Z_n'(kr)/(kr)) for one point."""
    z = k * r
    if kind == "regular":
        if abs(z) < 1e-8:
            # series limits: j_n(z)/z -> delta_{n1}/3, psi_n'(z)/z -> 2 delta_{n1}/3
            zn = z / 3.0 if n == 1 else complex(z) ** n / _double_factorial(2 * n + 1)
            rad = (1.0 / 3.0 if n == 1 else 0.0)
            tan = (2.0 / 3.0 if n == 1 else 0.0)
            return zn, math.sqrt(n * (n + 1.0)) * rad, tan
        seq = specfun.sph_bessel_j_sequence(n, z)
        zn = seq[n]
        dZ = z * seq[n - 1] - n * seq[n]  # psi_n'(z)
    elif kind == "outgoing":
        if r == 0:
            raise ValueError("outgoing wave functions are singular at the origin")
        seq = specfun.sph_hankel1_sequence(n, z)
        zn = seq[n]
        dZ = z * seq[n - 1] - n * seq[n]  # xi_n'(z)
    else:
        raise ValueError(f"kind must be 'regular' or 'outgoing', got {kind!r}")
    return zn, math.sqrt(n * (n + 1.0)) * zn / z, dZ / z


def _double_factorial(n: int) -> float:
    out = 1.0
    while n > 1:
        out *= n
        n -= 2
    return out


def vector_wave_M(mode: Mode, k: complex, points, kind: str = "regular") -> np.ndarray:
    """M-type vector wave function at one or more Cartesian points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.zeros((pts.shape[0], 3), dtype=complex)
    r = np.linalg.norm(pts, axis=1)
    nz = r > 0
    if kind == "outgoing" and not np.all(nz):
        raise ValueError("outgoing wave functions are singular at the origin")
    if np.any(nz):
        theta = np.arccos(np.clip(pts[nz, 2] / r[nz], -1, 1))
        phi = np.arctan2(pts[nz, 1], pts[nz, 0])
        _, V, _ = vsh_table(mode.n, theta, phi)
        v = V[mode_index(mode.n, mode.m)]
        zvals = np.array([_radial_factors(mode.n, k, ri, kind)[0] for ri in r[nz]])
        out[nz] = zvals[:, None] * v
    if points is not None and np.ndim(points) == 1:
        return out[0]
    return out


def vector_wave_N(mode: Mode, k: complex, points, kind: str = "regular") -> np.ndarray:
    """N-type vector wave function; N = curl M / k, M = curl N / k."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.zeros((pts.shape[0], 3), dtype=complex)
    r = np.linalg.norm(pts, axis=1)
    if kind == "outgoing" and np.any(r == 0):
        raise ValueError("outgoing wave functions are singular at the origin")
    # the n=1 regular N field is a nonzero constant at the origin; evaluate
    # the origin through the zhat parametrisation where xhat is undefined
    safe = pts.copy()
    org = r == 0
    safe[org] = [0.0, 0.0, 1.0]
    theta = np.arccos(np.clip(safe[:, 2] / np.where(org, 1.0, r), -1, 1))
    phi = np.arctan2(safe[:, 1], safe[:, 0])
    U, _, Y = vsh_table(mode.n, theta, phi)
    i = mode_index(mode.n, mode.m)
    rhat, _, _ = _unit_vectors(theta, phi)
    for j in range(pts.shape[0]):
        _, rad, tan = _radial_factors(mode.n, k, float(r[j]), kind)
        out[j] = rad * Y[i, j] * rhat[j] + tan * U[i, j]
    if np.ndim(points) == 1:
        return out[0]
    return out


# ---------------------------------------------------------------------------
# Quadrature on S^2
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SphereQuadrature:
    """Product Gauss-Legendre (in cos theta) x trapezoid (in phi) rule.

    Integrates spherical harmonics exactly up to the stated degree; the nodes
    and weights are immutable after construction and safe to share.
    """

    degree: int
    thetas: np.ndarray = field(repr=False)
    phis: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return self.weights.shape[0]

    @property
    def points(self) -> np.ndarray:
        st = np.sin(self.thetas)
        return np.stack([st * np.cos(self.phis), st * np.sin(self.phis),
                         np.cos(self.thetas)], axis=-1)


def sphere_quadrature(degree: int) -> SphereQuadrature:
    """Quadrature exact for spherical harmonics of degree <= ``degree``."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    n_gl = degree // 2 + 1
    n_phi = degree + 1
    xg, wg = np.polynomial.legendre.leggauss(n_gl)
    theta_1d = np.arccos(xg)
    phi_1d = 2.0 * math.pi * np.arange(n_phi) / n_phi
    thetas = np.repeat(theta_1d, n_phi)
    phis = np.tile(phi_1d, n_gl)
    weights = np.repeat(wg, n_phi) * (2.0 * math.pi / n_phi)
    for arr in (thetas, phis, weights):
        arr.flags.writeable = False
    return SphereQuadrature(degree=degree, thetas=thetas, phis=phis, weights=weights)


def l2_norm_s2(samples, quad: SphereQuadrature) -> float:
    """L^2(S^2) norm of a (possibly vector valued) field sampled at the nodes."""
    samples = np.asarray(samples)
    if samples.shape[0] != quad.n_nodes:
        raise ValueError(f"{samples.shape[0]} samples for {quad.n_nodes} nodes")
    mag2 = np.abs(samples) ** 2
    if samples.ndim > 1:
        mag2 = mag2.sum(axis=tuple(range(1, samples.ndim)))
    return math.sqrt(float(np.dot(quad.weights, mag2)))


def vsh_expand(samples: np.ndarray, quad: SphereQuadrature, nmax: int,
               kappa: complex = 0.0, role: str = "farfield") -> SpectralField:
    """Project tangential samples (n_nodes, 3) onto the VSH basis."""
    samples = np.asarray(samples, dtype=complex)
    if samples.shape != (quad.n_nodes, 3):
        raise ValueError("samples must have shape (n_nodes, 3)")
    U, V, _ = vsh_table(nmax, quad.thetas, quad.phis)
    wsamp = quad.weights[:, None] * samples
    out = SpectralField(nmax, role, kappa)
    out.coeffs[0] = np.einsum("ikc,kc->i", np.conj(V), wsamp)
    out.coeffs[1] = np.einsum("ikc,kc->i", np.conj(U), wsamp)
    return out


def evaluate_tangential(fld: SpectralField, theta, phi) -> np.ndarray:
    """Evaluate a density or far-field pattern at directions (npts, 3)."""
    if fld.role not in ("density", "farfield"):
        raise ValueError(f"field role {fld.role!r} is not a tangential pattern")
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    U, V, _ = vsh_table(fld.nmax, theta, phi)
    return (np.einsum("i,ikc->kc", fld.coeffs[0], V)
            + np.einsum("i,ikc->kc", fld.coeffs[1], U))


def evaluate_volume(fld: SpectralField, points) -> np.ndarray:
    """Evaluate an interior or scattered E field at Cartesian points."""
    if fld.role not in ("interior", "scattered"):
        raise ValueError(f"field role {fld.role!r} is not a volume field")
    kind = "regular" if fld.role == "interior" else "outgoing"
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.zeros((pts.shape[0], 3), dtype=complex)
    for mode, c in fld.active_modes():
        if mode.pol == "TE":
            out += c * vector_wave_M(mode, fld.kappa, pts, kind)
        else:
            out += c * vector_wave_N(mode, fld.kappa, pts, kind)
    if np.ndim(points) == 1:
        return out[0]
    return out
