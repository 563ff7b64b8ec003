"""Interior cavity eigenvalues of a ball with perfectly conducting walls.

A ball of radius R filled with constants (epsilon, mu) supports two discrete
families of interior Maxwell eigenmodes per boundary condition.  With
``x = omega sqrt(epsilon mu) R`` the characteristic equations are::

    electric wall (nu x E = 0):   TE family  j_n(x) = 0
                                  TM family  psi_n'(x) = 0
    magnetic wall (nu x H = 0):   TE family  psi_n'(x) = 0
                                  TM family  j_n(x) = 0

Each root carries the full (2n+1)-fold order degeneracy.  Eigenfunctions are
single regular vector wave modes, normalised to unit L^2 norm of E over the
ball.  The same radial quadrature machinery provides the H^1 and H(curl)
norms used by the Herglotz fitting and the sweep bookkeeping.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import specfun
from .errors import NumericalError
from .harmonics import SpectralField, mode_count, mode_index

FAMILIES = ("PEC-TE", "PEC-TM", "PMC-TE", "PMC-TM")

#: characteristic function kind per family: "j" for j_n, "dpsi" for psi_n'
_FAMILY_CHAR = {"PEC-TE": "j", "PEC-TM": "dpsi", "PMC-TE": "dpsi", "PMC-TM": "j"}
#: polarization of the electric field of the eigenmode
_FAMILY_POL = {"PEC-TE": "TE", "PEC-TM": "TM", "PMC-TE": "TE", "PMC-TM": "TM"}


@dataclass(frozen=True)
class BallGeometry:
    """A ball of given radius filled with isotropic constants."""

    radius: float
    epsilon: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"radius must be positive, got {self.radius!r}")
        if not (self.epsilon > 0 and self.mu > 0):
            raise ValueError("epsilon and mu must be positive for eigenproblems")

    @property
    def refractive_index(self) -> float:
        return math.sqrt(self.epsilon * self.mu)


@dataclass(frozen=True)
class EigenRecord:
    omega: float
    n: int
    family: str
    multiplicity: int
    residual: float

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")


def characteristic(family: str, n: int, x: float) -> float:
    """Value of the family's characteristic function at x = kappa R."""
    kind = _FAMILY_CHAR[family]
    if kind == "j":
        return specfun.sph_bessel_j(n, x).real
    return specfun.riccati_psi_d(n, x).real


def _characteristic_d(family: str, n: int, x: float) -> float:
    kind = _FAMILY_CHAR[family]
    if kind == "j":
        return specfun.sph_bessel_j_d(n, x).real
    # psi'' = (n(n+1)/x^2 - 1) psi
    return float((n * (n + 1) / x**2 - 1.0) * specfun.riccati_psi(n, x).real)


def _polish_root(f, fd, lo: float, hi: float) -> float:
    flo = f(lo)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            lo = hi = mid
            break
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < 1e-13 * max(1.0, abs(mid)):
            break
    x = 0.5 * (lo + hi)
    for _ in range(4):  # Newton cleanup inside the bracket
        d = fd(x)
        if d == 0:
            break
        step = f(x) / d
        xn = x - step
        if not (lo - 1e-9 <= xn <= hi + 1e-9):
            break
        x = xn
    return x


def _scan_roots(f, fd, x_max: float, dx: float) -> list[float]:
    """All sign-change roots of f on (0, x_max] on a grid of spacing dx."""
    roots = []
    x_prev = dx * 0.25
    f_prev = f(x_prev)
    k = 1
    while True:
        x = dx * 0.25 + k * dx
        if x_prev >= x_max:
            break
        x = min(x, x_max)
        f_cur = f(x)
        if f_cur == 0.0:
            roots.append(x)
        elif (f_cur > 0) != (f_prev > 0):
            roots.append(_polish_root(f, fd, x_prev, x))
        if x >= x_max:
            break
        x_prev, f_prev = x, f_cur
        k += 1
    return roots


def _eigenvalues(geom: BallGeometry, omega_max: float, families, grid_divisor: float = 4.0):
    if omega_max <= 0:
        raise ValueError("omega_max must be positive")
    idx = geom.refractive_index
    x_max = omega_max * geom.radius * idx
    dx = math.pi / grid_divisor
    records = []
    for family in families:
        n = 1
        while n <= x_max + 1:
            f = lambda x: characteristic(family, n, x)  # noqa: B023
            fd = lambda x: _characteristic_d(family, n, x)  # noqa: B023
            for x_root in _scan_roots(f, fd, x_max, dx):
                resid = abs(f(x_root))
                if resid > 1e-10:
                    raise NumericalError(
                        f"root polish failed for {family} n={n}: residual {resid:g}")
                records.append(EigenRecord(
                    omega=x_root / (geom.radius * idx), n=n, family=family,
                    multiplicity=2 * n + 1, residual=resid))
            n += 1
    records.sort(key=lambda r: (r.omega, r.n, r.family))
    return records


def pec_eigenvalues(geom: BallGeometry, omega_max: float,
                    grid_divisor: float = 4.0) -> list[EigenRecord]:
    """All electric-wall eigenvalues in (0, omega_max], sorted by omega.

    The scan grid spacing is pi/(grid_divisor R sqrt(eps mu)); a quarter of
    the asymptotic spacing of the Bessel roots by default, so no root is
    skipped.  Returns an empty list when omega_max is below the first root.
    """
    return _eigenvalues(geom, omega_max, ("PEC-TE", "PEC-TM"), grid_divisor)


def pmc_eigenvalues(geom: BallGeometry, omega_max: float,
                    grid_divisor: float = 4.0) -> list[EigenRecord]:
    """All magnetic-wall eigenvalues in (0, omega_max], sorted by omega."""
    return _eigenvalues(geom, omega_max, ("PMC-TE", "PMC-TM"), grid_divisor)


# ---------------------------------------------------------------------------
# Radial norm machinery.
#
# For a single regular mode at real wavenumber kappa on the ball of radius R,
# every Sobolev quantity reduces to radial integrals of j_n and psi_n'.  The
# gradient seminorm comes from the componentwise Helmholtz equation:
#     int |grad u|^2 = kappa^2 int |u|^2 + oint (du/dr) . conj(u) ds
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def _radial_weights(nmax: int, kappa: float, radius: float):
    """Per-degree radial factors for unit-coefficient modes.

    Returns dict of arrays indexed by n-1 for n = 1..nmax with keys:
    ``l2_M``, ``l2_N`` (squared L^2 norms), ``grad_M``, ``grad_N`` (squared
    gradient seminorms).
    """
    if kappa <= 0:
        raise ValueError("radial weights require a positive real wavenumber")
    x_max = kappa * radius
    n_nodes = max(64, int(3 * x_max) + 24)
    xg, wg = np.polynomial.legendre.leggauss(n_nodes)
    r = 0.5 * radius * (xg + 1.0)
    w = 0.5 * radius * wg

    jj = np.empty((nmax + 1, n_nodes))
    for i, ri in enumerate(r):
        jj[:, i] = specfun.sph_bessel_j_sequence(nmax, kappa * ri).real
    z = kappa * r

    ns = np.arange(1, nmax + 1)
    l2_M = np.empty(nmax)
    l2_N = np.empty(nmax)
    for n in ns:
        psi_d = z * jj[n - 1] - n * jj[n]           # psi_n'(kappa r)
        l2_M[n - 1] = np.dot(w, jj[n] ** 2 * r**2)
        l2_N[n - 1] = np.dot(w, (n * (n + 1) * (jj[n] / z) ** 2
                                 + (psi_d / z) ** 2) * r**2)

    xR = kappa * radius
    jR = np.array([specfun.sph_bessel_j(n, xR).real for n in range(nmax + 1)])
    jdR = np.array([specfun.sph_bessel_j_d(n, xR).real for n in range(nmax + 1)])
    psiR = xR * jR
    psi_dR = np.array([specfun.riccati_psi_d(n, xR).real for n in range(nmax + 1)])

    grad_M = np.empty(nmax)
    grad_N = np.empty(nmax)
    for n in ns:
        grad_M[n - 1] = kappa**2 * l2_M[n - 1] + radius**2 * kappa * jdR[n] * jR[n]
        g = math.sqrt(n * (n + 1)) * jR[n] / xR
        gd = math.sqrt(n * (n + 1)) * kappa * (jdR[n] * xR - jR[n]) / xR**2
        h = psi_dR[n] / xR
        psi_ddR = (n * (n + 1) / xR**2 - 1.0) * psiR[n]
        hd = kappa * (psi_ddR * xR - psi_dR[n]) / xR**2
        grad_N[n - 1] = kappa**2 * l2_N[n - 1] + radius**2 * (gd * g + hd * h)
    return {"l2_M": l2_M, "l2_N": l2_N, "grad_M": grad_M, "grad_N": grad_N}


def mode_norm_weights(nmax: int, kappa: float, radius: float, norm_kind: str):
    """Squared norm of a unit-coefficient regular mode, per degree and type.

    Returns (wM, wN) arrays over n = 1..nmax for ``norm_kind`` in
    {"l2", "h1", "hcurl"}.
    """
    rw = _radial_weights(nmax, float(kappa), float(radius))
    if norm_kind == "l2":
        return rw["l2_M"].copy(), rw["l2_N"].copy()
    if norm_kind == "h1":
        return rw["l2_M"] + rw["grad_M"], rw["l2_N"] + rw["grad_N"]
    if norm_kind == "hcurl":
        # curl of a unit M mode is kappa times the N mode and vice versa
        return (rw["l2_M"] + kappa**2 * rw["l2_N"],
                rw["l2_N"] + kappa**2 * rw["l2_M"])
    raise ValueError(f"norm_kind must be 'l2', 'h1' or 'hcurl', got {norm_kind!r}")


def _check_tail(field: SpectralField, weights_by_mode: np.ndarray) -> None:
    total = float(np.sum(weights_by_mode * np.abs(field.coeffs) ** 2))
    if total == 0.0 or field.nmax < 2:
        return
    top = slice(mode_index(field.nmax, -field.nmax), mode_count(field.nmax))
    tail = float(np.sum(weights_by_mode[:, top] * np.abs(field.coeffs[:, top]) ** 2))
    if tail > 1e-8 * total:
        warnings.warn(
            f"top degree n={field.nmax} carries {tail / total:.2e} of the norm; "
            "truncation may be insufficient", stacklevel=3)


def _mode_weight_vector(nmax: int, kappa: float, radius: float, norm_kind: str):
    """Per-flat-mode squared-norm weights, shape (2, mode_count)."""
    wM, wN = mode_norm_weights(nmax, kappa, radius, norm_kind)
    out = np.empty((2, mode_count(nmax)))
    for n in range(1, nmax + 1):
        sl = slice(mode_index(n, -n), mode_index(n, n) + 1)
        out[0, sl] = wM[n - 1]
        out[1, sl] = wN[n - 1]
    return out


def field_norm(field: SpectralField, radius: float, norm_kind: str,
               warn_tail: bool = False) -> float:
    """Norm of a spectral interior field over the ball of given radius."""
    if field.role != "interior":
        raise ValueError("volume norms apply to interior fields")
    kappa = field.kappa
    if abs(kappa.imag) > 1e-12 * abs(kappa):
        raise ValueError("volume norms are implemented for real wavenumbers")
    w = _mode_weight_vector(field.nmax, kappa.real, radius, norm_kind)
    if warn_tail:
        _check_tail(field, w)
    return math.sqrt(float(np.sum(w * np.abs(field.coeffs) ** 2)))


def magnetic_partner(E: SpectralField, epsilon: float, mu: float) -> SpectralField:
    """H = (i omega mu)^{-1} curl E for a spectral interior field.

    Swaps polarization slots and scales by -i sqrt(epsilon/mu); exact because
    curl interlaces the M and N families.
    """
    H = SpectralField(E.nmax, E.role, E.kappa)
    fac = -1j * math.sqrt(epsilon / mu)
    H.coeffs[0] = fac * E.coeffs[1]
    H.coeffs[1] = fac * E.coeffs[0]
    return H


def sobolev_norms(E: SpectralField, epsilon: float, mu: float,
                  radius: float) -> tuple[float, float]:
    """Pair norms (H^1 style, H(curl) style) of the Maxwell pair built on E.

    Each value is ``norm(E) + norm(H)`` with H derived from E through the
    Maxwell system; cross terms between modes vanish by orthogonality.
    """
    H = magnetic_partner(E, epsilon, mu)
    h1 = field_norm(E, radius, "h1", warn_tail=True) + field_norm(H, radius, "h1")
    hcurl = field_norm(E, radius, "hcurl") + field_norm(H, radius, "hcurl")
    return h1, hcurl


def eigenfunction_coefficients(rec: EigenRecord, m: int, geom: BallGeometry,
                               nmax: int | None = None):
    """The (E, H) spectral pair of one eigenmode, with ||E||_{L^2(ball)} = 1."""
    if abs(m) > rec.n:
        raise ValueError(f"order |m|={abs(m)} exceeds degree n={rec.n}")
    nmax = rec.n if nmax is None else nmax
    if nmax < rec.n:
        raise ValueError("truncation below the record degree")
    kappa = rec.omega * geom.refractive_index
    pol = _FAMILY_POL[rec.family]
    wM, wN = mode_norm_weights(nmax, kappa, geom.radius, "l2")
    wvec = wM if pol == "TE" else wN
    c = 1.0 / math.sqrt(wvec[rec.n - 1])
    E = SpectralField(nmax, "interior", kappa)
    E.set(rec.n, m, pol, c)
    H = magnetic_partner(E, geom.epsilon, geom.mu)
    return E, H


def eigen_table_csv(records) -> str:
    """CSV export: omega,n,family,multiplicity,residual."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["omega", "n", "family", "multiplicity", "residual"])
    for r in records:
        writer.writerow([f"{r.omega:.17g}", r.n, r.family, r.multiplicity,
                         f"{r.residual:.17g}"])
    return buf.getvalue()
