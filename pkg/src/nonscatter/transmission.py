"""Interior transmission eigenvalues and boundary impedance symbols of a ball.

The two-media interior problem on the ball Sigma of radius R couples a
regular Maxwell field in the ball's material (eps_b, mu_b) to a regular field
in the host material (eps_inf, mu_inf) through both tangential traces.  Per
(degree, polarization) that is a 2 x 2 homogeneous system; its determinant is
real analytic in omega and its roots are the transmission eigenvalues.  At a
root the host-side eigenfunction is itself an entire wave, so using it as the
incident field scatters nothing: the determinant vanishes exactly where the
ball's scattering coefficient of that mode does.

The boundary impedance maps (tangential E trace -> tangential H trace) are
mode diagonal here.  With ``x_b = omega sqrt(eps_b mu_b) R`` and
``x_0 = omega sqrt(eps_inf mu_inf) R``::

    interior:  lambda_TE = -(k_b/(i omega mu_b)) psi_n'(x_b)/psi_n(x_b)
               lambda_TM = -(k_b/(i omega mu_b)) psi_n(x_b)/psi_n'(x_b)
    exterior:  same with psi -> xi at x_0 and host constants

so the interior symbol's poles sit on the ball's electric-wall spectrum and
its zeros on the magnetic-wall spectrum, while the exterior symbol is never
singular for real omega.  The operator norm of (interior) o (exterior)^{-1}
on any mode-orthogonal weighting is the supremum of |lambda_i / lambda_o|.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .eigenmodes import BallGeometry, characteristic, mode_norm_weights
from .errors import HypothesisError, NumericalError
from .harmonics import SpectralField

PROXIMITY_THRESHOLD = 1e-8


def interior_impedance_symbol(ball: BallGeometry, omega: float, n: int,
                              pol: str) -> complex:
    """Mode symbol of the interior impedance map of (ball; eps_b, mu_b).

    Raises
    ------
    HypothesisError
        if omega is within the proximity threshold of an interior
        electric-wall eigenvalue of the ball, where the map is undefined.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    kb = omega * ball.refractive_index
    xb = kb * ball.radius
    fam = "PEC-TE" if pol == "TE" else "PEC-TM"
    margin = abs(characteristic(fam, n, xb))
    if margin < PROXIMITY_THRESHOLD:
        raise HypothesisError(
            f"omega={omega:g} is within {margin:.2e} of an interior "
            f"electric-wall eigenvalue ({fam}, n={n}); interior impedance "
            "map undefined")
    psi = specfun.riccati_psi(n, xb)
    dpsi = specfun.riccati_psi_d(n, xb)
    pref = -kb / (1j * omega * ball.mu)
    if pol == "TE":
        return pref * dpsi / psi
    if pol == "TM":
        return pref * psi / dpsi
    raise ValueError(f"polarization must be 'TE' or 'TM', got {pol!r}")


def exterior_impedance_symbol(radius: float, eps_inf: float, mu_inf: float,
                              omega: float, n: int, pol: str) -> complex:
    """Mode symbol of the radiating exterior impedance map; never singular."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    k0 = omega * math.sqrt(eps_inf * mu_inf)
    x0 = k0 * radius
    xi = specfun.riccati_xi(n, x0)
    dxi = specfun.riccati_xi_d(n, x0)
    pref = -k0 / (1j * omega * mu_inf)
    if pol == "TE":
        return pref * dxi / xi
    if pol == "TM":
        return pref * xi / dxi
    raise ValueError(f"polarization must be 'TE' or 'TM', got {pol!r}")


@dataclass(frozen=True)
class NontransparencyReport:
    """Sup of per-mode impedance ratios, with the mode attaining it."""

    norm: float
    attaining_n: int
    attaining_pol: str
    tail_estimate: float
    n_max: int

    @property
    def holds(self) -> bool:
        """Whether the reported norm differs from 1 (the generic hypothesis)."""
        return abs(self.norm - 1.0) > 1e-12


def nontransparency_norm(ball: BallGeometry, eps_inf: float, mu_inf: float,
                         omega: float, n_max: int) -> NontransparencyReport:
    """Operator norm of interior o exterior^{-1} over modes n <= n_max.

    For a mode-diagonal operator with a common mode-orthogonal weighting on
    domain and codomain, the operator norm is the supremum of the symbol
    ratios, independent of the weighting.  The tail estimate is the n -> inf
    limit of the ratios: mu_inf/mu_b for TE and eps_b/eps_inf for TM.
    """
    best = -1.0
    arg = (1, "TE")
    for n in range(1, n_max + 1):
        for pol in ("TE", "TM"):
            li = interior_impedance_symbol(ball, omega, n, pol)
            lo = exterior_impedance_symbol(ball.radius, eps_inf, mu_inf,
                                           omega, n, pol)
            ratio = abs(li / lo)
            if ratio > best:
                best, arg = ratio, (n, pol)
    tail = max(mu_inf / ball.mu, ball.epsilon / eps_inf)
    return NontransparencyReport(norm=best, attaining_n=arg[0],
                                 attaining_pol=arg[1], tail_estimate=tail,
                                 n_max=n_max)


@dataclass(frozen=True)
class ExclusionReport:
    ok: bool
    min_margin: float
    margins: dict

    def __bool__(self) -> bool:
        return self.ok


def pec_pmc_exclusion_check(ball: BallGeometry, omega: float,
                            n_max: int) -> ExclusionReport:
    """Check omega against the ball's electric- and magnetic-wall spectra.

    True when every characteristic-function magnitude over n <= n_max and
    both families exceeds the proximity threshold; margins are reported per
    family.
    """
    xb = omega * ball.refractive_index * ball.radius
    margins = {}
    for fam in ("PEC-TE", "PEC-TM", "PMC-TE", "PMC-TM"):
        margins[fam] = min(abs(characteristic(fam, n, xb))
                           for n in range(1, n_max + 1))
    min_margin = min(margins.values())
    return ExclusionReport(ok=min_margin > PROXIMITY_THRESHOLD,
                           min_margin=min_margin, margins=margins)


# ---------------------------------------------------------------------------
# Transmission eigenvalues
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransmissionEigenRecord:
    omega: float
    n: int
    pol: str
    determinant_residual: float
    matching_residual: float
    interior_coeff: complex   # multiplies the regular mode at kappa_b
    entire_coeff: complex     # multiplies the regular host mode at kappa_0
    kappa_b: float
    kappa_0: float
    radius: float

    def fields(self, m: int = 0, nmax: int | None = None):
        """(E_t, U) as spectral fields; magnetic partners follow by curl."""
        nmax = self.n if nmax is None else nmax
        Et = SpectralField(nmax, "interior", self.kappa_b)
        Et.set(self.n, m, self.pol, self.interior_coeff)
        U = SpectralField(nmax, "interior", self.kappa_0)
        U.set(self.n, m, self.pol, self.entire_coeff)
        return Et, U


def _trace_matrix(ball: BallGeometry, eps_inf: float, mu_inf: float,
                  omega: float, n: int, pol: str) -> np.ndarray:
    """2x2 system matching both tangential traces of (E_t, U) on the sphere."""
    kb = omega * ball.refractive_index
    k0 = omega * math.sqrt(eps_inf * mu_inf)
    xb, x0 = kb * ball.radius, k0 * ball.radius
    psi_b = specfun.riccati_psi(n, xb).real
    dpsi_b = specfun.riccati_psi_d(n, xb).real
    psi_0 = specfun.riccati_psi(n, x0).real
    dpsi_0 = specfun.riccati_psi_d(n, x0).real
    if pol == "TE":
        # rows: tangential E (j_n values), tangential H (psi_n'/mu)
        return np.array([[psi_b / xb, -psi_0 / x0],
                         [dpsi_b / ball.mu, -dpsi_0 / mu_inf]])
    # TM rows: tangential E (psi_n'/k), tangential H (psi_n/mu)
    return np.array([[dpsi_b / kb, -dpsi_0 / k0],
                     [psi_b / ball.mu, -psi_0 / mu_inf]])


def transmission_determinant(ball: BallGeometry, eps_inf: float, mu_inf: float,
                             omega: float, n: int, pol: str) -> float:
    return float(np.linalg.det(_trace_matrix(ball, eps_inf, mu_inf, omega, n, pol)))


def transmission_eigenvalues(ball: BallGeometry, eps_inf: float, mu_inf: float,
                             omega_window=None, n_max: int = 10,
                             grid_divisor: float = 4.0) -> list[TransmissionEigenRecord]:
    """Real transmission eigenvalues of the ball in the given window.

    Per (n, pol) the real determinant is scanned for sign changes on a grid
    of spacing pi/(grid_divisor R (nu_b + nu_0)) and each bracket is polished
    by bisection.  Eigenfunction coefficients come from the null direction of
    the trace matrix, normalised so the host-side field has unit L^2 norm
    over the ball, with the phase of the largest component real positive.
    """
    if ball.refractive_index == math.sqrt(eps_inf * mu_inf):
        raise ValueError("transmission problem requires contrast != 1")
    if omega_window is None:
        omega_window = (0.0, 15.0 / ball.radius)
    w_lo, w_hi = omega_window
    if not (0 <= w_lo < w_hi):
        raise ValueError(f"invalid omega window {omega_window!r}")

    nu_b = ball.refractive_index
    nu_0 = math.sqrt(eps_inf * mu_inf)
    dw = math.pi / (grid_divisor * ball.radius * (nu_b + nu_0))
    records = []
    for n in range(1, n_max + 1):
        for pol in ("TE", "TM"):
            f = lambda w: transmission_determinant(ball, eps_inf, mu_inf, w, n, pol)  # noqa: B023
            roots = _bracket_roots(f, max(w_lo, dw * 1e-3), w_hi, dw)
            for w in roots:
                records.append(_make_record(ball, eps_inf, mu_inf, w, n, pol))
    records.sort(key=lambda r: (r.omega, r.n, r.pol))
    return records


def _bracket_roots(f, w_lo: float, w_hi: float, dw: float) -> list[float]:
    roots = []
    w_prev = w_lo
    f_prev = f(w_prev)
    k = 1
    while w_prev < w_hi:
        w = min(w_lo + k * dw, w_hi)
        f_cur = f(w)
        if f_cur == 0.0:
            roots.append(w)
        elif (f_cur > 0) != (f_prev > 0):
            lo, hi, flo = w_prev, w, f_prev
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                fm = f(mid)
                if fm == 0.0:
                    lo = hi = mid
                    break
                if (fm > 0) == (flo > 0):
                    lo, flo = mid, fm
                else:
                    hi = mid
                if hi - lo < 1e-15 * max(1.0, mid):
                    break
            roots.append(0.5 * (lo + hi))
        if w >= w_hi:
            break
        w_prev, f_prev = w, f_cur
        k += 1
    return roots


def _make_record(ball: BallGeometry, eps_inf: float, mu_inf: float,
                 omega: float, n: int, pol: str) -> TransmissionEigenRecord:
    K = _trace_matrix(ball, eps_inf, mu_inf, omega, n, pol)
    _, sv, vh = np.linalg.svd(K)
    if sv[0] < 1e-8 * max(1.0, abs(K).max()):
        raise NumericalError(
            f"ill-conditioned null space at omega={omega:g} (n={n}, {pol}); "
            "possible double root")
    vec = vh[-1].conj()
    # tie-break: phase of the largest component real positive
    pivot = vec[np.argmax(np.abs(vec))]
    vec = vec * (abs(pivot) / pivot)
    A, B = vec

    kb = omega * ball.refractive_index
    k0 = omega * math.sqrt(eps_inf * mu_inf)
    wM, wN = mode_norm_weights(n, k0, ball.radius, "l2")
    w = wM[n - 1] if pol == "TE" else wN[n - 1]
    scale = 1.0 / (abs(B) * math.sqrt(w))
    A, B = A * scale, B * scale

    resid = float(np.abs(K @ np.array([A, B])).max())
    det = abs(float(np.linalg.det(K)))
    return TransmissionEigenRecord(
        omega=omega, n=n, pol=pol,
        determinant_residual=det, matching_residual=resid,
        interior_coeff=complex(A), entire_coeff=complex(B),
        kappa_b=kb, kappa_0=k0, radius=ball.radius)


def ite_table_csv(records) -> str:
    """CSV export: omega,n,pol,residual."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["omega", "n", "pol", "residual"])
    for r in records:
        writer.writerow([f"{r.omega:.17g}", r.n, r.pol,
                         f"{r.determinant_residual:.17g}"])
    return buf.getvalue()


def impedance_table_csv(ball: BallGeometry, eps_inf: float, mu_inf: float,
                        omegas, n_max: int) -> str:
    """Impedance symbols over an omega grid, one row per (omega, n, pol)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["omega", "n", "pol", "re_lambda_i", "im_lambda_i",
                     "re_lambda_o", "im_lambda_o"])
    for w in omegas:
        for n in range(1, n_max + 1):
            for pol in ("TE", "TM"):
                try:
                    li = interior_impedance_symbol(ball, w, n, pol)
                    re_i, im_i = f"{li.real:.17g}", f"{li.imag:.17g}"
                except HypothesisError:
                    re_i = im_i = "nan"
                lo = exterior_impedance_symbol(ball.radius, eps_inf, mu_inf,
                                               w, n, pol)
                writer.writerow([f"{w:.17g}", n, pol, re_i, im_i,
                                 f"{lo.real:.17g}", f"{lo.imag:.17g}"])
    return buf.getvalue()
