"""Forward scattering solver for radially layered isotropic media.

The medium is a stack of concentric spherical layers (innermost first), each
with constants (epsilon, mu, sigma), embedded in a lossless homogeneous host
(eps_inf, mu_inf).  In a medium with conductivity the two curl equations
combine to a Helmholtz operator with effective wavenumber::

    k^2 = omega^2 mu (epsilon + i sigma / omega),   Im k >= 0.

Everything is diagonal per (degree n, polarization).  Matching tangential E
and H across the interfaces is propagated as a single logarithmic-derivative
ratio (never as raw Riccati products), which keeps strongly conducting
layers finite.  With ``x0 = k_host R_out`` the exterior match closes to the
scattering coefficient ``s`` relative to a unit regular incident mode::

    s = (rho psi_n(x0) - psi_n'(x0)) / (xi_n'(x0) - rho xi_n(x0))

so a host-identical medium gives s = 0, a perfectly conducting sphere gives
s = -psi_n/xi_n (TE) or -psi_n'/xi_n' (TM), and lossless media satisfy
|1 + 2 s| = 1 per mode.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .eigenmodes import field_norm, magnetic_partner
from .errors import NumericalError
from .harmonics import (SpectralField, degree_of_index, evaluate_tangential,
                        evaluate_volume, sphere_quadrature)
from .herglotz import density_to_interior_spectral


@dataclass(frozen=True)
class Layer:
    """One spherical layer: all constants isotropic, sigma >= 0."""

    outer_radius: float
    epsilon: float
    mu: float
    sigma: float = 0.0

    def __post_init__(self):
        if not (self.outer_radius > 0 and math.isfinite(self.outer_radius)):
            raise ValueError(f"layer radius must be positive, got {self.outer_radius!r}")
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ValueError("layer epsilon must be positive (uniform ellipticity)")
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise ValueError("layer mu must be positive (uniform ellipticity)")
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise ValueError("layer sigma must be nonnegative and bounded")


@dataclass(frozen=True)
class CoatingSpec:
    """Conducting-shell recipe with the tau scaling of its regime.

    regime "pec": (eps_c / tau, tau mu_c, sigma_c / tau) -- electric wall limit.
    regime "pmc": (tau eps_c, mu_c / tau, tau sigma_c) -- magnetic wall limit.
    """

    tau: float
    eps_c: float
    mu_c: float
    sigma_c: float
    regime: str

    def __post_init__(self):
        if not (0.0 < self.tau <= 1.0):
            raise ValueError(f"tau must lie in (0, 1], got {self.tau!r}")
        if self.regime not in ("pec", "pmc"):
            raise ValueError(f"regime must be 'pec' or 'pmc', got {self.regime!r}")
        if min(self.eps_c, self.mu_c) <= 0 or self.sigma_c < 0:
            raise ValueError("shell base constants must satisfy ellipticity")

    def scaled(self) -> tuple[float, float, float]:
        if self.regime == "pec":
            return self.eps_c / self.tau, self.tau * self.mu_c, self.sigma_c / self.tau
        return self.tau * self.eps_c, self.mu_c / self.tau, self.tau * self.sigma_c


@dataclass(frozen=True)
class LayeredMedium:
    layers: tuple[Layer, ...]
    eps_inf: float = 1.0
    mu_inf: float = 1.0

    def __post_init__(self):
        if not self.layers:
            raise ValueError("at least one layer is required")
        radii = [lay.outer_radius for lay in self.layers]
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError(f"layer radii must be strictly increasing, got {radii}")
        if min(self.eps_inf, self.mu_inf) <= 0:
            raise ValueError("host constants must be positive")

    @property
    def outer_radius(self) -> float:
        return self.layers[-1].outer_radius

    @property
    def ellipticity_constant(self) -> float:
        """Largest c0 < 1 with c0 <= eps, mu <= 1/c0 across all layers."""
        vals = [v for lay in self.layers for v in (lay.epsilon, lay.mu)]
        bound = max(max(vals), 1.0 / min(vals))
        return 1.0 / max(bound, 1.0 + 1e-15)

    @property
    def conductivity_bound(self) -> float:
        return max(lay.sigma for lay in self.layers)

    @classmethod
    def homogeneous_ball(cls, radius: float, epsilon: float, mu: float,
                         sigma: float = 0.0, eps_inf: float = 1.0,
                         mu_inf: float = 1.0) -> "LayeredMedium":
        return cls((Layer(radius, epsilon, mu, sigma),), eps_inf, mu_inf)

    @classmethod
    def coated_ball(cls, core: Layer, coating: CoatingSpec, outer_radius: float,
                    eps_inf: float = 1.0, mu_inf: float = 1.0) -> "LayeredMedium":
        eps, mu, sig = coating.scaled()
        return cls((core, Layer(outer_radius, eps, mu, sig)), eps_inf, mu_inf)


def effective_wavenumber(layer: Layer, omega: float) -> complex:
    """k = omega sqrt(mu (epsilon + i sigma/omega)), principal root, Im k >= 0."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    k = cmath.sqrt(omega**2 * layer.mu * (layer.epsilon + 1j * layer.sigma / omega))
    if k.imag < 0:
        k = -k
    return k


def _propagate_pair(n: int, k: complex, r_in: float, r_out: float,
                    p: complex, q: complex) -> tuple[complex, complex]:
    """Carry the projective trace pair (F, F') of a layer from r_in to r_out.

    F is the layer's Riccati combination a psi + b xi; (a, b) are recovered
    from the pair at the inner radius through the Wronskian
    psi xi' - psi' xi = i.  The pair representation has no singular states
    (unlike the ratio F'/F, which passes through infinity whenever F has a
    zero), and it is renormalised on exit so magnitudes never accumulate.
    """
    xa, xb = k * r_in, k * r_out
    if max(abs(xa.imag), abs(xb.imag)) > 650.0:
        # the inner condition is forgotten to relative accuracy e^{-2 Im(xb-xa)};
        # the surviving component is the regular one, known through its ratio
        return 1.0, specfun.log_derivative_ratio(n, xb)
    psi_a, dpsi_a = specfun.riccati_psi(n, xa), specfun.riccati_psi_d(n, xa)
    xi_a, dxi_a = specfun.riccati_xi(n, xa), specfun.riccati_xi_d(n, xa)
    a = (dxi_a * p - xi_a * q) / 1j
    b = (psi_a * q - dpsi_a * p) / 1j
    psi_b, dpsi_b = specfun.riccati_psi(n, xb), specfun.riccati_psi_d(n, xb)
    xi_b, dxi_b = specfun.riccati_xi(n, xb), specfun.riccati_xi_d(n, xb)
    p_out = a * psi_b + b * xi_b
    q_out = a * dpsi_b + b * dxi_b
    scale = max(abs(p_out), abs(q_out))
    if scale == 0 or not (cmath.isfinite(p_out) and cmath.isfinite(q_out)):
        raise NumericalError(f"layer propagation degenerated at n={n}, x={xb!r}")
    return p_out / scale, q_out / scale


def mie_coefficients(medium: LayeredMedium, omega: float, n: int, pol: str) -> complex:
    """Scattering coefficient of mode (n, pol) relative to a unit regular mode."""
    if pol not in ("TE", "TM"):
        raise ValueError(f"polarization must be 'TE' or 'TM', got {pol!r}")
    if n < 1:
        raise ValueError("mode degree must be >= 1")
    ks = [effective_wavenumber(lay, omega) for lay in medium.layers]
    k_host = omega * math.sqrt(medium.eps_inf * medium.mu_inf)

    # projective state (F, F'); started in ratio form so the innermost layer
    # never forms psi alone (it may underflow/overflow for conducting cores)
    p, q = 1.0 + 0.0j, specfun.log_derivative_ratio(
        n, ks[0] * medium.layers[0].outer_radius)
    for idx in range(len(medium.layers)):
        lay = medium.layers[idx]
        if idx + 1 < len(medium.layers):
            nxt = medium.layers[idx + 1]
            k_next, mu_next = ks[idx + 1], nxt.mu
        else:
            k_next, mu_next = k_host, medium.mu_inf
        if pol == "TE":
            # (1/k) F and (1/mu) F' are continuous
            p, q = p * (k_next / ks[idx]), q * (mu_next / lay.mu)
        else:
            # (1/mu) F and (1/k) F' are continuous
            p, q = p * (mu_next / lay.mu), q * (k_next / ks[idx])
        if idx + 1 < len(medium.layers):
            p, q = _propagate_pair(n, k_next, lay.outer_radius,
                                   medium.layers[idx + 1].outer_radius, p, q)

    x0 = k_host * medium.outer_radius
    s = ((q * specfun.riccati_psi(n, x0) - p * specfun.riccati_psi_d(n, x0))
         / (p * specfun.riccati_xi_d(n, x0) - q * specfun.riccati_xi(n, x0)))
    if not cmath.isfinite(s):
        raise NumericalError(
            f"layer matching lost conditioning for n={n} pol={pol} omega={omega:g}")
    return s


@dataclass
class ScatterResult:
    """One forward solve: per-mode coefficients, far field, and bookkeeping.

    The far-field pattern is normalised so that the scattered field satisfies
    E_s(x) = (e^{i kappa r}/r) E_inf(xhat) + O(1/r^2); the magnetic pattern
    H_inf = xhat x E_inf corresponds to sqrt(mu_inf/eps_inf) times the raw
    magnetic far field, which makes the two patterns share one norm.
    """

    omega: float
    medium: LayeredMedium
    incident: SpectralField
    scattered: SpectralField
    far_field: SpectralField
    s_te: np.ndarray = field(repr=False)
    s_tm: np.ndarray = field(repr=False)
    farfield_norm: float = 0.0
    e_hcurl: float = 0.0
    h_hcurl: float = 0.0

    @property
    def kappa(self) -> float:
        return self.omega * math.sqrt(self.medium.eps_inf * self.medium.mu_inf)


def solve_farfield(a: SpectralField, medium: LayeredMedium, omega: float) -> ScatterResult:
    """Solve the scattering problem for a Herglotz incident density."""
    if a.role != "density":
        raise ValueError("incident field must be given as a density")
    kappa = omega * math.sqrt(medium.eps_inf * medium.mu_inf)
    if abs(a.kappa - kappa) > 1e-9 * max(1.0, kappa):
        raise ValueError(
            f"density wavenumber {a.kappa!r} does not match omega (kappa={kappa:g})")

    incident = density_to_interior_spectral(a, medium.eps_inf)
    nmax = incident.nmax
    deg = degree_of_index(nmax)

    active = np.abs(incident.coeffs).sum(axis=0) > 0
    need = sorted({int(n) for n in deg[active]})
    s_te = np.zeros(nmax + 1, dtype=complex)
    s_tm = np.zeros(nmax + 1, dtype=complex)
    for n in need:
        s_te[n] = mie_coefficients(medium, omega, n, "TE")
        s_tm[n] = mie_coefficients(medium, omega, n, "TM")

    scattered = SpectralField(nmax, "scattered", kappa)
    scattered.coeffs[0] = incident.coeffs[0] * s_te[deg]
    scattered.coeffs[1] = incident.coeffs[1] * s_tm[deg]

    # h1_n(kr) -> (-i)^{n+1} e^{ikr}/(kr);  xi_n'(kr) -> (-i)^n e^{ikr}
    far = SpectralField(nmax, "farfield", kappa)
    far.coeffs[0] = scattered.coeffs[0] * (-1j) ** (deg + 1) / kappa
    far.coeffs[1] = scattered.coeffs[1] * (-1j) ** deg / kappa

    H_inc = magnetic_partner(incident, medium.eps_inf, medium.mu_inf)
    result = ScatterResult(
        omega=omega, medium=medium, incident=incident, scattered=scattered,
        far_field=far, s_te=s_te, s_tm=s_tm,
        farfield_norm=far.norm(),
        e_hcurl=field_norm(incident, medium.outer_radius, "hcurl"),
        h_hcurl=field_norm(H_inc, medium.outer_radius, "hcurl"))
    return result


def scattered_field_at(result: ScatterResult, points):
    """(E_s, H_s) at exterior Cartesian points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    r = np.linalg.norm(pts, axis=1)
    if np.any(r <= result.medium.outer_radius):
        raise ValueError("evaluation points must lie outside the outermost layer")
    E = evaluate_volume(result.scattered, pts)
    Hfield = magnetic_partner(result.scattered, result.medium.eps_inf,
                              result.medium.mu_inf)
    H = evaluate_volume(Hfield, pts)
    if np.ndim(points) == 1:
        return E[0], H[0]
    return E, H


def farfield_at(result: ScatterResult, theta, phi) -> np.ndarray:
    """Electric far-field pattern at directions."""
    return evaluate_tangential(result.far_field, theta, phi)


def magnetic_farfield_at(result: ScatterResult, theta, phi) -> np.ndarray:
    """H_inf = xhat x E_inf (impedance-normalised magnetic pattern)."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    E = evaluate_tangential(result.far_field, theta, phi)
    st = np.sin(theta)
    xhat = np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)
    return np.cross(xhat, E)


def scatter_result_to_json(result: ScatterResult) -> str:
    modes = [{"n": mode.n, "m": mode.m, "pol": mode.pol,
              "re": c.real, "im": c.imag}
             for mode, c in result.far_field.active_modes()]
    s_entries = [{"n": n, "pol": pol, "re": s.real, "im": s.imag}
                 for pol, arr in (("TE", result.s_te), ("TM", result.s_tm))
                 for n, s in enumerate(arr) if n >= 1 and s != 0]
    return json.dumps({
        "omega": result.omega,
        "kappa": result.kappa,
        "farfield_norm": result.farfield_norm,
        "incident_e_hcurl": result.e_hcurl,
        "incident_h_hcurl": result.h_hcurl,
        "mie_coefficients": s_entries,
        "farfield_modes": modes,
    }, indent=2)


def farfield_csv(result: ScatterResult, degree: int = 24) -> str:
    """Far-field samples on a quadrature grid: theta,phi,ReE1,ImE1,..."""
    quad = sphere_quadrature(degree)
    vals = farfield_at(result, quad.thetas, quad.phis)
    lines = ["theta,phi,ReE1,ImE1,ReE2,ImE2,ReE3,ImE3"]
    for i in range(quad.n_nodes):
        row = [f"{quad.thetas[i]:.17g}", f"{quad.phis[i]:.17g}"]
        for c in range(3):
            row.append(f"{vals[i, c].real:.17g}")
            row.append(f"{vals[i, c].imag:.17g}")
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
