"""Scaling experiments: shell-strength (tau) and design-accuracy (eps) sweeps.

Each sweep fixes an incident design -- the Herglotz density reproducing an
interior eigenfunction of the relevant ball, optionally perturbed at a
calibrated pair-norm distance eps -- and records the far-field norm together
with the incident H(curl) norms over the outer ball.  The certified quantity
per row is::

    bound_rhs = tau^{1/2} (||E_a|| + ||H_a||) + eps
    ratio     = farfield_norm / bound_rhs

For coated scenarios the perturbation distance is measured in the H^1 pair
norm, for the uncoated transmission scenario in the H(curl) pair norm; the
table metadata records which one was used.  Rows are independent, failures
are recorded per row, and identical configurations produce byte-identical
CSV output.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import warnings
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from .eigenmodes import (BallGeometry, FAMILIES, eigenfunction_coefficients,
                         pec_eigenvalues, pmc_eigenvalues)
from .errors import ConfigError, HypothesisError, NonScatterError
from .harmonics import SpectralField
from .herglotz import fit_density, perturb_density
from .mie import CoatingSpec, Layer, LayeredMedium, solve_farfield
from .transmission import (nontransparency_norm, pec_pmc_exclusion_check,
                           transmission_eigenvalues)

SCENARIOS = ("coated-pec", "coated-pmc", "transmission")

CSV_COLUMNS = ("tau", "eps", "farfield_norm", "E_hcurl", "H_hcurl",
               "bound_rhs", "ratio", "status")


@dataclass
class SweepConfig:
    scenario: str
    r_sigma: float
    r_omega: float | None = None
    eps_b: float = 1.0
    mu_b: float = 1.0
    sigma_b: float = 0.0
    eps_c: float = 1.0
    mu_c: float = 1.0
    sigma_c: float = 1.0
    eps_inf: float = 1.0
    mu_inf: float = 1.0
    eigen_family: str = "PEC-TE"
    eigen_index: int = 1
    mode_m: int = 0
    tau_grid: list = field(default_factory=list)
    eps_grid: list = field(default_factory=list)
    truncation: int = 8
    seed: int = 0
    output: str | None = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}, "
                              f"got {self.scenario!r}")
        if not (self.r_sigma > 0):
            raise ConfigError("r_sigma must be positive")
        if self.scenario.startswith("coated"):
            if self.r_omega is None or not (self.r_omega > self.r_sigma):
                raise ConfigError("coated scenarios require r_sigma < r_omega")
            want = "PEC-" if self.scenario == "coated-pec" else "PMC-"
            if self.eigen_family not in FAMILIES or not self.eigen_family.startswith(want):
                raise ConfigError(
                    f"eigen_family for {self.scenario} must start with {want!r}")
        else:
            if self.eigen_family not in ("TE", "TM"):
                raise ConfigError(
                    "transmission scenario takes eigen_family 'TE' or 'TM'")
            if self.sigma_b != 0:
                raise ConfigError("transmission scenario requires sigma_b = 0")
        for name in ("eps_b", "mu_b", "eps_c", "mu_c", "eps_inf", "mu_inf"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.sigma_b < 0 or self.sigma_c < 0:
            raise ConfigError("conductivities must be nonnegative")
        for name in ("tau_grid", "eps_grid"):
            grid = list(getattr(self, name))
            setattr(self, name, grid)
            if any(not (g > 0) for g in grid):
                raise ConfigError(f"{name} entries must be positive")
            if any(b >= a for a, b in zip(grid, grid[1:])):
                raise ConfigError(f"{name} must be sorted descending")
        if self.eigen_index < 1:
            raise ConfigError("eigen_index must be >= 1")
        if self.truncation < 1:
            raise ConfigError("truncation must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"scenario", "r_sigma"} - set(data)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json(cls, text: str) -> "SweepConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config JSON must be an object")
        return cls.from_dict(data)

    def digest(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()


@dataclass(frozen=True)
class SweepRow:
    tau: float
    eps: float
    farfield_norm: float
    e_hcurl: float
    h_hcurl: float
    bound_rhs: float
    ratio: float
    status: str


@dataclass
class SweepTable:
    rows: list
    metadata: dict

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            writer.writerow([_fmt(r.tau), _fmt(r.eps), _fmt(r.farfield_norm),
                             _fmt(r.e_hcurl), _fmt(r.h_hcurl),
                             _fmt(r.bound_rhs), _fmt(r.ratio), r.status])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({
            "metadata": self.metadata,
            "columns": list(CSV_COLUMNS),
            "rows": [asdict(r) for r in self.rows],
        }, indent=2, allow_nan=True)

    def column(self, name: str) -> np.ndarray:
        if name == "status":
            raise ValueError("status is not numeric")
        return np.array([getattr(r, _COLUMN_ATTR[name]) for r in self.rows])


_COLUMN_ATTR = {"tau": "tau", "eps": "eps", "farfield_norm": "farfield_norm",
                "E_hcurl": "e_hcurl", "H_hcurl": "h_hcurl",
                "bound_rhs": "bound_rhs", "ratio": "ratio"}


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def table_from_csv(text: str) -> SweepTable:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header!r}")
    rows = []
    for rec in reader:
        vals = [float(v) for v in rec[:7]]
        rows.append(SweepRow(*vals, status=rec[7]))
    return SweepTable(rows=rows, metadata={})


# ---------------------------------------------------------------------------
# Incident design resolution
# ---------------------------------------------------------------------------

def _find_eigen_record(geom: BallGeometry, family: str, index: int):
    omega_max = (index + 3) * math.pi / (geom.radius * geom.refractive_index)
    solver = pec_eigenvalues if family.startswith("PEC") else pmc_eigenvalues
    for _ in range(8):
        recs = [r for r in solver(geom, omega_max) if r.family == family]
        if len(recs) >= index:
            return recs[index - 1]
        omega_max *= 2
    raise ConfigError(f"could not locate {family} record #{index}")


def _resolve_design(config: SweepConfig):
    """omega, base density, norm kind and metadata for the configured incident."""
    meta: dict = {"scenario": config.scenario,
                  "eigen_family": config.eigen_family,
                  "eigen_index": config.eigen_index,
                  "mode_m": config.mode_m}
    if config.scenario.startswith("coated"):
        norm_kind = "h1"
        outer = BallGeometry(config.r_omega, config.eps_inf, config.mu_inf)
        rec = _find_eigen_record(outer, config.eigen_family, config.eigen_index)
        if config.truncation < rec.n:
            raise ConfigError(f"truncation {config.truncation} below eigen degree {rec.n}")
        E, _ = eigenfunction_coefficients(rec, config.mode_m, outer,
                                          nmax=config.truncation)
        fit = fit_density(E, config.eps_inf, config.mu_inf, config.r_omega,
                          norm_kind=norm_kind, lam=0.0)
        meta.update(omega=rec.omega, eigen_n=rec.n,
                    fit_achieved_eps=fit.achieved_eps)
        return rec.omega, fit.density, norm_kind, meta

    norm_kind = "hcurl"
    ball = BallGeometry(config.r_sigma, config.eps_b, config.mu_b)
    recs = [r for r in transmission_eigenvalues(
        ball, config.eps_inf, config.mu_inf, n_max=config.truncation)
        if r.pol == config.eigen_family]
    if len(recs) < config.eigen_index:
        raise ConfigError(
            f"only {len(recs)} {config.eigen_family} transmission eigenvalues "
            f"in the default window; requested #{config.eigen_index}")
    rec = recs[config.eigen_index - 1]
    excl = pec_pmc_exclusion_check(ball, rec.omega, config.truncation)
    if not excl.ok:
        raise HypothesisError(
            f"omega={rec.omega:g} fails the interior-eigenvalue exclusion "
            f"(margin {excl.min_margin:.2e})")
    ntp = nontransparency_norm(ball, config.eps_inf, config.mu_inf,
                               rec.omega, config.truncation)
    _, U = rec.fields(config.mode_m, nmax=config.truncation)
    fit = fit_density(U, config.eps_inf, config.mu_inf, config.r_sigma,
                      norm_kind=norm_kind, lam=0.0)
    meta.update(omega=rec.omega, eigen_n=rec.n,
                fit_achieved_eps=fit.achieved_eps,
                exclusion_margin=excl.min_margin,
                nontransparency_norm=ntp.norm,
                nontransparency_attained=(ntp.attaining_n, ntp.attaining_pol),
                nontransparency_tail=ntp.tail_estimate)
    return rec.omega, fit.density, norm_kind, meta


def _build_medium(config: SweepConfig, tau: float | None) -> LayeredMedium:
    core = Layer(config.r_sigma, config.eps_b, config.mu_b, config.sigma_b)
    if config.scenario == "transmission" or tau is None:
        return LayeredMedium((core,), config.eps_inf, config.mu_inf)
    regime = "pec" if config.scenario == "coated-pec" else "pmc"
    coating = CoatingSpec(tau, config.eps_c, config.mu_c, config.sigma_c, regime)
    return LayeredMedium.coated_ball(core, coating, config.r_omega,
                                     config.eps_inf, config.mu_inf)


def _norm_radius(config: SweepConfig) -> float:
    return config.r_omega if config.scenario.startswith("coated") else config.r_sigma


def _row(config: SweepConfig, omega: float, density: SpectralField,
         tau_col: float, eps_col: float, tau_medium: float | None) -> SweepRow:
    try:
        medium = _build_medium(config, tau_medium)
        res = solve_farfield(density, medium, omega)
        bound = math.sqrt(tau_col) * (res.e_hcurl + res.h_hcurl) + eps_col
        if bound > 0:
            ratio = res.farfield_norm / bound
        else:
            ratio = 0.0 if res.farfield_norm == 0 else float("inf")
        return SweepRow(tau=tau_col, eps=eps_col,
                        farfield_norm=res.farfield_norm,
                        e_hcurl=res.e_hcurl, h_hcurl=res.h_hcurl,
                        bound_rhs=bound, ratio=ratio, status="ok")
    except NonScatterError as exc:
        nan = float("nan")
        return SweepRow(tau=tau_col, eps=eps_col, farfield_norm=nan,
                        e_hcurl=nan, h_hcurl=nan, bound_rhs=nan, ratio=nan,
                        status=f"error: {exc}")


def run_tau_sweep(config: SweepConfig) -> SweepTable:
    """Sweep the shell strength tau at fixed design accuracy eps.

    eps is the first entry of ``eps_grid`` (0 when the grid is empty, i.e.
    the exact eigen density).
    """
    if not config.scenario.startswith("coated"):
        raise ConfigError("tau sweeps require a coated scenario")
    if not config.tau_grid:
        raise ConfigError("tau sweep requires a nonempty tau_grid")
    omega, base, norm_kind, meta = _resolve_design(config)
    eps_fixed = config.eps_grid[0] if config.eps_grid else 0.0
    density = perturb_density(base, eps_fixed, config.seed, config.eps_inf,
                              config.mu_inf, _norm_radius(config), norm_kind)
    rows = [_row(config, omega, density, tau, eps_fixed, tau)
            for tau in config.tau_grid]
    meta.update(sweep="tau", eps_fixed=eps_fixed, norm_kind=norm_kind,
                config_digest=config.digest(), version=__version__)
    return SweepTable(rows=rows, metadata=meta)


def run_eps_sweep(config: SweepConfig) -> SweepTable:
    """Sweep the design accuracy eps at fixed medium.

    Coated scenarios use the first ``tau_grid`` entry for the shell; the
    transmission scenario has no shell and its bound reduces to C eps.
    """
    if not config.eps_grid:
        raise ConfigError("eps sweep requires a nonempty eps_grid")
    if config.scenario.startswith("coated") and not config.tau_grid:
        raise ConfigError("coated eps sweep requires tau_grid[0] for the shell")
    omega, base, norm_kind, meta = _resolve_design(config)
    if config.scenario == "transmission":
        tau_medium, tau_col = None, 0.0
    else:
        tau_medium = tau_col = config.tau_grid[0]
    rows = []
    for eps in config.eps_grid:
        density = perturb_density(base, eps, config.seed, config.eps_inf,
                                  config.mu_inf, _norm_radius(config), norm_kind)
        rows.append(_row(config, omega, density, tau_col, eps, tau_medium))
    meta.update(sweep="eps", tau_fixed=tau_col, norm_kind=norm_kind,
                config_digest=config.digest(), version=__version__)
    return SweepTable(rows=rows, metadata=meta)


def fit_loglog(table: SweepTable, x_column: str, y_column: str):
    """Least squares on (log x, log y) over usable rows: (slope, intercept, r^2)."""
    xs, ys = [], []
    for r in table.rows:
        if r.status != "ok":
            continue
        x = getattr(r, _COLUMN_ATTR[x_column])
        y = getattr(r, _COLUMN_ATTR[y_column])
        if x > 0 and y > 0 and math.isfinite(x) and math.isfinite(y):
            xs.append(math.log(x))
            ys.append(math.log(y))
        else:
            warnings.warn(f"excluding nonpositive row (x={x!r}, y={y!r}) "
                          "from log-log fit", stacklevel=2)
    if len(xs) < 3:
        raise ValueError(f"log-log fit needs >= 3 usable rows, got {len(xs)}")
    xs, ys = np.array(xs), np.array(ys)
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def emit_report(table: SweepTable, fmt: str, path: str) -> str:
    """Write the table as csv or json; identical tables give identical bytes."""
    if fmt == "csv":
        payload = table.to_csv()
    elif fmt == "json":
        payload = table.to_json()
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(payload)
    return path
