"""Command line driver.

Subcommands
-----------
eigen         list interior cavity eigenvalues of a ball
transmission  list interior transmission eigenvalues + non-transparency report
fit           fit a Herglotz density to an interior eigenfunction
scatter       single forward solve from a sweep config
sweep-tau     shell-strength scaling sweep
sweep-eps     design-accuracy scaling sweep
check         run a quick invariant suite

Exit codes: 0 success, 2 config error, 3 numerical failure,
4 hypothesis violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .eigenmodes import (BallGeometry, eigen_table_csv, eigenfunction_coefficients,
                         pec_eigenvalues, pmc_eigenvalues)
from .errors import ConfigError, HypothesisError, NonScatterError, NumericalError
from .harmonics import SpectralField, l2_norm_s2, sphere_quadrature, vsh_table
from .herglotz import density_to_json, fit_density
from .mie import LayeredMedium, mie_coefficients, scatter_result_to_json, solve_farfield
from .sweeps import (SweepConfig, emit_report, run_eps_sweep, run_tau_sweep)
from .transmission import (ite_table_csv, nontransparency_norm,
                           pec_pmc_exclusion_check, transmission_eigenvalues)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonscatter",
        description="Layered-sphere scattering and nearly non-scattering wave design")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigen", help="interior cavity eigenvalues of a ball")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--omega-max", type=float, default=10.0)
    p.add_argument("--family", choices=("pec", "pmc", "both"), default="both")
    p.add_argument("--csv", metavar="PATH", help="write the table as CSV")

    p = sub.add_parser("transmission",
                       help="interior transmission eigenvalues + hypothesis report")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--eps-b", type=float, required=True)
    p.add_argument("--mu-b", type=float, default=1.0)
    p.add_argument("--eps-inf", type=float, default=1.0)
    p.add_argument("--mu-inf", type=float, default=1.0)
    p.add_argument("--omega-max", type=float, default=None)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--csv", metavar="PATH")

    p = sub.add_parser("fit", help="Herglotz fit report for an eigenfunction")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--family", default="PEC-TE",
                   choices=("PEC-TE", "PEC-TM", "PMC-TE", "PMC-TM"))
    p.add_argument("--index", type=int, default=1)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--truncation", type=int, default=8)
    p.add_argument("--lam", type=float, default=0.0)
    p.add_argument("--norm", choices=("h1", "hcurl"), default="h1")
    p.add_argument("--json-out", metavar="PATH", help="write the density as JSON")

    for name, help_ in (("scatter", "single forward solve from a config"),
                        ("sweep-tau", "shell-strength scaling sweep"),
                        ("sweep-eps", "design-accuracy scaling sweep")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, metavar="PATH")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", metavar="PATH",
                       help="output path (default: config 'output' or stdout)")

    sub.add_parser("check", help="run the quick invariant suite")
    return parser


def _load_config(path: str) -> SweepConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return SweepConfig.from_json(text)


def _cmd_eigen(args) -> int:
    geom = BallGeometry(args.radius, args.epsilon, args.mu)
    records = []
    if args.family in ("pec", "both"):
        records += pec_eigenvalues(geom, args.omega_max)
    if args.family in ("pmc", "both"):
        records += pmc_eigenvalues(geom, args.omega_max)
    records.sort(key=lambda r: (r.omega, r.n, r.family))
    table = eigen_table_csv(records)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(table)
        print(f"wrote {len(records)} records to {args.csv}")
    else:
        print(table, end="")
    return 0


def _cmd_transmission(args) -> int:
    ball = BallGeometry(args.radius, args.eps_b, args.mu_b)
    window = None if args.omega_max is None else (0.0, args.omega_max)
    records = transmission_eigenvalues(ball, args.eps_inf, args.mu_inf,
                                       omega_window=window, n_max=args.n_max)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(ite_table_csv(records))
    print(f"# {len(records)} transmission eigenvalues "
          f"(radius={args.radius}, eps_b={args.eps_b}, mu_b={args.mu_b})")
    print("omega            n  pol  excluded  nontransparency")
    for r in records:
        excl = pec_pmc_exclusion_check(ball, r.omega, args.n_max)
        if excl.ok:
            ntp = nontransparency_norm(ball, args.eps_inf, args.mu_inf,
                                       r.omega, args.n_max)
            note = f"{'yes':8s}  {ntp.norm:.6g} (n={ntp.attaining_n} {ntp.attaining_pol})"
        else:
            note = f"{'no':8s}  refused (margin {excl.min_margin:.2e})"
        print(f"{r.omega:<15.10g}  {r.n}  {r.pol:3s}  {note}")
    return 0


def _cmd_fit(args) -> int:
    geom = BallGeometry(args.radius, args.epsilon, args.mu)
    solver = pec_eigenvalues if args.family.startswith("PEC") else pmc_eigenvalues
    omega_max = (args.index + 3) * math.pi / (geom.radius * geom.refractive_index)
    recs = [r for r in solver(geom, omega_max) if r.family == args.family]
    if len(recs) < args.index:
        raise ConfigError(f"fewer than {args.index} {args.family} records below "
                          f"omega={omega_max:g}")
    rec = recs[args.index - 1]
    E, _ = eigenfunction_coefficients(rec, args.m, geom, nmax=args.truncation)
    report = fit_density(E, args.epsilon, args.mu, args.radius,
                         norm_kind=args.norm, lam=args.lam)
    print(f"eigenvalue      : omega={rec.omega:.12g} ({rec.family}, n={rec.n}, "
          f"multiplicity={rec.multiplicity})")
    print(f"fit norm        : {report.norm_kind}")
    print(f"regularization  : {report.regularization:g}")
    print(f"truncation      : {report.truncation}")
    print(f"achieved eps    : {report.achieved_eps:.6e}")
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            fh.write(density_to_json(report.density))
        print(f"density written : {args.json_out}")
    return 0


def _cmd_scatter(args) -> int:
    config = _load_config(args.config)
    from .sweeps import _build_medium, _resolve_design  # single-solve reuse
    omega, density, _, meta = _resolve_design(config)
    tau = config.tau_grid[0] if (config.scenario.startswith("coated")
                                 and config.tau_grid) else None
    medium = _build_medium(config, tau)
    result = solve_farfield(density, medium, omega)
    payload = scatter_result_to_json(result)
    out = args.out or config.output
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload)
        print(f"wrote {out}")
    else:
        print(payload)
    return 0


def _cmd_sweep(args, runner) -> int:
    config = _load_config(args.config)
    table = runner(config)
    out = args.out or config.output
    if out:
        emit_report(table, args.format, out)
        print(f"wrote {out}")
    else:
        print(table.to_csv() if args.format == "csv" else table.to_json(), end="")
    return 0


def _cmd_check(_args) -> int:
    from . import specfun

    failures = []

    def check(name, ok):
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        if not ok:
            failures.append(name)

    x = 2.0
    w = (specfun.sph_bessel_j(5, x) * specfun.sph_bessel_y_d(5, x)
         - specfun.sph_bessel_j_d(5, x) * specfun.sph_bessel_y(5, x))
    check("wronskian j5/y5 at x=2", abs(w - 1 / x**2) * x**2 < 1e-12)

    z = 1.7 + 0.3j
    lhs = 11 * specfun.sph_bessel_j(5, z) / z
    rhs = specfun.sph_bessel_j(4, z) + specfun.sph_bessel_j(6, z)
    check("three-term recurrence at n=5", abs(lhs - rhs) / abs(rhs) < 1e-12)

    med = LayeredMedium.homogeneous_ball(1.0, 1.0, 1.0)
    check("host-identical medium scatters nothing",
          abs(mie_coefficients(med, 3.1, 1, "TE")) < 1e-13)

    med = LayeredMedium.homogeneous_ball(1.0, 4.0, 1.0)
    s = mie_coefficients(med, 2.7, 2, "TM")
    check("lossless unitarity |1+2s|=1", abs(abs(1 + 2 * s) - 1) < 1e-10)

    quad = sphere_quadrature(16)
    f = SpectralField(4, "farfield", 1.0)
    f.set(3, 1, "TE", 0.7 - 0.2j)
    f.set(2, -2, "TM", 0.1 + 0.9j)
    U, V, _ = vsh_table(4, quad.thetas, quad.phis)
    vals = (np.einsum("i,ikc->kc", f.coeffs[0], V)
            + np.einsum("i,ikc->kc", f.coeffs[1], U))
    check("parseval on S^2", abs(l2_norm_s2(vals, quad) - f.norm()) < 1e-10)

    geom = BallGeometry(1.0, 1.0, 1.0)
    recs = [r for r in pec_eigenvalues(geom, 6.0) if r.family == "PEC-TE"]
    check("first TE cavity eigenvalue is the first j1 zero",
          recs and abs(recs[0].omega - 4.493409457909064) < 1e-9)

    cfg = SweepConfig(scenario="coated-pec", r_sigma=0.5, r_omega=1.0,
                      eps_b=2.0, sigma_b=0.5, eigen_family="PEC-TE",
                      tau_grid=[1e-1, 1e-2], truncation=3, seed=1)
    check("tau sweep determinism",
          run_tau_sweep(cfg).to_csv() == run_tau_sweep(cfg).to_csv())

    return 3 if failures else 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "eigen":
            return _cmd_eigen(args)
        if args.command == "transmission":
            return _cmd_transmission(args)
        if args.command == "fit":
            return _cmd_fit(args)
        if args.command == "scatter":
            return _cmd_scatter(args)
        if args.command == "sweep-tau":
            return _cmd_sweep(args, run_tau_sweep)
        if args.command == "sweep-eps":
            return _cmd_sweep(args, run_eps_sweep)
        if args.command == "check":
            return _cmd_check(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except HypothesisError as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return 4
    except (NumericalError, NonScatterError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
