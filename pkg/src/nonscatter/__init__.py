"""Layered-sphere Maxwell scattering and nearly non-scattering wave design.

The package computes, for radially layered electromagnetic media:

* interior cavity eigenvalues of conducting-wall balls (``eigenmodes``),
* entire incident waves as plane-wave superpositions with tangential
  kernels, fitted to interior eigenfields (``herglotz``),
* per-mode scattering coefficients and far-field patterns (``mie``),
* interior transmission eigenvalues and boundary impedance symbols
  (``transmission``),
* scaling sweeps that certify the far-field smallness of the designed
  incident waves (``sweeps``), driven from a CLI (``cli``).

All operations are pure functions of their inputs and safe to call
concurrently; quadratures and spectral containers are immutable once built.
"""

__version__ = "0.1.0"

from .eigenmodes import (BallGeometry, EigenRecord, eigenfunction_coefficients,
                         pec_eigenvalues, pmc_eigenvalues, sobolev_norms)
from .errors import ConfigError, HypothesisError, NonScatterError, NumericalError
from .harmonics import (Direction, Mode, SpectralField, sphere_quadrature,
                        vector_wave_M, vector_wave_N, vsh_eval)
from .herglotz import (FitReport, density_from_json, density_to_json,
                       density_to_interior_spectral, eval_pair_quadrature,
                       fit_density, perturb_density)
from .mie import (CoatingSpec, Layer, LayeredMedium, ScatterResult,
                  effective_wavenumber, mie_coefficients, scattered_field_at,
                  solve_farfield)
from .sweeps import (SweepConfig, SweepTable, emit_report, fit_loglog,
                     run_eps_sweep, run_tau_sweep)
from .transmission import (exterior_impedance_symbol, interior_impedance_symbol,
                           nontransparency_norm, pec_pmc_exclusion_check,
                           transmission_eigenvalues)

__all__ = [
    "BallGeometry", "CoatingSpec", "ConfigError", "Direction", "EigenRecord",
    "FitReport", "HypothesisError", "Layer", "LayeredMedium", "Mode",
    "NonScatterError", "NumericalError", "ScatterResult", "SpectralField",
    "SweepConfig", "SweepTable", "density_from_json", "density_to_json",
    "density_to_interior_spectral", "effective_wavenumber",
    "eigenfunction_coefficients", "emit_report", "eval_pair_quadrature",
    "exterior_impedance_symbol", "fit_density", "fit_loglog",
    "interior_impedance_symbol", "mie_coefficients", "nontransparency_norm",
    "pec_eigenvalues", "pec_pmc_exclusion_check", "perturb_density",
    "pmc_eigenvalues", "run_eps_sweep", "run_tau_sweep", "scattered_field_at",
    "sobolev_norms", "solve_farfield", "sphere_quadrature",
    "transmission_eigenvalues", "vector_wave_M", "vector_wave_N", "vsh_eval",
]
