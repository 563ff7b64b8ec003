import json
import math

import numpy as np
import pytest

from nonscatter import sweeps
from nonscatter.errors import ConfigError
from nonscatter.sweeps import (SweepConfig, SweepRow, SweepTable, emit_report,
                               fit_loglog, run_eps_sweep, run_tau_sweep,
                               table_from_csv)


def _pec_config(**over):
    base = dict(scenario="coated-pec", r_sigma=0.5, r_omega=1.0,
                eps_b=2.0, mu_b=1.0, sigma_b=0.5,
                eps_c=1.0, mu_c=1.0, sigma_c=1.0,
                eigen_family="PEC-TE", eigen_index=1, mode_m=0,
                tau_grid=[1e-1, 1e-2], eps_grid=[], truncation=3, seed=11)
    base.update(over)
    return SweepConfig(**base)


def _transmission_config(**over):
    base = dict(scenario="transmission", r_sigma=1.0,
                eps_b=4.0, mu_b=1.0, sigma_b=0.0,
                eigen_family="TE", eigen_index=1, mode_m=0,
                eps_grid=[1e-1, 1e-2, 1e-3], truncation=5, seed=2)
    base.update(over)
    return SweepConfig(**base)


class TestConfig:
    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError, match="unknown config keys"):
            SweepConfig.from_dict({"scenario": "coated-pec", "r_sigma": 0.5,
                                   "r_omega": 1.0, "frobnicate": 3})

    def test_missing_required_keys(self):
        with pytest.raises(ConfigError, match="missing config keys"):
            SweepConfig.from_dict({"scenario": "coated-pec"})

    def test_invalid_json(self):
        with pytest.raises(ConfigError, match="valid JSON"):
            SweepConfig.from_json("{not json")

    def test_grid_ordering_enforced(self):
        with pytest.raises(ConfigError, match="descending"):
            _pec_config(tau_grid=[1e-2, 1e-1])
        with pytest.raises(ConfigError, match="positive"):
            _pec_config(tau_grid=[1e-1, 0.0])

    def test_geometry_validation(self):
        with pytest.raises(ConfigError, match="r_sigma < r_omega"):
            _pec_config(r_omega=0.4)

    def test_family_scenario_consistency(self):
        with pytest.raises(ConfigError, match="PEC-"):
            _pec_config(eigen_family="PMC-TE")
        with pytest.raises(ConfigError, match="'TE' or 'TM'"):
            _transmission_config(eigen_family="PEC-TE")

    def test_transmission_requires_lossless_core(self):
        with pytest.raises(ConfigError, match="sigma_b"):
            _transmission_config(sigma_b=0.5)

    def test_digest_changes_iff_config_changes(self):
        c1 = _pec_config()
        c2 = _pec_config()
        c3 = _pec_config(seed=12)
        assert c1.digest() == c2.digest()
        assert c1.digest() != c3.digest()


class TestFitLoglog:
    def _table(self, xs, ys):
        rows = [SweepRow(tau=x, eps=0.0, farfield_norm=y, e_hcurl=1.0,
                         h_hcurl=1.0, bound_rhs=1.0, ratio=y, status="ok")
                for x, y in zip(xs, ys)]
        return SweepTable(rows=rows, metadata={})

    def test_exact_power_law(self):
        xs = np.array([1e-1, 1e-2, 1e-3, 1e-4])
        table = self._table(xs, 3.0 * xs**0.5)
        slope, intercept, r2 = fit_loglog(table, "tau", "farfield_norm")
        assert slope == pytest.approx(0.5, abs=1e-12)
        assert math.exp(intercept) == pytest.approx(3.0, rel=1e-12)
        assert r2 == pytest.approx(1.0, abs=1e-12)

    def test_constant_column(self):
        xs = np.array([1e-1, 1e-2, 1e-3])
        slope, _, _ = fit_loglog(self._table(xs, np.full(3, 2.0)), "tau",
                                 "farfield_norm")
        assert slope == pytest.approx(0.0, abs=1e-12)

    def test_nonpositive_excluded_with_warning(self):
        xs = np.array([1e-1, 1e-2, 1e-3, 1e-4])
        table = self._table(xs, [1.0, 0.0, 0.5, 0.25])
        with pytest.warns(UserWarning, match="nonpositive"):
            slope, _, _ = fit_loglog(table, "tau", "farfield_norm")

    def test_too_few_rows(self):
        xs = np.array([1e-1, 1e-2])
        with pytest.raises(ValueError, match=">= 3"):
            fit_loglog(self._table(xs, [1.0, 0.5]), "tau", "farfield_norm")


class TestTauSweep:
    def test_rows_follow_grid(self):
        cfg = _pec_config()
        table = run_tau_sweep(cfg)
        assert [r.tau for r in table.rows] == cfg.tau_grid
        assert all(r.status == "ok" for r in table.rows)
        assert all(np.isfinite(r.ratio) for r in table.rows)
        assert table.metadata["omega"] == pytest.approx(4.493409457909064)

    def test_bound_rhs_definition(self):
        table = run_tau_sweep(_pec_config())
        for r in table.rows:
            expected = math.sqrt(r.tau) * (r.e_hcurl + r.h_hcurl) + r.eps
            assert r.bound_rhs == pytest.approx(expected, rel=1e-14)
            assert r.ratio == pytest.approx(r.farfield_norm / expected, rel=1e-14)

    def test_row_independence_under_permutation(self):
        t1 = run_tau_sweep(_pec_config(tau_grid=[1e-1, 1e-2, 1e-3]))
        t2 = run_tau_sweep(_pec_config(tau_grid=[1e-1, 1e-3]))
        # shared tau values give identical rows regardless of the grid
        assert t1.rows[0] == t2.rows[0]
        assert t1.rows[2] == t2.rows[1]

    def test_host_identical_medium_row_is_zero(self):
        cfg = _pec_config(eps_b=1.0, mu_b=1.0, sigma_b=0.0, sigma_c=0.0,
                          tau_grid=[1.0])
        table = run_tau_sweep(cfg)
        assert table.rows[0].farfield_norm < 1e-13

    def test_determinism_bytes(self):
        cfg = _pec_config()
        assert run_tau_sweep(cfg).to_csv() == run_tau_sweep(cfg).to_csv()

    def test_requires_coated_scenario(self):
        with pytest.raises(ConfigError, match="coated"):
            run_tau_sweep(_transmission_config(tau_grid=[1e-1]))

    def test_error_rows_recorded_not_dropped(self, monkeypatch):
        from nonscatter.errors import NumericalError
        import nonscatter.sweeps as sw
        real = sw.solve_farfield
        calls = {"n": 0}

        def flaky(a, medium, omega):
            calls["n"] += 1
            if calls["n"] == 2:
                raise NumericalError("synthetic failure")
            return real(a, medium, omega)

        monkeypatch.setattr(sw, "solve_farfield", flaky)
        table = run_tau_sweep(_pec_config(tau_grid=[1e-1, 1e-2, 1e-3]))
        statuses = [r.status for r in table.rows]
        assert statuses[0] == "ok" and statuses[2] == "ok"
        assert "synthetic failure" in statuses[1]
        assert math.isnan(table.rows[1].farfield_norm)


class TestEpsSweep:
    def test_transmission_linearity(self):
        table = run_eps_sweep(_transmission_config())
        ratios = [r.ratio for r in table.rows]
        # farfield is exactly linear in eps at fixed seed
        assert max(ratios) / min(ratios) < 1.0 + 1e-9
        assert table.metadata["nontransparency_norm"] == pytest.approx(
            13.300451188307362, rel=1e-6)

    def test_eps_doubling_doubles_farfield(self):
        cfg = _transmission_config(eps_grid=[2e-2, 1e-2])
        table = run_eps_sweep(cfg)
        assert table.rows[0].farfield_norm == pytest.approx(
            2 * table.rows[1].farfield_norm, rel=1e-9)

    def test_seed_independence_at_zero_eps(self):
        # the base density is seed independent; eps enters only via perturbation
        t1 = run_eps_sweep(_transmission_config(seed=1, eps_grid=[1e-9]))
        t2 = run_eps_sweep(_transmission_config(seed=2, eps_grid=[1e-9]))
        assert t1.metadata["omega"] == t2.metadata["omega"]
        assert t1.metadata["fit_achieved_eps"] == t2.metadata["fit_achieved_eps"]

    def test_coated_eps_sweep_uses_first_tau(self):
        cfg = _pec_config(eps_grid=[1e-1, 1e-2], tau_grid=[1e-3])
        table = run_eps_sweep(cfg)
        assert all(r.tau == 1e-3 for r in table.rows)
        assert table.metadata["tau_fixed"] == 1e-3

    def test_norm_kind_recorded(self):
        assert run_eps_sweep(_transmission_config()).metadata["norm_kind"] == "hcurl"
        assert run_tau_sweep(_pec_config()).metadata["norm_kind"] == "h1"


class TestReports:
    def test_csv_round_trip(self):
        table = run_tau_sweep(_pec_config())
        back = table_from_csv(table.to_csv())
        assert back.rows == table.rows

    def test_csv_emission(self, tmp_path):
        table = run_tau_sweep(_pec_config())
        path = tmp_path / "out.csv"
        emit_report(table, "csv", str(path))
        assert path.read_text() == table.to_csv()

    def test_json_schema_validation(self, tmp_path):
        jsonschema = pytest.importorskip("jsonschema")
        import importlib.resources as res
        table = run_eps_sweep(_transmission_config())
        payload = json.loads(table.to_json())
        schema = json.loads(
            res.files("nonscatter").joinpath("schemas/sweep_table.schema.json")
            .read_text())
        jsonschema.validate(payload, schema)

    def test_bad_format_rejected(self, tmp_path):
        table = run_tau_sweep(_pec_config())
        with pytest.raises(ValueError, match="format"):
            emit_report(table, "xml", str(tmp_path / "x"))
