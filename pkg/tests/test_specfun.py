import cmath
import math

import numpy as np
import pytest

from nonscatter import specfun as sf
from conftest import (bisect_root, mp_sph_h1n, mp_sph_jn, series_riccati_psi_d,
                      series_sph_jn)

# oracle-frozen roots: bisection on the independent series evaluations
J1_FIRST_ZERO = 4.493409457909064       # first positive zero of j_1
PSI1_D_FIRST_ZERO = 2.7437072699922695  # first positive zero of psi_1'


def test_j0_closed_form():
    assert sf.sph_bessel_j(0, 1.0) == pytest.approx(math.sin(1.0), abs=1e-15)


def test_j1_first_zero_matches_series_oracle():
    oracle = bisect_root(lambda x: series_sph_jn(1, x), 4.0, 5.0)
    assert oracle == pytest.approx(J1_FIRST_ZERO, abs=1e-13)
    assert abs(sf.sph_bessel_j(1, J1_FIRST_ZERO)) < 1e-14


def test_jn_at_zero():
    assert sf.sph_bessel_j(0, 0.0) == 1.0
    for n in (1, 2, 7):
        assert sf.sph_bessel_j(n, 0.0) == 0.0


def test_hankel0_closed_form():
    z = 1.3 - 0.4j
    expected = -1j * cmath.exp(1j * z) / z
    assert sf.sph_hankel1(0, z) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("n", range(0, 11))
def test_wronskian_at_2(n):
    x = 2.0
    w = (sf.sph_bessel_j(n, x) * sf.sph_bessel_y_d(n, x)
         - sf.sph_bessel_j_d(n, x) * sf.sph_bessel_y(n, x))
    assert w.real == pytest.approx(1.0 / x**2, rel=1e-12)


def test_wronskian_full_domain():
    # invariant: relative 1e-12 for n <= 40, x in [0.5, 50]
    for n in range(0, 41, 4):
        for x in np.linspace(0.5, 50.0, 23):
            w = (sf.sph_bessel_j(n, x) * sf.sph_bessel_y_d(n, x)
                 - sf.sph_bessel_j_d(n, x) * sf.sph_bessel_y(n, x))
            assert abs(w * x**2 - 1.0) < 1e-12, (n, x)


@pytest.mark.parametrize("z", [0.7, 13.0, 2.0 + 1.5j, 30.0 - 2.0j])
def test_three_term_recurrence_all_kinds(z):
    for fn in (sf.sph_bessel_j, sf.sph_bessel_y, sf.sph_hankel1):
        for n in (1, 3, 10, 25):
            lhs = (2 * n + 1) * fn(n, z) / z
            rhs = fn(n - 1, z) + fn(n + 1, z)
            assert abs(lhs - rhs) / abs(rhs) < 1e-10, (fn.__name__, n)


def test_riccati_psi1_first_derivative_zero():
    oracle = bisect_root(lambda x: series_riccati_psi_d(1, x), 2.0, 3.5)
    assert oracle == pytest.approx(PSI1_D_FIRST_ZERO, abs=1e-13)
    assert abs(sf.riccati_psi_d(1, PSI1_D_FIRST_ZERO)) < 1e-14


def test_hankel_is_j_plus_iy():
    for n in (0, 1, 4, 9):
        for z in (0.8, 3.0 + 0.2j, 12.0 - 1.0j):
            lhs = sf.sph_hankel1(n, z)
            rhs = sf.sph_bessel_j(n, z) + 1j * sf.sph_bessel_y(n, z)
            assert abs(lhs - rhs) / abs(lhs) < 1e-12


def test_degree_guard():
    with pytest.raises(ValueError, match="degree overflow"):
        sf.sph_bessel_j(61, 1.0)
    # configurable bound
    assert sf.sph_bessel_j(61, 100.0, max_degree=80) != 0


def test_argument_guard_and_nan_rejection():
    with pytest.raises(ValueError, match="argument overflow"):
        sf.sph_bessel_j(1, 1.0 + 800.0j)
    with pytest.raises(ValueError, match="finite"):
        sf.sph_bessel_j(1, complex("nan"))


def test_against_extended_precision(mp):
    cases = [(0, 1.0), (5, 2.0 + 1.0j), (40, 39.5), (40, 5.0), (10, 50.0),
             (3, 0.5), (25, 24.0), (60, 10.0 + 5.0j), (7, 2.0 - 3.0j)]
    for n, z in cases:
        ref = complex(mp_sph_jn(mp, n, z))
        mine = sf.sph_bessel_j(n, z, max_degree=60)
        assert abs(mine - ref) <= 1e-13 * abs(ref), (n, z)
    for n, z in [(5, 3.0 + 40.0j), (2, 1.0 + 10.0j), (8, 6.0 + 2.0j)]:
        ref = complex(mp_sph_h1n(mp, n, z))
        mine = sf.sph_hankel1(n, z)
        assert abs(mine - ref) <= 1e-12 * abs(ref), (n, z)


class TestLogDerivativeRatio:
    def test_closed_form_n0(self):
        x = 1.3
        assert sf.log_derivative_ratio(0, x) == pytest.approx(
            1.0 / math.tan(x), rel=1e-12)

    def test_direct_consistency(self):
        # agrees with psi'/psi wherever the direct forms are finite
        for n, z in [(2, 1.7), (6, 4.0 + 2.0j), (12, 9.0 - 1.0j), (1, 0.05)]:
            direct = sf.riccati_psi_d(n, z) / sf.riccati_psi(n, z)
            assert sf.log_derivative_ratio(n, z) == pytest.approx(direct, rel=1e-11)

    def test_extended_precision_oracle(self, mp):
        n, z = 5, 3.0 + 40.0j
        psi = mp.mpc(z) * mp_sph_jn(mp, n, z)
        dpsi = mp.mpc(z) * mp_sph_jn(mp, n - 1, z) - n * mp_sph_jn(mp, n, z)
        ref = complex(dpsi / psi)
        # frozen from the oracle:
        assert ref == pytest.approx(0.0014306883703102168 - 1.0094080899913607j,
                                    rel=1e-12)
        assert sf.log_derivative_ratio(n, z) == pytest.approx(ref, rel=1e-12)

    def test_wronskian_cross_check_via_hankel_ratio(self):
        # psi' xi - psi xi' = -i  =>  D1 - D3 = -i/(psi xi)
        n, z = 2, 3.1 + 0.7j
        d1 = sf.log_derivative_ratio(n, z)
        d3 = sf.hankel_log_derivative(n, z)
        psi, xi = sf.riccati_psi(n, z), sf.riccati_xi(n, z)
        assert d1 - d3 == pytest.approx(-1j / (psi * xi), rel=1e-11)

    def test_huge_imaginary_part(self):
        # far beyond the direct-form guard; ratio must still be finite/correct
        val = sf.log_derivative_ratio(3, 2.0 + 5000.0j)
        assert cmath.isfinite(val)
        assert val == pytest.approx(-1j, abs=1e-2)  # cot-like limit

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            sf.log_derivative_ratio(2, 0.0)


def test_hankel_log_derivative_matches_direct():
    for n, z in [(1, 2.2), (4, 1.0 + 3.0j), (9, 12.0)]:
        direct = sf.riccati_xi_d(n, z) / sf.riccati_xi(n, z)
        assert sf.hankel_log_derivative(n, z) == pytest.approx(direct, rel=1e-12)


def test_cross_ratio_direct_vs_asymptotic(mp):
    # the asymptotic branch must join the direct branch smoothly
    n = 3
    za, zb = 2.0 + 640.0j, 2.4 + 648.0j
    direct = ((mp.mpc(za) * mp_sph_jn(mp, n, za)) * (mp.mpc(zb) * mp_sph_h1n(mp, n, zb))
              / ((mp.mpc(zb) * mp_sph_jn(mp, n, zb)) * (mp.mpc(za) * mp_sph_h1n(mp, n, za))))
    mine = sf.riccati_cross_ratio(n, za, zb)
    assert mine == pytest.approx(complex(direct), rel=1e-10)
    # beyond the guard, still finite and tiny
    deep = sf.riccati_cross_ratio(n, 2.0 + 900.0j, 2.4 + 905.0j)
    assert cmath.isfinite(deep)
    assert abs(deep) < 1e-4


def test_derivative_identity_spot():
    # f_n'(z) = f_{n-1}(z) - (n+1)/z f_n(z) holds by construction; check
    # against central differences as an independent route
    z, h = 1.9 + 0.6j, 1e-6
    for fn, dfn in ((sf.sph_bessel_j, sf.sph_bessel_j_d),
                    (sf.sph_bessel_y, sf.sph_bessel_y_d),
                    (sf.sph_hankel1, sf.sph_hankel1_d)):
        fd = (fn(4, z + h) - fn(4, z - h)) / (2 * h)
        assert dfn(4, z) == pytest.approx(fd, rel=1e-9)
