import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from nonscatter import harmonics as h
from nonscatter.harmonics import (Direction, Mode, SpectralField, l2_norm_s2,
                                  mode_count, mode_index, sphere_quadrature,
                                  vector_wave_M, vector_wave_N, vsh_eval,
                                  vsh_expand, vsh_table)
from conftest import fd_curl, fd_div, random_unit_vectors


def test_mode_validation():
    Mode(3, -2, "TE")
    with pytest.raises(ValueError):
        Mode(0, 0, "TE")
    with pytest.raises(ValueError):
        Mode(2, 3, "TM")
    with pytest.raises(ValueError):
        Mode(2, 1, "LH")


def test_direction_round_trip():
    d = Direction.from_vector([1.0, 1.0, 0.3])
    assert np.linalg.norm(d.unit) == pytest.approx(1.0, abs=1e-14)
    d2 = Direction.from_vector(d.unit)
    assert d2.theta == pytest.approx(d.theta)
    with pytest.raises(ValueError):
        Direction.from_vector([0.0, 0.0, 0.0])


def test_mode_index_layout():
    assert mode_count(3) == 15
    seen = [mode_index(n, m) for n in (1, 2, 3) for m in range(-n, n + 1)]
    assert seen == list(range(15))


class TestQuadrature:
    def test_weights_sum_to_sphere_area(self):
        quad = sphere_quadrature(10)
        assert np.sum(quad.weights) == pytest.approx(4 * math.pi, abs=1e-13)

    def test_y20_normalisation(self):
        quad = sphere_quadrature(10)
        y = h.sph_harm_y(2, 0, quad.thetas, quad.phis)
        val = np.dot(quad.weights, np.abs(y) ** 2)
        assert val == pytest.approx(1.0, abs=1e-12)

    def test_y31_y21_orthogonality(self):
        quad = sphere_quadrature(10)
        y31 = h.sph_harm_y(3, 1, quad.thetas, quad.phis)
        y21 = h.sph_harm_y(2, 1, quad.thetas, quad.phis)
        val = np.dot(quad.weights, y31 * np.conj(y21))
        assert abs(val) < 1e-12

    def test_degree_validation(self):
        with pytest.raises(ValueError):
            sphere_quadrature(0)


class TestVshBasis:
    def test_orthonormality(self):
        nmax = 6
        quad = sphere_quadrature(2 * nmax + 2)
        U, V, _ = vsh_table(nmax, quad.thetas, quad.phis)
        eye = np.eye(mode_count(nmax))
        guu = np.einsum("ikc,jkc,k->ij", np.conj(U), U, quad.weights)
        gvv = np.einsum("ikc,jkc,k->ij", np.conj(V), V, quad.weights)
        guv = np.einsum("ikc,jkc,k->ij", np.conj(U), V, quad.weights)
        assert np.abs(guu - eye).max() < 1e-12
        assert np.abs(gvv - eye).max() < 1e-12
        assert np.abs(guv).max() < 1e-12

    def test_tangency_at_random_directions(self):
        rng = np.random.default_rng(11)
        dirs = random_unit_vectors(rng, 100)
        theta = np.arccos(dirs[:, 2])
        phi = np.arctan2(dirs[:, 1], dirs[:, 0])
        U, V, _ = vsh_table(4, theta, phi)
        assert np.abs(np.einsum("kc,ikc->ik", dirs, U)).max() < 1e-14
        assert np.abs(np.einsum("kc,ikc->ik", dirs, V)).max() < 1e-14

    def test_u10_closed_form(self):
        # U_{1,0} = sqrt(3/(8 pi)) * (-sin theta) thetahat / ... hand-expanded:
        # grad Y_10 = -sqrt(3/4pi) sin(theta) thetahat, norm sqrt(n(n+1)) = sqrt2
        d = Direction(theta=0.7, phi=1.2)
        U, V = vsh_eval(Mode(1, 0, "TE"), d)
        st, ct = math.sin(d.theta), math.cos(d.theta)
        sp, cp = math.sin(d.phi), math.cos(d.phi)
        thetahat = np.array([ct * cp, ct * sp, -st])
        expected = -math.sqrt(3.0 / (8.0 * math.pi)) * st * thetahat
        assert_allclose(U, expected, atol=1e-14)
        assert_allclose(V, np.cross(U, d.unit), atol=1e-14)

    def test_conjugation_relation_negative_m(self):
        d = Direction(theta=1.1, phi=-0.4)
        for n, m in [(2, 1), (3, 2), (4, 4)]:
            Up, _ = vsh_eval(Mode(n, m, "TE"), d)
            Um, _ = vsh_eval(Mode(n, -m, "TE"), d)
            assert_allclose(Um, (-1.0) ** m * np.conj(Up), atol=1e-13)


class TestL2Norm:
    def test_unit_magnitude_field(self):
        quad = sphere_quadrature(8)
        samples = quad.points  # |f| = 1 at every node
        assert l2_norm_s2(samples, quad) == pytest.approx(
            math.sqrt(4 * math.pi), rel=1e-13)

    def test_single_coefficient(self):
        quad = sphere_quadrature(14)
        U, V, _ = vsh_table(5, quad.thetas, quad.phis)
        c = 0.3 - 1.7j
        samples = c * U[mode_index(4, -2)]
        assert l2_norm_s2(samples, quad) == pytest.approx(abs(c), rel=1e-12)

    def test_parseval_random_coefficients(self):
        rng = np.random.default_rng(5)
        nmax = 5
        f = SpectralField(nmax, "farfield", 1.0)
        f.coeffs[:] = (rng.standard_normal(f.coeffs.shape)
                       + 1j * rng.standard_normal(f.coeffs.shape))
        quad = sphere_quadrature(2 * nmax + 4)
        vals = h.evaluate_tangential(f, quad.thetas, quad.phis)
        assert l2_norm_s2(vals, quad) == pytest.approx(f.norm(), rel=1e-10)
        # and the projection recovers the coefficients
        back = vsh_expand(vals, quad, nmax)
        assert np.abs(back.coeffs - f.coeffs).max() < 1e-10

    def test_sample_count_mismatch(self):
        quad = sphere_quadrature(6)
        with pytest.raises(ValueError):
            l2_norm_s2(np.zeros(quad.n_nodes + 1), quad)


class TestVectorWaves:
    def test_curl_interlacing_regular(self):
        k = 1.9
        rng = np.random.default_rng(3)
        for mode in (Mode(1, 0, "TE"), Mode(2, -1, "TE"), Mode(3, 3, "TE")):
            x = rng.uniform(-0.6, 0.6, 3)
            curl = fd_curl(lambda p: vector_wave_M(mode, k, p), x)
            N = vector_wave_N(mode, k, x)
            assert np.abs(curl - k * N).max() / np.abs(k * N).max() < 1e-6
            curl2 = fd_curl(lambda p: vector_wave_N(mode, k, p), x)
            M = vector_wave_M(mode, k, x)
            assert np.abs(curl2 - k * M).max() / np.abs(k * M).max() < 1e-6

    def test_curl_interlacing_outgoing(self):
        k, mode = 2.4, Mode(2, 1, "TM")
        x = np.array([0.8, -0.5, 0.9])
        curl = fd_curl(lambda p: vector_wave_N(mode, k, p, "outgoing"), x)
        M = vector_wave_M(mode, k, x, "outgoing")
        assert np.abs(curl - k * M).max() / np.abs(k * M).max() < 1e-6

    def test_divergence_free(self):
        k = 2.1
        x = np.array([0.4, 0.1, -0.3])
        for mode in (Mode(1, 1, "TE"), Mode(2, 0, "TM")):
            for maker in (vector_wave_M, vector_wave_N):
                val = fd_div(lambda p: maker(mode, k, p), x)
                scale = np.abs(maker(mode, k, x)).max()
                assert abs(val) < 1e-6 * max(scale, 1.0)

    def test_regular_M_vanishes_at_origin(self):
        for n in (2, 3, 5):
            val = vector_wave_M(Mode(n, 1, "TE"), 1.3, np.zeros(3))
            assert np.abs(val).max() == 0.0

    def test_regular_N_origin_limit(self):
        # n=1 N-waves tend to a nonzero constant; n>=2 vanish
        val0 = vector_wave_N(Mode(1, 0, "TM"), 1.3, np.zeros(3))
        val_near = vector_wave_N(Mode(1, 0, "TM"), 1.3, np.array([1e-9, 0, 0]))
        assert_allclose(val0, val_near, atol=1e-12)
        assert np.abs(vector_wave_N(Mode(2, 0, "TM"), 1.3, np.zeros(3))).max() == 0.0

    def test_outgoing_rejects_origin(self):
        with pytest.raises(ValueError):
            vector_wave_M(Mode(1, 0, "TE"), 1.0, np.zeros(3), "outgoing")

    def test_rotation_about_z_phase(self):
        # rotating the evaluation point by alpha multiplies the mode by e^{i m alpha}
        k, alpha = 1.6, 0.83
        mode = Mode(3, 2, "TE")
        x = np.array([0.5, 0.2, 0.6])
        ca, sa = math.cos(alpha), math.sin(alpha)
        R = np.array([[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]])
        lhs = vector_wave_M(mode, k, R @ x)
        rhs = np.exp(1j * mode.m * alpha) * (R @ vector_wave_M(mode, k, x))
        assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-14)


class TestSpectralField:
    def test_roles_and_validation(self):
        f = SpectralField(3, "interior", 2.0)
        f.set(2, -1, "TM", 1.5j)
        assert f.get(2, -1, "TM") == 1.5j
        with pytest.raises(ValueError):
            f.set(4, 0, "TE", 1.0)  # beyond truncation
        with pytest.raises(ValueError):
            SpectralField(3, "weird", 1.0)
        with pytest.raises(ValueError):
            SpectralField(3, "interior", 1.0,
                          np.full((2, mode_count(3)), np.nan))

    def test_arithmetic(self):
        f = SpectralField(2, "density", 1.0)
        g = SpectralField(2, "density", 1.0)
        f.set(1, 0, "TE", 2.0)
        g.set(1, 0, "TE", -0.5)
        assert (f + g).get(1, 0, "TE") == 1.5
        assert (f - g).get(1, 0, "TE") == 2.5
        assert f.scaled(2.0).get(1, 0, "TE") == 4.0
        assert list(dict(f.active_modes()).keys()) == [Mode(1, 0, "TE")]
