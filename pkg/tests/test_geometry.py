"""Tests del módulo de geometría del disco de Poincaré."""

import math

import numpy as np
import pytest

from src.errors import DomainError, GridTooCoarseError
from src.geometry import (
    distance_from_origin, hyperbolic_distance, laplace_beltrami_radial,
    mobius_translate, point_from_polar, sinh_half_distance, v_factor,
    v_raw, weight_p, weight_p_point
)
from src.models import DiskPoint


class TestDistance:
    """Distancia hiperbólica."""

    def test_distance_to_itself_is_zero(self, random_pairs):
        x, _ = random_pairs(200)
        np.testing.assert_allclose(hyperbolic_distance(x, x), 0.0, atol=1e-12)

    def test_known_value_from_origin(self):
        rho = hyperbolic_distance(DiskPoint(0.5, 0.0), DiskPoint())
        assert isinstance(rho, float)
        assert rho == pytest.approx(math.log(3.0), rel=1e-14)

    def test_symmetric(self, random_pairs):
        x, y = random_pairs(1000)
        np.testing.assert_allclose(hyperbolic_distance(x, y), hyperbolic_distance(y, x),
                                   rtol=1e-13, atol=1e-15)

    def test_triangle_inequality(self, random_pairs):
        x, y = random_pairs(500)
        z, _ = random_pairs(500)
        lhs = hyperbolic_distance(x, z)
        rhs = hyperbolic_distance(x, y) + hyperbolic_distance(y, z)
        assert np.all(lhs <= rhs + 1e-12)

    def test_matches_origin_formula(self, random_pairs):
        x, _ = random_pairs(200)
        np.testing.assert_allclose(hyperbolic_distance(x, np.zeros_like(x)),
                                   distance_from_origin(x), rtol=1e-12)

    def test_boundary_point_rejected(self):
        with pytest.raises(DomainError):
            DiskPoint(1.0, 0.0)
        with pytest.raises(DomainError):
            hyperbolic_distance(np.array([0.6, 0.8]), np.zeros(2))

    def test_sinh_half_distance_identity(self, random_pairs):
        x, y = random_pairs(1000)
        rho = hyperbolic_distance(x, y)
        np.testing.assert_allclose(np.sinh(rho / 2.0), sinh_half_distance(x, y), rtol=1e-10)


class TestMobius:
    """Traslaciones de Möbius y el factor V."""

    def test_sends_center_to_origin(self, random_pairs):
        x, _ = random_pairs(200)
        np.testing.assert_allclose(mobius_translate(x, x), 0.0, atol=1e-14)

    def test_origin_translation_is_reflection(self, random_pairs):
        _, y = random_pairs(200)
        np.testing.assert_allclose(mobius_translate(np.zeros_like(y), y), -y, atol=1e-15)

    def test_involution(self, random_pairs):
        x, y = random_pairs(10_000)
        twice = mobius_translate(x, mobius_translate(x, y))
        np.testing.assert_allclose(twice, y, atol=1e-12)

    def test_image_inside_disk(self, random_pairs):
        x, y = random_pairs(1000)
        assert np.all(np.linalg.norm(mobius_translate(x, y), axis=-1) < 1.0)

    def test_norm_identity(self, random_pairs):
        x, y = random_pairs(1000)
        t = mobius_translate(x, y)
        lhs = np.sum(t * t, axis=-1) * v_factor(x, y)
        np.testing.assert_allclose(lhs, np.sum((x - y) ** 2, axis=-1), rtol=1e-12, atol=1e-16)

    def test_v_factor_special_values(self, random_pairs):
        x, y = random_pairs(300)
        np.testing.assert_allclose(v_factor(np.zeros_like(y), y), 1.0, rtol=1e-15)
        r2 = np.sum(x * x, axis=-1)
        np.testing.assert_allclose(v_factor(x, x), (1.0 - r2) ** 2, rtol=1e-13)

    def test_v_factor_forms_agree(self, random_pairs):
        x, y = random_pairs(1000)
        np.testing.assert_allclose(v_factor(x, y), v_raw(x, y), rtol=1e-13)

    def test_distance_preserved(self, random_pairs):
        x, y = random_pairs(300)
        z, _ = random_pairs(300)
        np.testing.assert_allclose(
            hyperbolic_distance(mobius_translate(x, y), mobius_translate(x, z)),
            hyperbolic_distance(y, z),
            rtol=1e-9, atol=1e-10
        )

    def test_diskpoint_in_diskpoint_out(self):
        result = mobius_translate(DiskPoint(0.3, 0.1), DiskPoint(-0.2, 0.4))
        assert isinstance(result, DiskPoint)


class TestWeight:
    """Peso exponencial p = cosh(rho) - 1."""

    def test_zero_at_origin(self):
        assert weight_p(0.0) == 0.0
        assert weight_p_point(DiskPoint()) == 0.0

    def test_known_value(self):
        assert weight_p_point(DiskPoint(0.5, 0.0)) == pytest.approx(2.0 / 3.0, rel=1e-15)

    def test_forms_agree(self, random_pairs):
        x, _ = random_pairs(1000)
        np.testing.assert_allclose(weight_p(distance_from_origin(x)), weight_p_point(x), rtol=1e-10)

    def test_small_rho_without_cancellation(self):
        rho = 1e-8
        assert weight_p(rho) == pytest.approx(rho ** 2 / 2.0, rel=1e-12)

    def test_negative_rho_rejected(self):
        with pytest.raises(DomainError):
            weight_p(-0.1)

    def test_polar_round_trip_radius(self):
        pts = point_from_polar(np.array([0.5, 1.0, 2.0]), np.array([0.0, 1.0, 2.0]))
        np.testing.assert_allclose(distance_from_origin(pts), [0.5, 1.0, 2.0], rtol=1e-13)


class TestLaplaceBeltrami:
    """Laplaciano radial en rejilla uniforme."""

    @staticmethod
    def _max_error(n):
        rho = np.linspace(0.0, 2.0, n)
        approx = laplace_beltrami_radial(weight_p(rho), rho)
        return np.max(np.abs(approx - (2.0 * weight_p(rho) + 2.0)))

    def test_p_is_eigenfunction_second_order(self):
        sizes = np.array([21, 41, 81, 161, 321])
        errors = np.array([self._max_error(n) for n in sizes])
        order = np.polyfit(np.log(2.0 / (sizes - 1)), np.log(errors), 1)[0]
        assert order == pytest.approx(2.0, abs=0.2)

    def test_cosh_is_eigenfunction(self):
        rho = np.linspace(0.0, 2.0, 401)
        approx = laplace_beltrami_radial(np.cosh(rho), rho)
        np.testing.assert_allclose(approx, 2.0 * np.cosh(rho), rtol=1e-3)

    def test_constant_has_zero_laplacian(self):
        rho = np.linspace(0.0, 3.0, 50)
        np.testing.assert_allclose(laplace_beltrami_radial(np.full(50, 7.0), rho), 0.0, atol=1e-9)

    def test_coarse_grid_rejected(self):
        with pytest.raises(GridTooCoarseError):
            laplace_beltrami_radial([1.0, 2.0], [0.0, 1.0])

    def test_non_uniform_grid_rejected(self):
        with pytest.raises(GridTooCoarseError):
            laplace_beltrami_radial(np.ones(4), np.array([0.0, 0.1, 0.3, 0.4]))
