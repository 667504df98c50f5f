# Laplace 变换核测试: 矩, 横坐标, D_ν 的两种表示, 变换 F

import itertools
import math

import mpmath
import numpy as np
import pytest

from engine.core.exceptions import DomainError
from engine.core.selfcheck import weber_grid
from engine.core.systems.transform_core import TransformCore, TransformEvaluator


def _mp_complex(value) -> complex:
    return complex(mpmath.re(value), mpmath.im(value))


def mp_second_moment(x: float, nu: complex) -> complex:
    """E[A²] = 2∫_0^x e^{(2ν+2)s}∫_0^s e^{(2ν+6)u} du ds, 高精度积分"""
    nu = mpmath.mpc(nu)
    rate = 2 * nu + 6

    def inner(s):
        return mpmath.expm1(rate * s) / rate if rate != 0 else s

    return _mp_complex(mpmath.quad(lambda s: 2 * mpmath.exp((2 * nu + 2) * s) * inner(s), [0, x]))


def mp_weber_closed(a: float, nu: complex, z: complex) -> complex:
    nu, z = mpmath.mpc(nu), mpmath.mpc(z)
    mu = mpmath.sqrt(2 * z + nu ** 2)
    alpha = (nu + 4 + mu) / 2
    beta = mu + 1
    x = 1 / (2 * mpmath.mpf(a))
    value = (
        mpmath.gamma(alpha) / mpmath.gamma(beta)
        * mpmath.hyp1f1(alpha, beta, x)
        * mpmath.exp(-x)
        * (2 * mpmath.mpf(a)) ** ((nu + 2 - mu) / 2)
    )
    return _mp_complex(value)


class TestMoments:
    @pytest.mark.parametrize("nu", [-3.0, -2.0, -1.0, -0.6, 0.0, 3.0, 0.5 + 0.9j])
    @pytest.mark.parametrize("x", [0.05, 0.25, 1.0])
    def test_first_moment_closed_form(self, x, nu):
        expected = x if nu == -1.0 else (np.exp(2 * x * (nu + 1)) - 1) / (2 * (nu + 1))
        assert abs(TransformCore.first_moment(x, nu) - expected) <= 1e-13 * abs(expected)

    def test_first_moment_example(self):
        assert TransformCore.first_moment(0.1, 0.0).real == pytest.approx(0.1107013791, rel=1e-9)

    @pytest.mark.parametrize(
        "nu", [-3.0, -3.0 + 1e-9, -2.0, -2.0 - 1e-9, -1.0, -1.0 + 1e-6, -1.0 + 2e-3, -0.6, 0.0, 3.0, 0.5 + 0.9j]
    )
    @pytest.mark.parametrize("x", [0.05, 0.25, 1.0])
    def test_second_moment_matches_integral(self, x, nu):
        expected = mp_second_moment(x, nu)
        assert abs(TransformCore.second_moment(x, nu) - expected) <= 1e-10 * abs(expected)

    def test_second_moment_examples(self):
        assert TransformCore.second_moment(0.1, 0.0).real == pytest.approx(0.0141637, rel=1e-5)
        exact = 0.05 * (math.expm1(0.4) / 0.4 - 1.0)
        assert TransformCore.second_moment(0.1, -1.0).real == pytest.approx(exact, rel=1e-13)
        assert TransformCore.second_moment(0.1, -1.0).real == pytest.approx(0.011478, rel=1e-4)

    @pytest.mark.parametrize("x", [0.05, 0.25])
    def test_seam_continuity(self, x, transform_config):
        radius = transform_config.singularity_radius
        for moment in (TransformCore.first_moment, TransformCore.second_moment):
            inside = moment(x, -1.0 + radius * (1 - 1e-6))
            outside = moment(x, -1.0 + radius * (1 + 1e-6))
            assert abs(inside - outside) <= 1e-8 * abs(outside)

    def test_moments_at_zero_and_negative(self):
        assert TransformCore.first_moment(0.0, 0.3) == 0
        assert TransformCore.second_moment(0.0, 0.3) == 0
        with pytest.raises(DomainError):
            TransformCore.first_moment(-0.1, 0.0)

    def test_first_moment_transform(self):
        assert TransformCore.first_moment_transform(-1.0, 3.0) == pytest.approx(1 / 9, rel=1e-15)
        assert TransformCore.first_moment_transform(3.0, 9.0) == pytest.approx(1 / 9, rel=1e-15)
        with pytest.raises(DomainError):
            TransformCore.first_moment_transform(3.0, 8.0)


class TestAbscissas:
    def test_finiteness(self):
        assert TransformCore.finiteness_abscissa(-0.6) == pytest.approx(0.8)
        assert TransformCore.finiteness_abscissa(-3.0) == 0.0
        assert TransformCore.finiteness_abscissa(0.5 + 0.9j) == pytest.approx(0.405 + 3.0)

    def test_identity(self):
        assert TransformCore.identity_abscissa(3.0) == pytest.approx(8.0)
        assert TransformCore.identity_abscissa(0.0) == pytest.approx(2.0)
        assert TransformCore.identity_abscissa(-0.6) == 4.0
        assert TransformCore.identity_abscissa(0.5 + 0.9j) == 4.0
        assert TransformCore.identity_abscissa(2.0 + 0.5j) == pytest.approx(6.125)

    def test_evaluator_validity(self):
        evaluator = TransformEvaluator(a=0.0625, nu=-0.6)
        assert evaluator.finiteness_abscissa == pytest.approx(0.8)
        assert evaluator.identity_abscissa == 4.0
        assert evaluator.validity_abscissa == 4.0
        with pytest.raises(DomainError):
            TransformEvaluator(a=0.0, nu=1.0)


class TestWeberD:
    @pytest.mark.parametrize(
        "a, nu, z",
        [
            (0.0625, -0.6, 4.5),
            (0.0025, 3.0, 9.0),
            (1.0, 0.5 + 0.9j, 8.0 - 5j),
            (8.0, -3.0, 12.0 + 20j),
            (0.01, -1.5 - 0.9j, 4.5 + 5j),
        ],
    )
    def test_closed_form_matches_mpmath(self, a, nu, z):
        expected = mp_weber_closed(a, nu, z)
        assert abs(TransformCore.weber_D_closed(a, nu, z) - expected) <= 1e-10 * abs(expected)

    @pytest.mark.parametrize(
        "a, nu, z",
        [
            (0.0625, -0.6, 4.5),
            (0.0625, 3.0, 9.0 + 5j),
            (1.0, 0.5 + 0.9j, 8.0 - 5j),
            (0.01, -3.0, 12.0),
            (8.0, -1.5 - 0.9j, 4.5 - 20j),
        ],
    )
    def test_closed_form_matches_quadrature(self, a, nu, z):
        closed = TransformCore.weber_D_closed(a, nu, z)
        quadrature = TransformCore.weber_D_quadrature(a, nu, z)
        assert abs(closed - quadrature) <= 1e-8 * abs(quadrature)

    @pytest.mark.slow
    def test_closed_form_matches_quadrature_full_grid(self):
        grid = weber_grid()
        assert len(grid) == 200
        for a, nu, z in grid:
            closed = TransformCore.weber_D_closed(a, nu, z)
            quadrature = TransformCore.weber_D_quadrature(a, nu, z)
            assert abs(closed - quadrature) <= 1e-8 * abs(quadrature), (a, nu, z)

    def test_array_matches_scalar(self):
        z = np.array([4.5, 6 + 5j, 12 - 20j])
        values = TransformCore.weber_D_closed(0.0625, -0.6, z)
        expected = [TransformCore.weber_D_closed(0.0625, -0.6, complex(v)) for v in z]
        np.testing.assert_allclose(values, expected, rtol=1e-13)

    @pytest.mark.parametrize(
        "a, nu, z",
        [(0.0, 1.0, 5.0), (1.0, 0.5 + 1.5j, 5.0), (1.0, 1.0, 1.5)],
    )
    def test_domain_violations(self, a, nu, z):
        with pytest.raises(DomainError):
            TransformCore.weber_D_closed(a, nu, z)


class TestLaplaceF:
    def test_definition(self):
        evaluator = TransformEvaluator(a=0.0625, nu=-0.6)
        z = 4.5 + 3j
        expected = TransformCore.weber_D_closed(0.0625, -0.6, z) / (z * (z - 0.8))
        assert evaluator(z) == pytest.approx(expected, rel=1e-14)

    def test_gate_reports_both_abscissas(self):
        evaluator = TransformEvaluator(a=0.0625, nu=-0.6)
        with pytest.raises(DomainError) as info:
            evaluator(3.0 + 1j)
        assert info.value.finiteness_abscissa == pytest.approx(0.8)
        assert info.value.identity_abscissa == 4.0
        assert info.value.real_part == 3.0

    @pytest.mark.parametrize(
        "nu, a",
        list(itertools.product([3.0, -0.6, 0.5 + 0.9j, -1.0 + 0.5j], [0.05, 0.5])),
    )
    def test_majorant_bound(self, nu, a):
        evaluator = TransformEvaluator(a=a, nu=nu)
        for shift in (0.5, 2.0, 10.0):
            for imag in (0.0, 5.0, -20.0):
                z = evaluator.validity_abscissa + shift + 1j * imag
                assert abs(evaluator(z)) <= TransformCore.transform_majorant(nu, z)

    def test_small_strike_limit(self):
        # a → 0 时 F → 1/(z(z-2(ν+1))) - a/z, 差值为看跌部分的变换, 介于 0 与 a² 之间
        a, nu, z = 1e-3, 3.0, 9.0
        value = TransformEvaluator(a=a, nu=nu)(z).real
        limit = TransformCore.first_moment_transform(nu, z).real - a / z
        assert 0.0 <= value - limit <= a * a

    @pytest.mark.parametrize("nu, z", [(3.0, 9.0), (-0.6, 4.5)])
    def test_small_strike_limit_large_argument(self, nu, z):
        # 1/(2a) 超出 Kummer 升幂级数的项数上限
        a = 1e-5
        value = TransformEvaluator(a=a, nu=nu)(z).real
        limit = TransformCore.first_moment_transform(nu, z).real - a / z
        assert 0.0 <= value - limit <= a * a

    @pytest.mark.parametrize("nu, a", [(3.0, 0.0025), (-0.6, 0.0625), (0.0, 0.5)])
    def test_decays_along_real_axis(self, nu, a):
        evaluator = TransformEvaluator(a=a, nu=nu)
        points = [evaluator.validity_abscissa + shift for shift in (1.0, 10.0, 100.0, 1000.0, 10000.0)]
        values = [evaluator(z).real for z in points]
        assert all(value >= 0.0 for value in values)
        assert all(later <= earlier for earlier, later in zip(values, values[1:]))
        assert values[-1] <= TransformCore.transform_majorant(nu, points[-1]) < 1e-8

    def test_complex_index_decays_along_real_axis(self):
        nu = 0.5 + 0.9j
        evaluator = TransformEvaluator(a=0.05, nu=nu)
        z = evaluator.validity_abscissa + 10000.0
        assert abs(evaluator(z)) <= TransformCore.transform_majorant(nu, z) < 1e-8
