# 复数特殊函数核测试

import cmath
import math

import mpmath
import numpy as np
import pytest

from engine.core.exceptions import ConvergenceError, DomainError
from engine.core.systems.complex_kernel import ComplexKernel
from shared.schemas import KernelConfig


def _mp_complex(value) -> complex:
    return complex(mpmath.re(value), mpmath.im(value))


class TestPrincipalSqrt:
    def test_known_values(self):
        assert ComplexKernel.principal_sqrt(3 + 4j) == pytest.approx(2 + 1j, rel=1e-15)
        assert ComplexKernel.principal_sqrt(9.0) == pytest.approx(3.0, rel=1e-15)
        assert ComplexKernel.principal_sqrt(-4 + 1e-12j).real > 0

    def test_positive_real_part_and_round_trip(self):
        rng = np.random.default_rng(7)
        w = rng.uniform(-20, 20, 500) + 1j * rng.uniform(-20, 20, 500)
        root = ComplexKernel.principal_sqrt(w)
        assert (root.real > 0).all()
        np.testing.assert_allclose(root * root, w, rtol=1e-13)

    @pytest.mark.parametrize("w", [0.0, -1.0, -4 + 0j])
    def test_cut_raises(self, w):
        with pytest.raises(DomainError):
            ComplexKernel.principal_sqrt(w)

    def test_cut_in_array_raises(self):
        with pytest.raises(DomainError):
            ComplexKernel.principal_sqrt(np.array([1 + 1j, -2 + 0j]))

    def test_mu_param(self):
        assert ComplexKernel.mu_param(4.0, 1.0) == pytest.approx(3.0, rel=1e-15)
        z = np.array([4.5, 9 + 5j])
        expected = np.sqrt(2 * z + 0.36)
        np.testing.assert_allclose(ComplexKernel.mu_param(z, -0.6), expected, rtol=1e-15)


class TestLogGamma:
    @pytest.mark.parametrize("w", [0.3 + 0.2j, 0.5, 1.5 - 2j, 7 + 10j, 25 - 30j, 0.01 + 5j, 120.0])
    def test_matches_mpmath(self, w):
        expected = _mp_complex(mpmath.loggamma(mpmath.mpc(w)))
        assert abs(ComplexKernel.log_gamma(w) - expected) <= 1e-12 * max(1.0, abs(expected))

    def test_real_axis_is_real(self):
        value = ComplexKernel.log_gamma(4.5)
        assert value.imag == 0.0
        assert value.real == pytest.approx(math.lgamma(4.5), rel=1e-14)

    def test_array_matches_scalar(self):
        w = np.array([0.25 + 1j, 3.0 + 0j, 12 - 7j])
        expected = [ComplexKernel.log_gamma(complex(v)) for v in w]
        np.testing.assert_allclose(ComplexKernel.log_gamma(w), expected, rtol=1e-14)

    @pytest.mark.parametrize("w", [0.0, -0.5 + 1j, -3.0])
    def test_left_half_plane_raises(self, w):
        with pytest.raises(DomainError):
            ComplexKernel.log_gamma(w)


class TestBesselI:
    @pytest.mark.parametrize("mu", [0.3, -0.5, 2.5 + 1.2j, 8 - 3j])
    @pytest.mark.parametrize("xi", [0.5, 10.0, 59.0, 61.0, 200.0])
    def test_scaled_matches_mpmath(self, mu, xi):
        expected = _mp_complex(mpmath.besseli(mpmath.mpc(mu), xi) * mpmath.exp(-xi))
        value = ComplexKernel.bessel_i(mu, xi, scaled=True)
        assert abs(value - expected) <= 1e-10 * abs(expected)

    def test_unscaled_small_argument(self):
        expected = _mp_complex(mpmath.besseli(mpmath.mpc(1.5 + 0.5j), 3.0))
        assert abs(ComplexKernel.bessel_i(1.5 + 0.5j, 3.0) - expected) <= 1e-12 * abs(expected)

    def test_half_integer_closed_form(self):
        for xi in (0.1, 2.0, 30.0, 120.0):
            sinh_scaled = math.sqrt(2 / (math.pi * xi)) * 0.5 * -math.expm1(-2 * xi)
            assert ComplexKernel.bessel_i(0.5, xi, scaled=True).real == pytest.approx(sinh_scaled, rel=1e-12)

    def test_array_spanning_both_branches(self):
        xi = np.array([1.0, 40.0, 75.0, 300.0])
        mu = 1.2 + 0.7j
        values = ComplexKernel.bessel_i(mu, xi, scaled=True)
        expected = [ComplexKernel.bessel_i(mu, float(x), scaled=True) for x in xi]
        np.testing.assert_allclose(values, expected, rtol=1e-14)

    def test_invalid_arguments(self):
        with pytest.raises(DomainError):
            ComplexKernel.bessel_i(1.0, 0.0)
        with pytest.raises(DomainError):
            ComplexKernel.bessel_i(-1.5, 1.0)

    def test_asymptotic_branch_rejects_large_imaginary_order(self):
        config = KernelConfig(bessel_series_cap=5.0)
        with pytest.raises(ConvergenceError):
            ComplexKernel.bessel_i(1.0 + 8j, 6.0, config=config)


class TestKummerPhi:
    @pytest.mark.parametrize(
        "alpha, beta",
        [(1.0, 2.0), (3.5 + 1.2j, 6.0 + 2.4j), (2.2 - 0.45j, 3.4 - 0.9j), (6.1, 6.2)],
    )
    @pytest.mark.parametrize("x", [0.5, 10.0, 80.0])
    def test_scaled_matches_mpmath(self, alpha, beta, x):
        expected = _mp_complex(mpmath.hyp1f1(mpmath.mpc(alpha), mpmath.mpc(beta), x) * mpmath.exp(-x))
        value = ComplexKernel.kummer_phi(alpha, beta, x, scaled=True)
        assert abs(value - expected) <= 1e-11 * abs(expected)

    def test_large_argument_uses_rescaling(self):
        # e^{500} 超出重标度阈值
        expected = mpmath.log(mpmath.hyp1f1(6.1, 6.2, 500))
        log_value = ComplexKernel.kummer_log_phi(6.1, 6.2, 500.0)
        assert log_value.real == pytest.approx(float(expected), rel=1e-13)
        assert ComplexKernel.kummer_phi(6.1, 6.2, 500.0, scaled=True).real == pytest.approx(
            float(mpmath.hyp1f1(6.1, 6.2, 500) * mpmath.exp(-500)), rel=1e-10
        )

    @pytest.mark.parametrize("alpha, beta", [(2.3 + 1.5j, 3.1 + 2.0j), (1.7, 2.4), (40.0 + 60.0j, 77.0 + 120.0j)])
    @pytest.mark.parametrize("x", [8000.0, 32000.0, 1.6e5])
    def test_large_argument_matches_mpmath(self, alpha, beta, x):
        # 超出升幂级数项数上限的自变量
        expected = mpmath.hyp1f1(mpmath.mpc(alpha), mpmath.mpc(beta), x) * mpmath.exp(-x)
        value = ComplexKernel.kummer_phi(alpha, beta, x, scaled=True)
        assert abs(value - _mp_complex(expected)) <= 1e-10 * float(abs(expected))

    def test_large_argument_agrees_with_series(self):
        alpha = np.array([2.3 + 1.5j, 6.0 - 4.0j, 1.2])
        beta = alpha + np.array([0.8 + 0.5j, 3.0 - 8.0j, 1.0])
        asymptotic = ComplexKernel.kummer_phi(alpha, beta, 8000.0, scaled=True)
        series = ComplexKernel.kummer_phi(
            alpha, beta, 8000.0, scaled=True, config=KernelConfig(kummer_asymptotic_min_x=1e9)
        )
        np.testing.assert_allclose(asymptotic, series, rtol=1e-10)

    def test_large_argument_unscaled_log(self):
        log_scaled = ComplexKernel.kummer_log_phi(2.5, 3.0, 40000.0, scaled=True)
        assert ComplexKernel.kummer_log_phi(2.5, 3.0, 40000.0) == pytest.approx(log_scaled + 40000.0, rel=1e-15)

    def test_exponential_special_case(self):
        assert ComplexKernel.kummer_phi(1.7 + 0.4j, 1.7 + 0.4j, 3.0) == pytest.approx(cmath.exp(3.0), rel=1e-13)

    def test_array_matches_scalar(self):
        alpha = np.array([2.0 + 1j, 3.0, 4.5 - 2j])
        beta = alpha + 1.5
        values = ComplexKernel.kummer_phi(alpha, beta, 12.0, scaled=True)
        expected = [ComplexKernel.kummer_phi(complex(a), complex(b), 12.0, scaled=True) for a, b in zip(alpha, beta)]
        np.testing.assert_allclose(values, expected, rtol=1e-13)

    def test_series_diagnostics_peak(self):
        x = 20.5
        value, diagnostics = ComplexKernel.kummer_phi_series(1.0, 1.0, x)
        assert value.real == pytest.approx(math.exp(x), rel=1e-13)
        assert diagnostics.peak_index == 20
        assert diagnostics.peak_log_modulus == pytest.approx(20 * math.log(x) - math.lgamma(21), rel=1e-12)
        assert diagnostics.terms_used > diagnostics.peak_index

    @pytest.mark.parametrize("beta", [0.0, -1.0, -3 + 0j])
    def test_nonpositive_integer_beta_raises(self, beta):
        with pytest.raises(DomainError):
            ComplexKernel.kummer_phi(1.0, beta, 1.0)

    def test_term_cap_raises(self):
        with pytest.raises(ConvergenceError):
            ComplexKernel.kummer_phi(1.0, 2.0, 50.0, config=KernelConfig(kummer_term_cap=5))
