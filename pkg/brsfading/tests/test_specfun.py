import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import special, stats

from ..errors import AccuracyError, DomainError
from ..specfun import (
    TAIL_EXPONENT,
    QuadratureSpec,
    _log_kummer_asymptotic,
    _log_kummer_series,
    integrate_semi_infinite,
    kummer_1f1_row1_scaled,
    kummer_crossover,
    laguerre,
    log_bessel_i0,
    log_integrate_semi_infinite,
    log_kummer_1f1_row1_scaled,
    log_marcum_p1,
    marcum_p1,
    marcum_q1,
)


class TestBessel:
    def test_small_arguments(self):
        x = np.linspace(0.0, 50.0, 101)
        assert_allclose(log_bessel_i0(x), np.log(special.i0(x)), rtol=1e-13, atol=1e-14)

    def test_large_argument(self):
        x = 1e6
        expected = x - 0.5 * math.log(2.0 * math.pi * x) + math.log1p(1.0 / (8.0 * x))
        assert log_bessel_i0(x) == pytest.approx(expected, rel=1e-12)

    def test_scalar_in_scalar_out(self):
        assert isinstance(log_bessel_i0(1.0), float)
        assert log_bessel_i0(0.0) == 0.0

    def test_increasing_and_convex(self):
        x = np.linspace(0.01, 200.0, 2001)
        values = log_bessel_i0(x)
        assert np.all(np.diff(values) > 0)
        assert np.all(np.diff(values, 2) >= -1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            log_bessel_i0(-1.0)
        with pytest.raises(DomainError):
            log_bessel_i0(math.nan)


class TestMarcum:
    a = np.array([0.5, 2.0, 5.0, 20.0])[:, None]
    b = np.array([0.1, 1.0, 3.0, 10.0, 25.0])[None, :]

    def test_q1_against_noncentral_chi2(self):
        expected = stats.ncx2.sf(self.b**2, 2, self.a**2)
        assert_allclose(marcum_q1(self.a, self.b), expected, rtol=1e-7, atol=1e-14)

    def test_p1_against_noncentral_chi2(self):
        expected = stats.ncx2.cdf(self.b**2, 2, self.a**2)
        assert_allclose(marcum_p1(self.a, self.b), expected, rtol=1e-7, atol=1e-14)

    def test_complement(self):
        total = marcum_q1(self.a, self.b) + marcum_p1(self.a, self.b)
        assert_allclose(total, 1.0, atol=1e-14)

    def test_special_values(self):
        b = np.array([0.5, 1.0, 4.0])
        assert_allclose(marcum_q1(0.0, b), np.exp(-0.5 * b**2), rtol=1e-13)
        assert marcum_q1(3.0, 0.0) == 1.0
        assert marcum_p1(3.0, 0.0) == 0.0

    def test_lower_tail_relative_accuracy(self):
        # 1 - Q1(a, b) ~ exp(-a^2/2) b^2/2 for small b
        a, b = 2.0, 1e-5
        expected = math.exp(-0.5 * a * a) * b * b / 2
        assert marcum_p1(a, b) == pytest.approx(expected, rel=1e-6)
        assert log_marcum_p1(a, b) == pytest.approx(
            math.log(math.exp(-0.5 * a * a) * b * b / 2), rel=1e-6
        )

    def test_log_marcum_p1_zero(self):
        assert log_marcum_p1(1.0, 0.0) == -math.inf

    def test_monotone_in_b(self):
        b = np.linspace(0.0, 10.0, 201)
        assert np.all(np.diff(marcum_q1(2.0, b)) <= 1e-15)

    def test_monotone_on_random_grid(self):
        rng = np.random.default_rng(5)
        a = np.sort(rng.uniform(0.0, 12.0, 60))
        b = np.sort(rng.uniform(0.0, 12.0, 60))
        q = marcum_q1(a[:, None], b[None, :])
        # nondecreasing in a, nonincreasing in b
        assert np.all(np.diff(q, axis=0) >= -1e-14)
        assert np.all(np.diff(q, axis=1) <= 1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            marcum_q1(-1.0, 1.0)
        with pytest.raises(DomainError):
            marcum_p1(1.0, math.inf)


class TestLaguerre:
    def test_against_scipy(self):
        x = np.linspace(-30.0, 0.0, 31)
        for n in (0, 1, 2, 5, 20):
            assert_allclose(laguerre(n, x), special.eval_laguerre(n, x), rtol=1e-11)

    def test_second_degree(self):
        assert laguerre(2, 3.0) == pytest.approx((9.0 - 12.0 + 2.0) / 2.0)

    def test_domain(self):
        with pytest.raises(DomainError):
            laguerre(201, 1.0)
        with pytest.raises(DomainError):
            laguerre(1.5, 1.0)
        with pytest.raises(DomainError):
            laguerre(-1, 1.0)


class TestKummer:
    @pytest.mark.parametrize("m", [0.5, 0.75, 2.0, 3.0, 3.7, 10.0])
    def test_against_hyp1f1(self, m):
        z = np.array([0.0, 1e-3, 0.5, 2.0, 10.0, 30.0])
        expected = np.log(special.hyp1f1(m, 1.0, z)) - z
        assert_allclose(
            log_kummer_1f1_row1_scaled(m, z), expected, rtol=1e-10, atol=1e-12
        )

    def test_m_one(self):
        assert log_kummer_1f1_row1_scaled(1.0, 123.0) == 0.0
        assert kummer_1f1_row1_scaled(1.0, 5.0) == 1.0

    def test_integer_m_is_laguerre(self):
        z = np.array([0.5, 7.0, 400.0])
        assert_allclose(
            kummer_1f1_row1_scaled(4.0, z), special.eval_laguerre(3, -z), rtol=1e-13
        )

    @pytest.mark.parametrize("m", [0.5, 1.5, 2.5])
    def test_branches_agree_beyond_crossover(self, m):
        z = np.array([1.2 * kummer_crossover(m), 2.0 * kummer_crossover(m)])
        assert_allclose(
            _log_kummer_series(m, z), _log_kummer_asymptotic(m, z), atol=1e-11
        )

    def test_large_argument(self):
        # exp(-z) 1F1(m; 1; z) ~ z^(m-1) / Gamma(m)
        m, z = 0.5, 1e8
        expected = (m - 1.0) * math.log(z) - special.gammaln(m)
        assert log_kummer_1f1_row1_scaled(m, z) == pytest.approx(expected, abs=1e-8)

    def test_domain(self):
        with pytest.raises(DomainError):
            log_kummer_1f1_row1_scaled(0.4, 1.0)
        with pytest.raises(DomainError):
            log_kummer_1f1_row1_scaled(2.0, -1.0)


class TestQuadratureSpec:
    def test_for_decay(self):
        spec = QuadratureSpec.for_decay(2.0)
        t = spec.x_max / 1.25
        expected = TAIL_EXPONENT + 2.0 * math.log1p(t)
        assert 2.0 * t * t == pytest.approx(expected, rel=1e-10)
        assert spec.nodes == 64

    def test_shift(self):
        assert QuadratureSpec.for_decay(2.0, shift=3.0).x_max == pytest.approx(
            QuadratureSpec.for_decay(2.0).x_max + 3.0
        )

    def test_invariants(self):
        with pytest.raises(DomainError):
            QuadratureSpec(nodes=32, x_max=10.0, decay_rate=1.0)
        with pytest.raises(DomainError):
            QuadratureSpec(nodes=64, x_max=1.0, decay_rate=1.0)
        with pytest.raises(DomainError):
            QuadratureSpec(nodes=64, x_max=10.0, decay_rate=0.0)
        with pytest.raises(DomainError):
            QuadratureSpec.for_decay(-1.0)

    def test_doubled_and_stretched(self):
        spec = QuadratureSpec.for_decay(1.0)
        assert spec.doubled().nodes == 128
        assert spec.stretched(1.25).x_max == pytest.approx(1.25 * spec.x_max)


class TestIntegrate:
    def test_gaussian_moment(self):
        spec = QuadratureSpec.for_decay(1.0)
        result = log_integrate_semi_infinite(lambda x: np.log(x) - x * x, spec)
        assert result == pytest.approx(-math.log(2.0), abs=1e-12)

    def test_batch(self):
        a = np.array([0.5, 1.0, 3.0])
        spec = QuadratureSpec.for_decay(0.5)
        result = integrate_semi_infinite(lambda x: -a[:, None] * x * x, spec)
        assert_allclose(result, 0.5 * np.sqrt(np.pi / a), rtol=1e-11)

    def test_bessel_growth_inside_shift(self):
        # int x exp(-x^2) I0(c x) dx = exp(c^2/4) / 2
        c = 20.0
        spec = QuadratureSpec.for_decay(1.0, shift=c / 2.0)
        result = log_integrate_semi_infinite(
            lambda x: np.log(x) - x * x + log_bessel_i0(c * x), spec
        )
        assert result == pytest.approx(c * c / 4.0 - math.log(2.0), abs=1e-10)

    def test_stretching_changes_nothing(self):
        def f(x):
            return np.log(x) - 2.0 * x * x + log_bessel_i0(3.0 * x)

        spec = QuadratureSpec.for_decay(2.0, shift=1.0)
        assert integrate_semi_infinite(f, spec.stretched(1.25)) == pytest.approx(
            integrate_semi_infinite(f, spec), rel=1e-9
        )

    def test_doubling_changes_nothing(self):
        def f(x):
            return np.log(x) - 2.0 * x * x + log_bessel_i0(3.0 * x)

        spec = QuadratureSpec.for_decay(2.0, shift=1.0)
        assert integrate_semi_infinite(f, spec.doubled()) == pytest.approx(
            integrate_semi_infinite(f, spec), rel=1e-9
        )

    def test_vanishing_integrand(self):
        spec = QuadratureSpec.for_decay(1.0)
        assert integrate_semi_infinite(lambda x: np.full(x.shape, -np.inf), spec) == 0.0

    def test_nan(self):
        spec = QuadratureSpec.for_decay(1.0)
        with pytest.raises(AccuracyError):
            log_integrate_semi_infinite(lambda x: np.full(x.shape, np.nan), spec)

    def test_no_convergence(self):
        spec = QuadratureSpec.for_decay(1.0)
        with pytest.raises(AccuracyError) as error:
            log_integrate_semi_infinite(
                lambda x: np.log(2.0 + np.sin(500.0 * x)) - x * x, spec, max_nodes=128
            )
        assert error.value.nodes == 128
        assert len(error.value.estimates) == 2
