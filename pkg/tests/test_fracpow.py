import cmath
import math

import pytest

from kpd import (
    DomainError,
    ToleranceError,
    integral_power,
    integrand_l1_norm,
    l1_bound_constant,
    rising_factorial,
    split_power,
    validate_representation,
)
from kpd.fracpow import _taylor_remainder
from kpd.quadrature import adaptive_quad

GRID_S = (0.5, 1.5, 2.5, 3.7)
GRID_W = (0.1, 1.0, 4.0, 10.0, 1.0 + 1.0j)


class TestSplitPower:
    def test_basic_splits(self):
        p = split_power(0.5)
        assert (p.int_part, p.frac_part) == (0, 0.5)
        p = split_power(3.7)
        assert p.int_part == 3
        assert p.frac_part == pytest.approx(0.7, rel=1e-12)

    def test_prefactor_value(self):
        # (0.5)_2 / Gamma(0.5) = 0.75 / sqrt(pi)
        p = split_power(1.5)
        assert p.prefactor == pytest.approx(0.75 / math.sqrt(math.pi), rel=1e-13)
        assert p.prefactor == pytest.approx(0.4231421876608172, rel=1e-12)

    def test_prefactor_matches_rising_factorial_route(self):
        for s in (0.3, 1.25, 2.75, 5.5, 9.1):
            p = split_power(s)
            direct = rising_factorial(p.frac_part, p.int_part + 1) / math.gamma(
                1.0 - p.frac_part
            )
            assert p.prefactor == pytest.approx(direct, rel=1e-12)

    def test_prefactor_positive_across_grid(self):
        for k in range(10):
            for frac in (0.1, 0.5, 0.9):
                assert split_power(k + frac).prefactor > 0

    def test_integer_rejected(self):
        for bad in (3.0, 1, 2.0 + 1e-12):
            with pytest.raises(DomainError):
                split_power(bad)

    def test_out_of_range_rejected(self):
        with pytest.raises(DomainError):
            split_power(-0.5)
        with pytest.raises(DomainError):
            split_power(31.5)


class TestRisingFactorial:
    def test_empty_product(self):
        assert rising_factorial(7.3, 0) == 1.0

    def test_half_cubed(self):
        assert rising_factorial(0.5, 3) == pytest.approx(1.875, rel=1e-15)

    def test_small_alpha(self):
        assert rising_factorial(0.3, 4) == pytest.approx(2.9601, rel=1e-14)

    def test_negative_n_rejected(self):
        with pytest.raises(DomainError):
            rising_factorial(1.0, -1)


class TestIntegralPower:
    def test_unit_argument(self):
        assert integral_power(1.0, split_power(0.5), tol=1e-8) == pytest.approx(
            1.0, abs=1e-8
        )

    def test_square_root_of_four(self):
        assert integral_power(4.0, split_power(0.5), tol=1e-8) == pytest.approx(
            2.0, abs=2e-8
        )

    def test_complex_principal_branch(self):
        got = integral_power(1.0 + 1.0j, split_power(1.5), tol=1e-10)
        want = (1.0 + 1.0j) ** 1.5
        assert abs(got - want) <= 1e-9 * abs(want)
        # the polar form of the oracle
        assert want == pytest.approx(
            2.0**0.75 * cmath.exp(1j * 3.0 * math.pi / 8.0), rel=1e-15
        )

    def test_zero_returns_zero(self):
        assert integral_power(0.0, split_power(2.5)) == 0.0

    def test_left_half_plane_rejected(self):
        with pytest.raises(DomainError):
            integral_power(-1.0, split_power(0.5))

    @pytest.mark.parametrize("s", GRID_S)
    def test_homogeneity(self, s):
        p = split_power(s)
        h1 = integral_power(1.7, p, tol=1e-10)
        for c in (2.0, 5.0, 0.25):
            hc = integral_power(c * 1.7, p, tol=1e-10)
            assert abs(hc - c**s * h1) <= 1e-8 * abs(hc)

    def test_near_imaginary_axis(self):
        for (w, s) in ((0.1 + 1.0j, 1.5), (0.02 + 1.0j, 2.5)):
            got = integral_power(w, split_power(s), tol=1e-8)
            want = w**s
            assert abs(got - want) <= 1e-8 * abs(want)

    def test_pure_imaginary_rejected(self):
        with pytest.raises(DomainError):
            integral_power(1.0j, split_power(0.5))

    def test_small_real_limit(self):
        # |h| <= B(s) C(s) |w|^s forces h -> 0 along the positive reals
        p = split_power(2.5)
        got = integral_power(1e-4, p, tol=1e-8)
        assert abs(got - (1e-4) ** 2.5) <= 1e-8 * (1e-4) ** 2.5
        assert abs(got) <= p.prefactor * l1_bound_constant(p) * (1e-4) ** 2.5


class TestL1Bound:
    def test_constant_values(self):
        assert l1_bound_constant(split_power(0.5)) == pytest.approx(
            2.0 * math.e + 2.0, rel=1e-13
        )
        assert l1_bound_constant(split_power(1.5)) == pytest.approx(
            2.0 * math.e + 2.0 / 3.0, rel=1e-13
        )

    def test_norm_respects_bound_spot(self):
        p = split_power(1.5)
        norm = integrand_l1_norm(3.0, p)
        assert 0 < norm <= l1_bound_constant(p) * 3.0**1.5

    @pytest.mark.parametrize("s", GRID_S)
    @pytest.mark.parametrize("w", GRID_W)
    def test_norm_respects_bound_grid(self, s, w):
        p = split_power(s)
        norm = integrand_l1_norm(w, p)
        assert norm <= l1_bound_constant(p) * abs(w) ** s

    def test_zero_w(self):
        assert integrand_l1_norm(0.0, split_power(0.5)) == 0.0


class TestCancellationGuard:
    @pytest.mark.parametrize("s", GRID_S)
    @pytest.mark.parametrize("omega", (1.0, cmath.exp(1j * math.pi / 4)))
    def test_remainder_series_matches_naive(self, s, omega):
        # overlap region where both evaluations are stable
        p = split_power(s)
        S = p.int_part
        for mu in (0.5, 0.7, 0.9, 1.0):
            z = mu * omega
            series = _taylor_remainder(z, S)
            naive = sum((-z) ** l / math.factorial(l) for l in range(S + 1)) - cmath.exp(-z)
            naive = -naive  # remainder = exp expansion tail = -(partial - exp)
            assert abs(series - naive) <= 1e-10 * max(abs(series), 1e-12)


class TestValidation:
    def test_default_grid_passes(self):
        pairs = [(w, s) for s in GRID_S for w in GRID_W]
        report = validate_representation(pairs, tol=1e-6)
        assert report.passed, report.failures
        assert len(report.entries) == len(pairs)
        for e in report.entries:
            assert e["rel_err"] <= 1e-6

    def test_derivative_relation(self):
        report = validate_representation([(2.0, 1.5)], tol=1e-6)
        e = report.entries[0]
        assert e["derivative_rel_err"] <= 1e-4

    def test_passed_reflects_failures(self):
        report = validate_representation([(4.0, 0.5)], tol=1e-6)
        assert report.passed == (len(report.failures) == 0)
        assert report.passed


class TestAdaptiveQuadrature:
    def test_smooth_integral(self):
        got = adaptive_quad(math.sin, 0.0, math.pi, tol=1e-12)
        assert got == pytest.approx(2.0, rel=1e-12)

    def test_complex_integrand_shares_nodes(self):
        got = adaptive_quad(lambda x: cmath.exp(1j * x), 0.0, math.pi, tol=1e-12)
        assert got.real == pytest.approx(0.0, abs=1e-12)
        assert got.imag == pytest.approx(2.0, rel=1e-12)

    def test_depth_exhaustion_raises(self):
        spike = lambda x: 1.0 / math.sqrt(abs(x - 0.123456789) + 1e-300)
        with pytest.raises(ToleranceError):
            adaptive_quad(spike, 0.0, 1.0, tol=1e-14, max_depth=3)
