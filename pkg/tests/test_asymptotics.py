"""Large-degree expansions against exact recurrences and rational tables.

Coefficient families are checked as exact ``Fraction`` values; the
truncated expansions are compared with the exact oscillator recurrence in
each validity regime and with library Airy functions.
"""

import math
from fractions import Fraction

import pytest

from detproc import asymptotics as asy
from detproc import specfun
from detproc.errors import AmbiguousRegimeError, CapacityError, DomainError


class TestSeriesCoefficients:
    def test_u_family_exact(self):
        assert asy.airy_u_coefficient(0) == Fraction(1)
        assert asy.airy_u_coefficient(1) == Fraction(5, 72)
        assert asy.airy_u_coefficient(2) == Fraction(385, 10368)

    def test_v_family_exact(self):
        assert asy.airy_v_coefficient(0) == Fraction(1)
        assert asy.airy_v_coefficient(1) == Fraction(-7, 72)
        # v_k = -(6k+1)/(6k-1) u_k termwise
        for k in range(1, 6):
            assert asy.airy_v_coefficient(k) == Fraction(
                -(6 * k + 1), 6 * k - 1
            ) * asy.airy_u_coefficient(k)

    def test_one_sided_series_two_terms(self):
        z = 3.7
        assert asy.airy_series(z, "L", 2) == 1.0 + 5.0 / (72.0 * z)
        assert asy.airy_series(z, "M", 2) == 1.0 - 7.0 / (72.0 * z)

    def test_series_validation(self):
        with pytest.raises(DomainError):
            asy.airy_series(2.0, "X", 3)
        with pytest.raises(DomainError):
            asy.airy_series(-1.0, "L", 3)
        with pytest.raises(DomainError):
            asy.airy_series(2.0, "L", 0)
        with pytest.raises(CapacityError):
            asy.airy_series(2.0, "L", asy.AIRY_SERIES_CAP + 1)
        with pytest.raises(DomainError):
            asy.airy_u_coefficient(-1)


class TestAirySeriesIdentities:
    """The named partial sums must reproduce the Airy functions through the
    classical one-sided and oscillatory asymptotic identities."""

    def test_growing_solution_right_of_origin(self):
        import scipy.special as sp

        x = 8.0
        zeta = 2.0 / 3.0 * x**1.5
        _, _, bi, bip = sp.airy(x)
        pref = math.exp(zeta) / (math.sqrt(math.pi) * x**0.25)
        assert math.isclose(pref * asy.airy_series(zeta, "L", 4), bi, rel_tol=1e-5)
        assert math.isclose(
            x**0.25 * math.exp(zeta) / math.sqrt(math.pi) * asy.airy_series(zeta, "M", 4),
            bip,
            rel_tol=1e-5,
        )

    def test_oscillatory_splits_left_of_origin(self):
        x = 7.0
        zeta = 2.0 / 3.0 * x**1.5
        w = zeta - math.pi / 4.0
        p = asy.airy_series(zeta, "P", 3)
        q = asy.airy_series(zeta, "Q", 3)
        r = asy.airy_series(zeta, "R", 3)
        s = asy.airy_series(zeta, "S", 3)
        pref = 1.0 / (math.sqrt(math.pi) * x**0.25)
        assert math.isclose(
            pref * (math.cos(w) * p + math.sin(w) * q),
            float(specfun.airy(-x)),
            rel_tol=5e-7,
        )
        assert math.isclose(
            x**0.25 / math.sqrt(math.pi) * (math.sin(w) * r - math.cos(w) * s),
            float(specfun.airy_prime(-x)),
            rel_tol=1e-6,
        )


class TestRecurrenceExpansionCoefficients:
    def test_interior_phase_coefficients_exact(self):
        table = asy.pr_coefficients(max_n=3)
        assert table.a_value(0, 0) == Fraction(1)
        assert table.a_value(1, 1) == Fraction(-1, 3)
        assert table.a_value(2, 1) == Fraction(1, 4)
        assert table.a_value(2, 2) == Fraction(1, 18)
        assert table.a_value(3, 1) == Fraction(-1, 5)
        assert table.a_value(3, 2) == Fraction(-1, 12)
        assert table.a_value(3, 3) == Fraction(-1, 162)

    def test_amplitude_coefficients_exact_in_the_parameter(self):
        table = asy.pr_coefficients(max_n=2)
        assert table.b_value(0, 0, 0.0) == 1.0
        # linear term p/2 at (n, m) = (1, 0)
        for p in (0.0, 1.0, 2.0, -3.0):
            assert table.b_value(1, 0, p) == pytest.approx(p / 2.0, abs=0.0)
        assert table.b_value(1, 1, 5.0) == pytest.approx(0.25, abs=0.0)


class TestDegreeExpansion:
    def test_interior_matches_recurrence(self):
        N = 150
        x = math.sqrt(2.0 * (N + 1)) * math.cos(math.pi / 3.0)
        exact = specfun.hermite_phi(N, x)
        res1 = asy.pr_hermite(N, x, order_L=1)
        res3 = asy.pr_hermite(N, x, order_L=3)
        assert res1.regime is asy.Regime.OSCILLATORY
        assert abs(res1.value - exact) <= 3.0 * res1.error_estimate
        assert abs(res3.value - exact) <= 3.0 * res3.error_estimate
        # deeper truncation is strictly sharper here
        assert abs(res3.value - exact) <= abs(res1.value - exact) / 5.0

    def test_exterior_matches_recurrence(self):
        N = 200
        x = 1.2 * math.sqrt(2.0 * (N + 1))
        exact = specfun.hermite_phi(N, x)
        res2 = asy.pr_hermite(N, x, order_L=2)
        res4 = asy.pr_hermite(N, x, order_L=4)
        assert res2.regime is asy.Regime.EXPONENTIAL
        assert abs(res2.value / exact - 1.0) <= 2e-2
        assert abs(res4.value / exact - 1.0) <= 5e-4
        assert abs(res2.value - exact) <= 3.0 * res2.error_estimate

    def test_edge_matches_recurrence(self):
        N = 100
        x = math.sqrt(2.0 * (N + 1))
        exact = specfun.hermite_phi(N, x)
        res = asy.pr_hermite(N, x, order_L=2)
        assert res.regime is asy.Regime.TURNING
        assert abs(res.value / exact - 1.0) <= 5e-3
        assert abs(res.value - exact) <= 3.0 * res.error_estimate

    def test_parity(self):
        for N in (15, 16):
            x = math.sqrt(2.0 * (N + 1)) * math.cos(1.0)
            plus = asy.pr_hermite(N, x, order_L=2).value
            minus = asy.pr_hermite(N, -x, order_L=2).value
            assert minus == pytest.approx((-1.0) ** N * plus, rel=1e-14)

    def test_result_metadata(self):
        res = asy.pr_hermite(80, 3.0, order_L=2)
        assert res.order_L == 2
        assert res.error_estimate >= 0.0 and math.isfinite(res.error_estimate)

    def test_gap_between_regimes_is_reported(self):
        # interior condition fails (N sin^3 too small) and the point is
        # still too far from the edge for the turning expansion
        with pytest.raises(AmbiguousRegimeError):
            asy.pr_hermite(10, 4.0)

    def test_validation(self):
        with pytest.raises(DomainError):
            asy.pr_hermite(9, 3.0)
        with pytest.raises(DomainError):
            asy.pr_hermite(50, 5.0, order_L=0)
        with pytest.raises(CapacityError):
            asy.pr_hermite(50, 5.0, order_L=5)
