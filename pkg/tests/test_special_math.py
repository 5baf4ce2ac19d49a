"""Special-function primitives against high-precision reference values.

Reference numbers were produced with an arbitrary-precision library at 30+
significant digits and are inlined as literals; tolerances reflect each
function's documented accuracy contract.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fso_linklab import (
    AccuracyBudget,
    AccuracyError,
    DegenerateParameterError,
    DomainError,
    bessel_k,
    bessel_k_log,
    kummer_1f1,
    ln_gamma,
    lower_incomplete_gamma_regularized,
    tricomi_u,
)


def rel(x, ref):
    return abs(x - ref) / abs(ref)


class TestLnGamma:
    def test_reference_value(self):
        assert rel(ln_gamma(4.2), 2.048555636960589809) < 1e-13

    def test_vectorized(self):
        out = ln_gamma(np.array([1.0, 2.0, 4.2]))
        assert out.shape == (3,)
        assert out[0] == 0.0 and out[1] == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            ln_gamma(0.0)
        with pytest.raises(DomainError):
            ln_gamma(np.array([1.0, -2.0]))


class TestBesselK:
    # order/argument pairs spanning the mixture's operating range
    REFERENCE = [
        (1.2, 3.7, 0.018580829276912110391),
        (0.2, 1e-8, 104.90715487457536238),
        (3.2, 0.5, 99.51427663623295039),
        (2.7, 120.0, 9.0327011587182378907e-54),
    ]

    @pytest.mark.parametrize("nu,x,ref", REFERENCE)
    def test_reference_values(self, nu, x, ref):
        assert rel(bessel_k(nu, x), ref) < 1e-12

    def test_symmetry_in_order(self):
        assert bessel_k(-1.7, 2.5) == bessel_k(1.7, 2.5)

    def test_log_matches_linear(self):
        for nu, x, ref in self.REFERENCE:
            assert rel(bessel_k_log(nu, x), math.log(ref)) < 1e-12

    def test_log_survives_overflow_regime(self):
        # kve itself overflows here; the small-argument series takes over
        assert rel(bessel_k_log(150.3, 1e-3), 1743.234453320477015584) < 1e-12
        assert rel(bessel_k_log(40.7, 1e-5), 605.3053648030068797287) < 1e-12

    def test_log_vectorized_mixed_regimes(self):
        out = bessel_k_log(np.array([1.2, 150.3]), np.array([3.7, 1e-3]))
        assert rel(out[0], math.log(0.018580829276912110391)) < 1e-12
        assert rel(out[1], 1743.234453320477015584) < 1e-12

    def test_domain(self):
        with pytest.raises(DomainError):
            bessel_k(1.0, 0.0)
        with pytest.raises(DomainError):
            bessel_k_log(1.0, -1.0)

    @given(
        nu=st.floats(0.1, 5.0),
        x=st.floats(0.5, 20.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_three_term_recurrence(self, nu, x):
        # K_{nu+1}(x) = K_{nu-1}(x) + (2 nu / x) K_nu(x)
        lhs = bessel_k(nu + 1.0, x)
        rhs = bessel_k(nu - 1.0, x) + (2.0 * nu / x) * bessel_k(nu, x)
        assert rel(lhs, rhs) < 1e-11


class TestKummer:
    def test_reference_values(self):
        assert rel(kummer_1f1(4.2, 2.2, 0.7), 3.4353934682841509978) < 1e-12
        assert rel(kummer_1f1(1.0, -2.2, 6.0), -274950.89344215669575) < 1e-12
        assert rel(kummer_1f1(3.0, -0.8, 2.5), -6527.8297108406213871) < 1e-12

    def test_pole_raises(self):
        with pytest.raises(DegenerateParameterError):
            kummer_1f1(1.5, 0.0, 1.0)
        with pytest.raises(DegenerateParameterError):
            kummer_1f1(1.5, -3.0, 1.0)

    @pytest.mark.parametrize("a,b,z", [(1.3, 2.4, 0.8), (4.2, 2.2, 3.0),
                                       (0.7, 1.9, 5.5)])
    def test_contiguous_recurrence(self, a, b, z):
        # (b-a) M(a-1,b,z) + (2a-b+z) M(a,b,z) - a M(a+1,b,z) = 0
        combo = ((b - a) * kummer_1f1(a - 1.0, b, z)
                 + (2.0 * a - b + z) * kummer_1f1(a, b, z)
                 - a * kummer_1f1(a + 1.0, b, z))
        scale = abs(a * kummer_1f1(a + 1.0, b, z))
        assert abs(combo) < 1e-12 * max(scale, 1.0)


class TestTricomiU:
    def test_reference_values(self):
        assert rel(tricomi_u(1.0, 1.5, 2.0), 0.42136922928805447322) < 1e-9
        assert rel(tricomi_u(4.2, 2.2, 3.5), 0.00070694639209639887568) < 1e-8
        assert rel(tricomi_u(4.2, -0.8, 9.0), 1.4862837182163718558e-05) < 1e-9

    def test_integer_second_parameter_raises(self):
        with pytest.raises(DegenerateParameterError):
            tricomi_u(2.5, 2.0, 1.0)

    def test_domain(self):
        with pytest.raises(DomainError):
            tricomi_u(1.0, 1.5, 0.0)

    def test_unreachable_budget_raises(self):
        with pytest.raises(AccuracyError):
            tricomi_u(4.2, 4.2, 3317.0, AccuracyBudget(rel_tol=1e-16))

    @pytest.mark.parametrize("a,b,z", [(2.3, 1.4, 6.0), (1.6, 0.3, 2.0),
                                       (3.1, 1.7, 40.0)])
    def test_contiguous_recurrence(self, a, b, z):
        # U(a-1,b,z) + (b-2a-z) U(a,b,z) + a(a-b+1) U(a+1,b,z) = 0
        u_prev = tricomi_u(a - 1.0, b, z)
        u_mid = tricomi_u(a, b, z)
        u_next = tricomi_u(a + 1.0, b, z)
        combo = u_prev + (b - 2.0 * a - z) * u_mid + a * (a - b + 1.0) * u_next
        assert abs(combo) < 1e-8 * max(abs(u_prev), abs(u_mid), 1e-300)

    def test_large_argument_decay(self):
        # U(a,b,z) ~ z^-a for large z
        big = tricomi_u(1.3, 0.4, 1e8)
        assert rel(big, 1e8 ** -1.3) < 1e-3


class TestIncompleteGamma:
    def test_reference_values(self):
        assert rel(lower_incomplete_gamma_regularized(4.2, 3.0),
                   0.31370748578451457623) < 1e-13
        assert rel(lower_incomplete_gamma_regularized(0.7, 0.2),
                   0.32910789979003372397) < 1e-13

    def test_bounds(self):
        assert lower_incomplete_gamma_regularized(1.5, 0.0) == 0.0
        assert lower_incomplete_gamma_regularized(1.5, 1e6) == 1.0

    def test_domain(self):
        with pytest.raises(DomainError):
            lower_incomplete_gamma_regularized(0.0, 1.0)
        with pytest.raises(DomainError):
            lower_incomplete_gamma_regularized(1.0, -0.5)


class TestAccuracyBudget:
    def test_validation(self):
        with pytest.raises(DomainError):
            AccuracyBudget(rel_tol=0.0)
        with pytest.raises(DomainError):
            AccuracyBudget(rel_tol=2.0)
        with pytest.raises(DomainError):
            AccuracyBudget(max_terms=0)

    def test_frozen(self):
        b = AccuracyBudget()
        with pytest.raises(Exception):
            b.rel_tol = 1e-3
