"""Fractional derivative operators, moment series and realness checks."""

import cmath
import math

import mpmath
import numpy as np
import pytest

from fracvisco.fracops import (
    ComplexOrder,
    advance_scaled_moments,
    build_expansion_state,
    bump,
    bump_deriv,
    expansion_lead_coeff,
    expansion_moment_coeff,
    expansion_moment_coeffs,
    order_value,
    realness_check,
    rl_deriv_direct,
    rl_deriv_expansion,
    sym_deriv,
)
from fracvisco.numerics import complex_gamma


def power_law_reference(mu: float, gamma: complex, t: float) -> complex:
    """Closed form for the derivative of t^mu, the standard oracle."""
    return (
        complex_gamma(1.0 + mu)
        / complex_gamma(1.0 + mu - gamma)
        * cmath.exp((mu - gamma) * math.log(t))
    )


class TestOrderHandling:
    def test_accepts_float_complex_and_wrapper(self):
        assert order_value(0.4) == 0.4 + 0.0j
        assert order_value(0.4 + 0.4j) == 0.4 + 0.4j
        assert order_value(ComplexOrder(0.4, 0.4)) == 0.4 + 0.4j

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.3, 1.7, 1.2 + 0.4j])
    def test_rejects_real_part_outside_unit_interval(self, bad):
        with pytest.raises(ValueError):
            order_value(bad)

    def test_complex_order_validation(self):
        with pytest.raises(ValueError):
            ComplexOrder(1.2, 0.0)
        with pytest.raises(ValueError):
            ComplexOrder(0.4, -0.1)


class TestDirectDerivative:
    @pytest.mark.parametrize("gamma", [0.4, 0.4 + 0.4j, 0.4 - 0.4j])
    @pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
    def test_power_functions(self, gamma, mu):
        t = 1.3
        got = rl_deriv_direct(
            lambda u: u**mu, gamma, t, dy=lambda u: mu * np.asarray(u) ** (mu - 1.0)
        )
        assert got == pytest.approx(power_law_reference(mu, complex(gamma), t), rel=1e-8)

    def test_fallback_derivative_for_smooth_signal(self):
        # no dy supplied: the central-difference fallback carries the load
        got = rl_deriv_direct(lambda u: u**2, 0.4, 1.3)
        assert got == pytest.approx(power_law_reference(2.0, 0.4, 1.3), rel=1e-6)

    def test_supplied_derivative_is_used(self):
        got = rl_deriv_direct(
            lambda u: u * u, 0.5, 2.0, dy=lambda u: 2.0 * np.asarray(u)
        )
        assert got == pytest.approx(power_law_reference(2.0, 0.5, 2.0), rel=1e-10)

    def test_constant_signal(self):
        # D^g 1 = t^(-g) / Gamma(1 - g)
        g = 0.4 + 0.4j
        t = 0.7
        got = rl_deriv_direct(lambda u: np.ones_like(np.asarray(u, dtype=float)), g, t,
                              dy=lambda u: np.zeros_like(np.asarray(u, dtype=float)))
        ref = cmath.exp(-g * math.log(t)) / complex_gamma(1.0 - g)
        assert got == pytest.approx(ref, rel=1e-10)

    def test_conjugate_order_conjugates_result(self):
        g = 0.4 + 0.3j
        up = rl_deriv_direct(lambda u: u**1.5, g, 1.1)
        dn = rl_deriv_direct(lambda u: u**1.5, g.conjugate(), 1.1)
        assert dn == pytest.approx(up.conjugate(), rel=1e-10)


class TestMomentCoefficients:
    @pytest.mark.parametrize("p", [1, 5, 50])
    @pytest.mark.parametrize("gamma", [0.4, 0.4 + 0.4j])
    def test_single_coefficient_matches_gamma_ratio(self, p, gamma):
        mpmath.mp.dps = 30
        ref = complex(
            mpmath.gamma(p + gamma) / mpmath.gamma(p) * mpmath.sin(mpmath.pi * gamma) / mpmath.pi
        )
        assert expansion_moment_coeff(p, gamma) == pytest.approx(ref, rel=1e-12)

    def test_vectorized_coefficients_agree(self):
        g = 0.4 + 0.4j
        coeffs = expansion_moment_coeffs(40, g)
        assert coeffs.shape == (40,)
        for p in (1, 17, 40):
            assert coeffs[p - 1] == pytest.approx(expansion_moment_coeff(p, g), rel=1e-13)

    def test_lead_coefficient_matches_gamma_ratio(self):
        n, g = 100, 0.4 + 0.4j
        mpmath.mp.dps = 30
        ref = complex(
            mpmath.gamma(n + 1 + g)
            / mpmath.gamma(n + 1)
            * mpmath.sin(mpmath.pi * g)
            / (g * mpmath.pi)
        )
        assert expansion_lead_coeff(n, g) == pytest.approx(ref, rel=1e-12)


class TestScaledMoments:
    def test_constant_signal_is_fixed_point(self):
        u = np.ones(12)
        out = advance_scaled_moments(u, 1.0, 4.0, 1.0, 1.0)
        assert np.allclose(out, 1.0, atol=1e-14)

    def test_linear_signal_single_step_is_exact(self):
        # for y = tau the scaled moments are p t / (p + 1); one step of any
        # size reproduces them because the update integrates lines exactly
        p = np.arange(1, 9, dtype=float)
        u0 = p * 1.0 / (p + 1.0)
        out = advance_scaled_moments(u0, 1.0, 7.0, 1.0, 7.0)
        assert np.allclose(out, p * 7.0 / (p + 1.0), rtol=1e-13)

    def test_zero_history_then_ramp(self):
        p = np.arange(1, 6, dtype=float)
        out = advance_scaled_moments(np.zeros(5), 0.0, 2.0, 0.0, 2.0)
        assert np.allclose(out, p * 2.0 / (p + 1.0), rtol=1e-13)

    @pytest.mark.parametrize("mu", [0.5, 2.0])
    def test_marched_power_law(self, mu):
        state = build_expansion_state(lambda u: u**mu, 7, 2.0)
        p = np.arange(1, 8, dtype=float)
        exact = p / (p + mu) * 2.0**mu
        assert np.allclose(state.moments, exact, rtol=1e-5)

    def test_state_records_grid_position(self):
        state = build_expansion_state(lambda u: u, 5, 3.0)
        assert state.n_terms == 5
        assert state.t_current == pytest.approx(3.0)


class TestExpansionDerivative:
    def test_error_shrinks_with_more_terms(self):
        t, g = 1.0, 0.4
        ref = power_law_reference(1.0, g, t)
        errs = []
        for n in (12, 50, 100):
            state = build_expansion_state(lambda u: u, n, t)
            got = rl_deriv_expansion(lambda u: u, g, t, state)
            errs.append(abs(got - ref) / abs(ref))
        assert errs[2] < errs[1] < errs[0]

    @pytest.mark.parametrize("gamma", [0.4, 0.4 + 0.4j])
    def test_agrees_with_direct_for_compact_signal(self, gamma):
        """Outside the bump's support the series has no truncation bias."""
        t = 2.0
        direct = rl_deriv_direct(bump, gamma, t, dy=bump_deriv)
        state = build_expansion_state(bump, 100, t)
        series = rl_deriv_expansion(bump, gamma, t, state)
        assert series == pytest.approx(direct, rel=1e-5)


class TestSymmetrizedDerivative:
    def test_matches_half_sum_of_conjugate_orders(self):
        beta = 0.4 + 0.4j
        t = 1.3
        up = rl_deriv_direct(lambda u: u**1.5, beta, t)
        dn = rl_deriv_direct(lambda u: u**1.5, beta.conjugate(), t)
        ref = 0.5 * (up + dn)
        assert abs(ref.imag) < 1e-12
        got = sym_deriv(lambda u: u**1.5, beta, t)
        assert isinstance(got, float)
        assert got == pytest.approx(ref.real, rel=1e-9)

    def test_expansion_method_available(self):
        beta = 0.4 + 0.4j
        direct = sym_deriv(bump, beta, 2.0, dy=bump_deriv)
        series = sym_deriv(bump, beta, 2.0, method="expansion", dy=bump_deriv)
        assert series == pytest.approx(direct, rel=1e-5)


class TestRealnessCheck:
    def test_conjugate_pair_cancels_imaginary_parts(self):
        beta = 0.4 + 0.4j
        grid = np.linspace(0.55, 1.45, 20)
        worst = realness_check(
            [(0.5, beta), (0.5, beta.conjugate())], bump, grid, dy=bump_deriv
        )
        assert worst <= 1e-8

    def test_unpaired_order_leaves_large_residue(self):
        beta = 0.4 + 0.4j
        grid = np.linspace(0.55, 1.45, 20)
        worst = realness_check([(1.0, beta)], bump, grid, dy=bump_deriv)
        assert worst >= 1e-3


class TestBump:
    def test_support_and_peak(self):
        assert bump(0.5) == 0.0
        assert bump(1.5) == 0.0
        assert bump(0.0) == 0.0
        assert bump(1.0) == pytest.approx(1.0, rel=1e-15)
        t = np.linspace(0.0, 2.0, 101)
        vals = bump(t)
        assert vals.min() >= 0.0
        assert vals.max() == pytest.approx(1.0, rel=1e-15)

    def test_derivative_matches_finite_difference(self):
        h = 1e-6
        for t in (0.7, 1.0, 1.3):
            fd = (bump(t + h) - bump(t - h)) / (2.0 * h)
            assert bump_deriv(t) == pytest.approx(fd, rel=1e-7, abs=1e-9)

    def test_derivative_vanishes_outside_support(self):
        assert bump_deriv(0.4) == 0.0
        assert bump_deriv(1.6) == 0.0
