"""Riemann-Liouville derivatives of real and complex order.

Two evaluation routes are provided for the derivative of order gamma with
0 < Re gamma < 1 of an absolutely continuous function y on [0, T]:

* ``rl_deriv_direct`` resolves the outer d/dt analytically, leaving the
  boundary term y(0) t^(-gamma)/Gamma(1-gamma) plus a convolution integral
  of y' against (t - tau)^(-gamma), which is integrated adaptively with a
  substitution that removes the weak endpoint singularity.

* ``rl_deriv_expansion`` uses the moment-series approximation: the value is
  written as a coefficient times y(t) minus a finite sum of running moments
  V_{p-1}(y)(t) = integral of tau^(p-1) y(tau), p = 1..N.  The moments are
  advanced with fixed-step RK4 so a whole experiment can share one state.

Orders may be given as plain complex numbers or as :class:`ComplexOrder`.
A derivative of conjugate order is the conjugate of the derivative, which
is what makes the symmetric combination in ``sym_deriv`` real-valued.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .numerics import (
    adaptive_quad,
    complex_gamma,
    complex_log_gamma,
    principal_power,
)

__all__ = [
    "RealnessError",
    "ComplexOrder",
    "ExpansionState",
    "order_value",
    "rl_deriv_direct",
    "expansion_lead_coeff",
    "expansion_moment_coeff",
    "expansion_moment_coeffs",
    "advance_scaled_moments",
    "build_expansion_state",
    "rl_deriv_expansion",
    "sym_deriv",
    "realness_check",
    "bump",
    "bump_deriv",
]

#: relative bound on stray imaginary parts of quantities that must be real
REALNESS_RTOL = 1e-8


class RealnessError(ArithmeticError):
    """A quantity that must be real carries a too-large imaginary part."""


@dataclass(frozen=True)
class ComplexOrder:
    """Differentiation order alpha + i*B with 0 < alpha < 1 and B >= 0."""

    alpha: float
    B: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and math.isfinite(self.B)):
            raise ValueError("order components must be finite")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"need 0 < alpha < 1, got {self.alpha}")
        if self.B < 0.0:
            raise ValueError(f"need B >= 0, got {self.B}")

    @property
    def value(self) -> complex:
        return complex(self.alpha, self.B)

    @property
    def conjugate(self) -> complex:
        return complex(self.alpha, -self.B)


def order_value(gamma) -> complex:
    """Normalize an order given as ComplexOrder, complex or float."""
    if isinstance(gamma, ComplexOrder):
        return gamma.value
    g = complex(gamma)
    if not 0.0 < g.real < 1.0:
        raise ValueError(f"need 0 < Re gamma < 1, got {g}")
    return g


def _numeric_deriv(y: Callable) -> Callable:
    # Fallback derivative when the caller supplies none.  Central difference
    # with a step shrunk near tau = 0 so y is never evaluated below 0.
    def dy(tau):
        tau = np.asarray(tau, dtype=float)
        h = np.minimum(1e-6 * (1.0 + np.abs(tau)), np.maximum(tau * 0.5, 1e-300))
        return (np.asarray(y(tau + h)) - np.asarray(y(tau - h))) / (2.0 * h)

    return dy


def rl_deriv_direct(
    y: Callable,
    gamma,
    t: float,
    tol: float = 1e-10,
    *,
    dy: Callable | None = None,
    y0: float | None = None,
) -> complex:
    """Derivative of order gamma of y at time t > 0 by direct quadrature.

    ``y`` (and ``dy`` when given) must accept numpy arrays.  ``dy`` is the
    derivative of ``y``; supplying it analytically is strongly preferred.
    ``y0`` overrides y(0) for the boundary term.
    """
    g = order_value(gamma)
    if not t > 0.0:
        raise ValueError(f"need t > 0, got {t}")
    if dy is None:
        dy = _numeric_deriv(y)
    if y0 is None:
        y0 = float(np.asarray(y(0.0)))

    pref = 1.0 / complex_gamma(1.0 - g)
    boundary = y0 * principal_power(t, -g)

    half = 0.5 * t

    def near_origin(tau):
        return np.asarray(dy(tau)) * principal_power(t - tau, -g)

    i1 = adaptive_quad(near_origin, 0.0, half, tol)

    # Substitute tau = t - u^(1/w), w = 1 - Re gamma, on [t/2, t].  The
    # kernel factor becomes u^(-i Im(gamma)/w): bounded, so the quadrature
    # mesh no longer sees the endpoint singularity.
    w = 1.0 - g.real
    u_hi = half**w
    rot = g.imag / w

    if rot == 0.0:

        def near_endpoint(u):
            return np.asarray(dy(t - u ** (1.0 / w))) / w

    else:

        def near_endpoint(u):
            phase = np.exp(-1j * rot * np.log(u))
            return np.asarray(dy(t - u ** (1.0 / w))) * phase / w

    i2 = adaptive_quad(near_endpoint, 0.0, u_hi, tol)
    return pref * (boundary + i1 + i2)


# ---------------------------------------------------------------------------
# Moment-series (expansion) evaluator
# ---------------------------------------------------------------------------


def expansion_lead_coeff(n_terms: int, gamma) -> complex:
    """Coefficient of y(t) t^(-gamma) in the N-term moment series."""
    g = order_value(gamma)
    ratio = cmath.exp(
        complex_log_gamma(n_terms + 1 + g) - complex_log_gamma(n_terms + 1)
    )
    return ratio * cmath.sin(math.pi * g) / (g * math.pi)


def expansion_moment_coeff(p: int, gamma) -> complex:
    """Coefficient of V_{p-1}(y)(t) t^(-(p+gamma)), p = 1..N."""
    if p < 1:
        raise ValueError("p counts from 1")
    g = order_value(gamma)
    ratio = cmath.exp(complex_log_gamma(p + g) - complex_log_gamma(p))
    return ratio * cmath.sin(math.pi * g) / math.pi


def expansion_moment_coeffs(n_terms: int, gamma) -> np.ndarray:
    return np.array([expansion_moment_coeff(p, gamma) for p in range(1, n_terms + 1)])


@dataclass
class ExpansionState:
    """Running scaled moments U_p(y)(t) = p t^(-p) integral_0^t tau^(p-1) y dtau.

    The raw moments grow like t^p and overflow long before t gets
    interesting, so only this rescaling is ever materialized; it stays
    bounded by sup|y| for every p.
    """

    n_terms: int
    t_current: float
    moments: np.ndarray

    def __post_init__(self) -> None:
        self.moments = np.asarray(self.moments, dtype=float)
        if self.moments.shape != (self.n_terms,):
            raise ValueError("moments must have one entry per term")


def advance_scaled_moments(
    u: np.ndarray, t0: float, t1: float, y0: float, y1: float
) -> np.ndarray:
    """Advance the scaled moments across one cell, y linear on [t0, t1].

    U_p satisfies U_p' = (p/t)(y - U_p), which is arbitrarily stiff near
    t = 0; with y interpolated linearly the step has a closed form, so
    this update is exact for the interpolant and unconditionally stable.
    """
    if not t1 > t0:
        raise ValueError("cells must advance forward")
    p = np.arange(1, u.size + 1, dtype=float)
    r = t0 / t1
    rp = np.power(r, p)
    slope = (y1 - y0) / (t1 - t0)
    return (
        rp * u
        + y0 * (1.0 - rp)
        + slope
        * (t1 * (p / (p + 1.0)) * (1.0 - np.power(r, p + 1.0)) - t0 * (1.0 - rp))
    )


def build_expansion_state(
    y: Callable, n_terms: int, t: float, steps: int = 2048
) -> ExpansionState:
    """Accumulate the scaled moments of y from 0 to t.

    The march uses 2*steps linear cells (midpoints included) so the
    piecewise-linear view of y is second order in the cell width.
    """
    if n_terms < 1:
        raise ValueError("need at least one term")
    if not t > 0.0:
        raise ValueError(f"need t > 0, got {t}")
    grid = np.linspace(0.0, t, 2 * steps + 1)
    vals = np.array([float(np.asarray(y(float(tv)))) for tv in grid])
    u = np.zeros(n_terms)
    for j in range(grid.size - 1):
        u = advance_scaled_moments(
            u, float(grid[j]), float(grid[j + 1]), vals[j], vals[j + 1]
        )
    return ExpansionState(n_terms=n_terms, t_current=t, moments=u)


def _moment_terms(
    moments: np.ndarray, t: float, g: complex, coeffs: np.ndarray
) -> complex:
    # sum_p coeffs[p-1] * U_{p-1} * t^(-g) / p with the scaled moments;
    # every factor is moderate, so no log-space care is needed here
    p = np.arange(1, moments.size + 1, dtype=float)
    return complex(np.sum(coeffs * moments / p)) * cmath.exp(-g * math.log(t))


def rl_deriv_expansion(y: Callable, gamma, t: float, state: ExpansionState) -> complex:
    """Evaluate the N-term moment series at t using precomputed moments."""
    g = order_value(gamma)
    if not t > 0.0:
        raise ValueError(f"need t > 0, got {t}")
    if not math.isclose(state.t_current, t, rel_tol=1e-12, abs_tol=0.0):
        raise ValueError(
            f"state was advanced to t = {state.t_current}, asked to evaluate at {t}"
        )
    lead = expansion_lead_coeff(state.n_terms, g)
    coeffs = expansion_moment_coeffs(state.n_terms, g)
    yt = float(np.asarray(y(t)))
    head = yt * lead * cmath.exp(-g * math.log(t))
    return head - _moment_terms(state.moments, t, g, coeffs)


# ---------------------------------------------------------------------------
# Symmetrized derivative and realness diagnostics
# ---------------------------------------------------------------------------


def sym_deriv(
    y: Callable,
    beta,
    t: float,
    method: str = "direct",
    tol: float = 1e-10,
    *,
    dy: Callable | None = None,
    n_terms: int = 100,
    steps: int = 2048,
) -> float:
    """Real part of (D^beta y + D^conj(beta) y)/2 at t.

    Both conjugate orders are evaluated independently; the imaginary part of
    the average is a consistency diagnostic and must stay below
    REALNESS_RTOL * (1 + |result|), otherwise RealnessError is raised.
    """
    b = order_value(beta)
    if method == "direct":
        d_plus = rl_deriv_direct(y, b, t, tol, dy=dy)
        d_minus = rl_deriv_direct(y, b.conjugate(), t, tol, dy=dy)
    elif method == "expansion":
        state = build_expansion_state(y, n_terms, t, steps)
        d_plus = rl_deriv_expansion(y, b, t, state)
        d_minus = rl_deriv_expansion(y, b.conjugate(), t, state)
    else:
        raise ValueError(f"unknown method {method!r}")
    avg = 0.5 * (d_plus + d_minus)
    if abs(avg.imag) > REALNESS_RTOL * (1.0 + abs(avg.real)):
        raise RealnessError(
            f"symmetric derivative at t = {t} has imaginary residue {avg.imag:.3e}"
        )
    return avg.real


def realness_check(
    terms: Sequence[tuple[complex, complex]],
    y: Callable,
    grid: Sequence[float],
    tol: float = 1e-10,
    *,
    dy: Callable | None = None,
) -> float:
    """Max |Im| over the grid of sum_k c_k D^(gamma_k) y(t).

    ``terms`` is a sequence of (coefficient, order) pairs; orders are full
    complex numbers, so conjugate-paired and unpaired combinations can both
    be probed.  Conjugate-paired terms must come out real (tiny residue);
    a lone complex order must not.
    """
    worst = 0.0
    for t in np.asarray(grid, dtype=float):
        if t == 0.0:
            continue
        total = 0.0j
        for coef, gamma in terms:
            total += complex(coef) * rl_deriv_direct(y, gamma, float(t), tol, dy=dy)
        worst = max(worst, abs(total.imag))
    return worst


# ---------------------------------------------------------------------------
# Bundled test function
# ---------------------------------------------------------------------------


def bump(t, lo: float = 0.5, hi: float = 1.5):
    """Smooth positive bump supported on (lo, hi), peak value 1."""
    t = np.asarray(t, dtype=float)
    x = (2.0 * t - (lo + hi)) / (hi - lo)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - xi * xi))
    return out if out.ndim else float(out)


def bump_deriv(t, lo: float = 0.5, hi: float = 1.5):
    """Derivative of :func:`bump`; analytic, vanishes outside (lo, hi)."""
    t = np.asarray(t, dtype=float)
    x = (2.0 * t - (lo + hi)) / (hi - lo)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    one_minus = 1.0 - xi * xi
    out[inside] = (
        np.exp(1.0 - 1.0 / one_minus)
        * (-2.0 * xi / (one_minus * one_minus))
        * (2.0 / (hi - lo))
    )
    return out if out.ndim else float(out)
