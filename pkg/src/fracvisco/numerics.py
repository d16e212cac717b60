"""Low-level numerical kernels shared by the rest of the package.

Everything here is deliberately free of model-specific knowledge: a complex
gamma function, principal-branch powers, a vectorized adaptive quadrature,
a fixed-step RK4 integrator, and truncated Taylor-series (jet) arithmetic
used for high-order differentiation.
"""

from __future__ import annotations

import cmath
import heapq
import math
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "QuadratureError",
    "NonFiniteError",
    "complex_gamma",
    "complex_log_gamma",
    "principal_power",
    "adaptive_quad",
    "ode_integrate",
    "Jet",
    "jet_eval_nth_derivative",
]


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class NonFiniteError(RuntimeError):
    """A numerical state stopped being finite (NaN or infinity)."""


# ---------------------------------------------------------------------------
# Gamma function
# ---------------------------------------------------------------------------

# Lanczos approximation, g = 7, 9 coefficients. Good for ~14 significant
# digits on the right half-plane; the left half-plane goes through the
# reflection formula.
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _lanczos_series(z: complex) -> complex:
    # z is already shifted so the series is evaluated at z - 1.
    x = complex(_LANCZOS_C[0])
    for i, c in enumerate(_LANCZOS_C[1:], start=1):
        x += c / (z + i)
    return x


def complex_gamma(z: complex) -> complex:
    """Gamma function for complex argument.

    Raises ValueError at the poles (z = 0, -1, -2, ...).  Satisfies
    conj(gamma(z)) == gamma(conj(z)) up to roundoff.
    """
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise ValueError(f"gamma pole at z = {z}")
    if z.real < 0.5:
        # Reflection: gamma(z) gamma(1-z) = pi / sin(pi z)
        return math.pi / (cmath.sin(math.pi * z) * complex_gamma(1.0 - z))
    w = z - 1.0
    x = _lanczos_series(w)
    t = w + _LANCZOS_G + 0.5
    return _SQRT_TWO_PI * cmath.exp((w + 0.5) * cmath.log(t) - t) * x


def complex_log_gamma(z: complex) -> complex:
    """log(gamma(z)) up to an irrelevant multiple of 2*pi*i.

    Intended for ratios of large gamma values via exp(lg(a) - lg(b)); the
    imaginary part is NOT the continuous log-gamma branch.
    """
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise ValueError(f"gamma pole at z = {z}")
    if z.real < 0.5:
        return (
            cmath.log(math.pi)
            - cmath.log(cmath.sin(math.pi * z))
            - complex_log_gamma(1.0 - z)
        )
    w = z - 1.0
    x = _lanczos_series(w)
    t = w + _LANCZOS_G + 0.5
    return math.log(_SQRT_TWO_PI) + (w + 0.5) * cmath.log(t) - t + cmath.log(x)


# ---------------------------------------------------------------------------
# Principal-branch powers
# ---------------------------------------------------------------------------


def principal_power(s, gamma):
    """s**gamma with arg(s) in (-pi, pi].

    Points on the negative real axis are treated as the upper side of the
    branch cut (arg = +pi), including inputs that carry a negative-zero
    imaginary part.  Accepts scalars or numpy arrays for ``s``.

    s = 0 is allowed only for Re(gamma) > 0, where the limit value 0 is
    returned; otherwise a ValueError is raised.
    """
    if isinstance(s, np.ndarray):
        s = np.asarray(s, dtype=complex)
        # rewrite -0.0 imaginary parts so the cut is approached from above
        s = np.where(s.imag == 0.0, s.real + 0.0j, s)
        if np.any(s == 0.0):
            if complex(gamma).real > 0.0:
                out = np.zeros_like(s)
                nz = s != 0.0
                out[nz] = np.exp(gamma * np.log(s[nz]))
                return out
            raise ValueError("0 cannot be raised to a power with Re <= 0")
        return np.exp(gamma * np.log(s))
    s = complex(s)
    g = complex(gamma)
    if s == 0.0:
        if g.real > 0.0:
            return 0.0j
        raise ValueError("0 cannot be raised to a power with Re <= 0")
    if s.imag == 0.0:
        s = complex(s.real, 0.0)
    return cmath.exp(g * cmath.log(s))


# ---------------------------------------------------------------------------
# Adaptive quadrature (Gauss-Kronrod 7/15 with a global error heap)
# ---------------------------------------------------------------------------

# QUADPACK dqk15 nodes and weights on [-1, 1].
_XGK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144838258730,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ]
)
_WGK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_WG = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)

_GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])  # 15 ascending nodes
_GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_G_IDX = np.arange(1, 15, 2)
_G_WEIGHTS = np.array([_WG[0], _WG[1], _WG[2], _WG[3], _WG[2], _WG[1], _WG[0]])


def _eval_panel(f, a: float, b: float) -> tuple[complex, float]:
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    x = c + h * _GK_NODES
    fx = np.asarray(f(x))
    if fx.shape != x.shape:
        fx = np.broadcast_to(fx, x.shape)
    fx = fx.astype(complex, copy=False)
    ik = h * complex(np.sum(_GK_WEIGHTS * fx))
    ig = h * complex(np.sum(_G_WEIGHTS * fx[_G_IDX]))
    return ik, abs(ik - ig)


def _quad_finite(f, lo: float, hi: float, tol: float, max_panels: int) -> complex:
    # Seed with dyadically graded panels toward the lower end, where our
    # integrands put their singular or sharply peaked behavior.
    width = hi - lo
    edges = [lo]
    for j in range(18, 0, -1):
        edges.append(lo + width * 2.0 ** (-j))
    edges.append(hi)

    heap: list[tuple[float, int, float, float, complex]] = []
    serial = 0
    total = 0.0j
    total_err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        ik, err = _eval_panel(f, a, b)
        total += ik
        total_err += err
        heapq.heappush(heap, (-err, serial, a, b, ik))
        serial += 1

    npanels = len(edges) - 1
    while total_err > max(tol, tol * abs(total)):
        neg_err, _, a, b, ik_old = heapq.heappop(heap)
        m = 0.5 * (a + b)
        if m <= a or m >= b or not math.isfinite(m):
            raise QuadratureError(
                f"panel [{a}, {b}] cannot be split further; error {-neg_err:.3e}"
            )
        il, el = _eval_panel(f, a, m)
        ir, er = _eval_panel(f, m, b)
        total += il + ir - ik_old
        total_err += el + er - (-neg_err)
        heapq.heappush(heap, (-el, serial, a, m, il))
        serial += 1
        heapq.heappush(heap, (-er, serial, m, b, ir))
        serial += 1
        npanels += 1
        if npanels > max_panels:
            raise QuadratureError(
                f"no convergence after {max_panels} panels on [{lo}, {hi}]: "
                f"error estimate {total_err:.3e}, tol {tol:.3e}"
            )
    if not (math.isfinite(total.real) and math.isfinite(total.imag)):
        raise NonFiniteError("quadrature produced a non-finite value")
    return total


def _quad_infinite(f, lo: float, tol: float, max_panels: int) -> complex:
    # March panels of doubling length; stop once three consecutive panels
    # contribute below tol relative to the running integral.
    total = 0.0j
    small_run = 0
    a = lo
    length = 1.0
    for _ in range(64):
        b = a + length
        part = _quad_finite(f, a, b, tol * 0.25, max_panels)
        total += part
        if abs(part) <= tol * max(1.0, abs(total)):
            small_run += 1
            if small_run >= 3:
                return total
        else:
            small_run = 0
        a = b
        length *= 2.0
    raise QuadratureError(
        "integrand did not decay on the infinite interval "
        f"(running integral {abs(total):.3e})"
    )


def adaptive_quad(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    *,
    max_panels: int = 4096,
) -> complex:
    """Integrate ``f`` over [lo, hi] to an absolute-or-relative tolerance.

    ``f`` must accept a numpy array of abscissae and return array values
    (real or complex); scalar returns are broadcast.  ``hi`` may be
    ``math.inf``, in which case panels of doubling length are marched until
    three consecutive contributions fall below tolerance.  Endpoints are
    never evaluated, so integrable endpoint singularities are allowed.

    Raises QuadratureError when the error estimate cannot be brought below
    tolerance within the panel budget.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if math.isinf(hi):
        return _quad_infinite(f, lo, tol, max_panels)
    return _quad_finite(f, lo, hi, tol, max_panels)


# ---------------------------------------------------------------------------
# Fixed-step RK4
# ---------------------------------------------------------------------------


def ode_integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0,
    t_grid: Sequence[float],
) -> np.ndarray:
    """Classical RK4 with one step per grid interval.

    Deterministic by construction: the result depends only on ``rhs``,
    ``y0`` and the grid.  Raises NonFiniteError as soon as a state stops
    being finite.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 1:
        raise ValueError("t_grid must be a non-empty 1-d array")
    y = np.asarray(y0)
    y = y.astype(np.result_type(y.dtype, np.float64), copy=True)
    out = np.empty((t.size,) + y.shape, dtype=y.dtype)
    out[0] = y
    for i in range(t.size - 1):
        t0 = t[i]
        h = t[i + 1] - t0
        k1 = np.asarray(rhs(t0, y))
        k2 = np.asarray(rhs(t0 + 0.5 * h, y + 0.5 * h * k1))
        k3 = np.asarray(rhs(t0 + 0.5 * h, y + 0.5 * h * k2))
        k4 = np.asarray(rhs(t0 + h, y + h * k3))
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise NonFiniteError(f"state became non-finite at t = {t[i + 1]!r}")
        out[i + 1] = y
    return out


# ---------------------------------------------------------------------------
# Truncated Taylor jets
# ---------------------------------------------------------------------------


class Jet:
    """Truncated Taylor series sum(c[k] (s - s0)^k, k = 0..order).

    Supports +, -, *, / with other jets or scalars, principal-branch powers
    and exp.  Used to evaluate high-order derivatives of composite
    expressions without symbolic differentiation or finite differences.
    """

    __slots__ = ("coef",)

    def __init__(self, coef) -> None:
        self.coef = np.asarray(coef, dtype=complex)
        if self.coef.ndim != 1 or self.coef.size == 0:
            raise ValueError("jet coefficients must be a non-empty 1-d array")

    @property
    def order(self) -> int:
        return self.coef.size - 1

    @classmethod
    def variable(cls, value: complex, order: int) -> "Jet":
        coef = np.zeros(order + 1, dtype=complex)
        coef[0] = value
        if order >= 1:
            coef[1] = 1.0
        return cls(coef)

    @classmethod
    def constant(cls, value: complex, order: int) -> "Jet":
        coef = np.zeros(order + 1, dtype=complex)
        coef[0] = value
        return cls(coef)

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                raise ValueError("jet orders do not match")
            return other
        return Jet.constant(complex(other), self.order)

    def __add__(self, other) -> "Jet":
        other = self._coerce(other)
        return Jet(self.coef + other.coef)

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return Jet(-self.coef)

    def __sub__(self, other) -> "Jet":
        other = self._coerce(other)
        return Jet(self.coef - other.coef)

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __mul__(self, other) -> "Jet":
        other = self._coerce(other)
        n = self.order + 1
        return Jet(np.convolve(self.coef, other.coef)[:n])

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        return self * self._coerce(other)._reciprocal()

    def __rtruediv__(self, other) -> "Jet":
        return self._coerce(other) * self._reciprocal()

    def _reciprocal(self) -> "Jet":
        v = self.coef
        if v[0] == 0.0:
            raise ZeroDivisionError("jet division: leading coefficient is zero")
        n = self.order
        w = np.zeros(n + 1, dtype=complex)
        w[0] = 1.0 / v[0]
        for k in range(1, n + 1):
            w[k] = -np.dot(w[:k], v[k:0:-1]) / v[0]
        return Jet(w)

    def power(self, gamma) -> "Jet":
        """Principal-branch power of the jet; leading coefficient must be nonzero."""
        u = self.coef
        if u[0] == 0.0:
            raise ZeroDivisionError("jet power: leading coefficient is zero")
        g = complex(gamma)
        n = self.order
        w = np.zeros(n + 1, dtype=complex)
        w[0] = principal_power(complex(u[0]), g)
        m = np.arange(1, n + 1)
        for k in range(1, n + 1):
            # k u0 w_k = g sum_{m=1..k} m u_m w_{k-m} - sum_{m=1..k-1} m w_m u_{k-m}
            s1 = np.dot(m[:k] * u[1 : k + 1], w[k - 1 :: -1][:k])
            s2 = np.dot(m[: k - 1] * w[1:k], u[k - 1 : 0 : -1]) if k > 1 else 0.0
            w[k] = (g * s1 - s2) / (k * u[0])
        return Jet(w)

    def exp(self) -> "Jet":
        u = self.coef
        n = self.order
        w = np.zeros(n + 1, dtype=complex)
        w[0] = cmath.exp(complex(u[0]))
        m = np.arange(1, n + 1)
        for k in range(1, n + 1):
            w[k] = np.dot(m[:k] * u[1 : k + 1], w[k - 1 :: -1][:k]) / k
        return Jet(w)

    def derivative(self, n: int) -> complex:
        """n-th derivative of the jet at its expansion point."""
        if not 0 <= n <= self.order:
            raise ValueError(f"derivative order {n} outside jet order {self.order}")
        return complex(self.coef[n]) * math.factorial(n)


def jet_eval_nth_derivative(f, s0: complex, n: int) -> complex:
    """n-th derivative of ``f`` at ``s0`` by jet propagation.

    ``f`` must be composed of arithmetic, powers and exp applied to its Jet
    argument.  Exact for such compositions up to roundoff.
    """
    if n < 0:
        raise ValueError("derivative order must be >= 0")
    result = f(Jet.variable(complex(s0), n))
    if isinstance(result, Jet):
        return result.derivative(n)
    # f ignored its argument: constant function
    return complex(result) if n == 0 else 0.0j
