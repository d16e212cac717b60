"""Characteristic function of the model and Laplace-domain machinery.

Everything here works with

    psi(s) = 1 + a s^alpha + b (s^beta + s^conj(beta)),    beta = alpha + iB,

on the complex plane cut along the negative real axis.  The creep
compliance kernel is the inverse Laplace transform of 1/psi, which splits
into a branch-cut integral (always present) and a sum of residues over
zeros of psi (present only if psi has zeros off the cut).  The zero count
is established by winding numbers over half-annulus contours before any
root polishing happens, so a missed root is detected rather than silently
dropped.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .fracops import RealnessError
from .numerics import Jet, adaptive_quad, principal_power
from .thermo import ModelParams

__all__ = [
    "ContourError",
    "ZeroSearchError",
    "ContourSpec",
    "ZeroSet",
    "KernelTable",
    "char_function",
    "char_function_deriv",
    "char_function_polar",
    "winding_number",
    "count_zeros",
    "find_zeros",
    "kernel_zero_set",
    "kernel_density",
    "creep_kernel_integral",
    "creep_kernel_residues",
    "residue_total_mass",
    "build_kernel_table",
    "solve_strain",
    "post_invert",
]


class ContourError(RuntimeError):
    """The characteristic function vanished (or nearly) on a contour."""


class ZeroSearchError(RuntimeError):
    """Root polishing could not account for the winding-number count."""


def char_function(params: ModelParams, s):
    """psi(s) for complex s (scalar, array, or Jet) off the negative axis."""
    a, b = params.a, params.b
    beta = params.beta
    if isinstance(s, Jet):
        return (
            Jet.constant(1.0, s.order)
            + s.power(params.alpha) * a
            + (s.power(beta) + s.power(beta.conjugate())) * b
        )
    return (
        1.0
        + a * principal_power(s, params.alpha)
        + b * (principal_power(s, beta) + principal_power(s, beta.conjugate()))
    )


def char_function_deriv(params: ModelParams, s):
    """d psi / d s, same domain conventions as :func:`char_function`."""
    a, b = params.a, params.b
    al = params.alpha
    beta = params.beta
    return (
        a * al * principal_power(s, al - 1.0)
        + b * beta * principal_power(s, beta - 1.0)
        + b * beta.conjugate() * principal_power(s, beta.conjugate() - 1.0)
    )


def char_function_polar(params: ModelParams, r, phi):
    """Real and imaginary parts of psi at s = r e^{i phi}, expanded.

    Valid for r > 0 and -pi <= phi <= pi; phi = +/-pi evaluates the boundary
    value on the corresponding side of the cut.  This avoids cancellation in
    ``exp(beta log s)`` and is what the winding and kernel code call.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise ValueError("polar form needs r > 0")
    a, b, al, bb = params.a, params.b, params.alpha, params.B
    ra = r**al
    lnr = np.log(r)
    ca, sa = np.cos(al * phi), np.sin(al * phi)
    cl, sl = np.cos(bb * lnr), np.sin(bb * lnr)
    ch, sh = np.cosh(bb * phi), np.sinh(bb * phi)
    re = 1.0 + a * ra * ca + 2.0 * b * ra * (ca * cl * ch + sa * sl * sh)
    im = a * ra * sa + 2.0 * b * ra * (sa * cl * ch - ca * sl * sh)
    if re.ndim:
        return re, im
    return float(re), float(im)


# ---------------------------------------------------------------------------
# winding numbers and zero counting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContourSpec:
    """Boundary of a half-annulus in the cut plane.

    ``half`` selects the region: "right" is the half-annulus with
    Re s >= 0, "left-upper" the quarter-annulus between the positive
    imaginary axis and the upper side of the cut.  ``samples`` is the
    initial point count per boundary segment; segments are refined
    automatically wherever the image curve turns too fast.
    """

    r_inner: float = 1e-3
    r_outer: float = 1e3
    half: str = "right"
    samples: int = 256

    def __post_init__(self) -> None:
        if not 0.0 < self.r_inner < self.r_outer:
            raise ValueError("need 0 < r_inner < r_outer")
        if self.half not in ("right", "left-upper"):
            raise ValueError(f"unknown half {self.half!r}")
        if self.samples < 8:
            raise ValueError("samples must be at least 8")


def _segments(spec: ContourSpec) -> list[Callable[[np.ndarray], tuple]]:
    """Counterclockwise boundary as maps u in [0, 1] -> (r, phi) arrays."""
    ri, ro = spec.r_inner, spec.r_outer
    lri, lro = math.log(ri), math.log(ro)

    def arc(r, p0, p1):
        return lambda u: (np.full_like(u, r), p0 + (p1 - p0) * u)

    def ray(phi, l0, l1):
        return lambda u: (np.exp(l0 + (l1 - l0) * u), np.full_like(u, phi))

    if spec.half == "right":
        return [
            arc(ro, -0.5 * math.pi, 0.5 * math.pi),
            ray(0.5 * math.pi, lro, lri),
            arc(ri, 0.5 * math.pi, -0.5 * math.pi),
            ray(-0.5 * math.pi, lri, lro),
        ]
    return [
        ray(0.5 * math.pi, lri, lro),
        arc(ro, 0.5 * math.pi, math.pi),
        ray(math.pi, lro, lri),
        arc(ri, math.pi, 0.5 * math.pi),
    ]


def _psi_at(params: ModelParams, r: float, phi: float) -> complex:
    re, im = char_function_polar(params, r, phi)
    return complex(re, im)


def _guard_scale(params: ModelParams, r: float) -> float:
    ra = r**params.alpha
    return 1.0 + params.a * ra + 2.0 * params.b * ra * math.cosh(params.B * math.pi)


def winding_number(params: ModelParams, spec: ContourSpec) -> int:
    """Number of zeros of psi enclosed by the contour, via argument principle.

    Phase increments are accumulated between consecutive samples and any
    step larger than 1 radian is split recursively, so the unwinding cannot
    skip a full turn.  Raises :class:`ContourError` if psi comes within
    1e-9 of zero (relative to its natural magnitude) on the contour.
    """

    def step(point0, point1, psi0, psi1, depth: int) -> float:
        d = cmath.phase(psi1 / psi0)
        if abs(d) < 1.0:
            return d
        if depth > 48:
            raise ContourError("phase step would not converge; zero on contour?")
        rm = math.sqrt(point0[0] * point1[0])
        pm = 0.5 * (point0[1] + point1[1])
        psim = _psi_at(params, rm, pm)
        if abs(psim) < 1e-9 * _guard_scale(params, rm):
            raise ContourError(f"psi vanishes on contour near r={rm:g}, phi={pm:g}")
        mid = (rm, pm)
        return step(point0, mid, psi0, psim, depth + 1) + step(
            mid, point1, psim, psi1, depth + 1
        )

    total = 0.0
    for seg in _segments(spec):
        u = np.linspace(0.0, 1.0, spec.samples + 1)
        rs, phis = seg(u)
        psis = [_psi_at(params, float(r), float(p)) for r, p in zip(rs, phis)]
        for k, psi in enumerate(psis):
            if abs(psi) < 1e-9 * _guard_scale(params, float(rs[k])):
                raise ContourError(
                    f"psi vanishes on contour near r={rs[k]:g}, phi={phis[k]:g}"
                )
        for k in range(spec.samples):
            total += step(
                (float(rs[k]), float(phis[k])),
                (float(rs[k + 1]), float(phis[k + 1])),
                psis[k],
                psis[k + 1],
                0,
            )
    turns = total / (2.0 * math.pi)
    n = round(turns)
    if abs(turns - n) > 1e-2:
        raise ContourError(f"winding number {turns} is not close to an integer")
    return int(n)


def count_zeros(
    params: ModelParams,
    r_inner: float = 1e-3,
    r_outer: float = 1e3,
    samples: int = 256,
) -> int:
    """Total zero count of psi in the annulus, over the whole cut plane.

    Combines the right half-annulus with twice the upper-left quarter
    (zeros off the real axis come in conjugate pairs).  If a zero happens
    to sit on a contour, the radii are nudged and the count retried.
    """
    ri, ro = r_inner, r_outer
    last: ContourError | None = None
    for _ in range(6):
        try:
            right = winding_number(params, ContourSpec(ri, ro, "right", samples))
            upper = winding_number(params, ContourSpec(ri, ro, "left-upper", samples))
            return right + 2 * upper
        except ContourError as exc:
            last = exc
            ri *= 0.953
            ro *= 1.049
    raise ContourError(f"could not find a zero-free contour: {last}")


@dataclass(frozen=True)
class ZeroSet:
    """Zeros of psi located in an annulus, with bookkeeping.

    ``zeros`` holds one representative per conjugate pair (Im z > 0);
    ``real_zeros`` are zeros on the positive real axis, listed once.
    ``count_verified`` is True when polishing accounted for every zero the
    winding numbers promised.  ``simple`` is True when |psi'| is comfortably
    nonzero at every zero found, i.e. all residues are well defined.
    """

    zeros: tuple[complex, ...]
    real_zeros: tuple[float, ...] = ()
    total_count: int = 0
    count_verified: bool = True
    simple: bool = True

    def __len__(self) -> int:
        return 2 * len(self.zeros) + len(self.real_zeros)


def _newton_polish(
    params: ModelParams, z0: complex, scale_r: float, r_cap: float = 1e9
) -> complex | None:
    z = z0
    for _ in range(60):
        psi = char_function(params, z)
        if abs(psi) < 1e-13 * _guard_scale(params, abs(z)):
            return z
        dpsi = char_function_deriv(params, z)
        if dpsi == 0:
            return None
        step = psi / dpsi
        if not (math.isfinite(step.real) and math.isfinite(step.imag)):
            return None
        z = z - step
        if abs(z) < scale_r * 1e-6 or abs(z) > r_cap:
            return None
    return None


def find_zeros(
    params: ModelParams,
    r_inner: float = 1e-3,
    r_outer: float = 1e3,
    samples: int = 256,
) -> ZeroSet:
    """Locate all zeros of psi in the annulus and verify the count.

    The winding number fixes how many zeros exist; Newton iterations from a
    log-polar seed grid then locate them.  When the two disagree the set is
    returned with ``count_verified=False`` rather than raising, so callers
    can decide whether a partial answer is usable.
    """
    total = count_zeros(params, r_inner, r_outer, samples)
    if total == 0:
        return ZeroSet(zeros=(), real_zeros=(), total_count=0)

    found: list[complex] = []
    radii = np.logspace(math.log10(r_inner * 3), math.log10(r_outer / 3), 40)
    angles = np.linspace(0.03 * math.pi, 0.995 * math.pi, 28)
    for r in radii:
        for phi in angles:
            z = _newton_polish(params, r * cmath.exp(1j * phi), r_inner, r_outer * 1e4)
            if z is None:
                continue
            if not (r_inner < abs(z) < r_outer):
                continue
            if z.imag < -1e-9 * abs(z):
                z = z.conjugate()
            if any(abs(z - w) <= 1e-7 * max(abs(z), abs(w)) for w in found):
                continue
            found.append(z)

    complex_zeros = tuple(
        sorted((z for z in found if z.imag > 1e-9 * abs(z)), key=abs)
    )
    real_zeros = tuple(
        sorted(z.real for z in found if abs(z.imag) <= 1e-9 * abs(z) and z.real > 0)
    )
    verified = (2 * len(complex_zeros) + len(real_zeros)) == total
    simple = all(
        abs(char_function_deriv(params, z))
        > 1e-8 * _guard_scale(params, abs(z)) / abs(z)
        for z in (*complex_zeros, *(complex(x) for x in real_zeros))
    )
    return ZeroSet(
        zeros=complex_zeros,
        real_zeros=real_zeros,
        total_count=total,
        count_verified=verified,
        simple=simple,
    )


# ---------------------------------------------------------------------------
# creep kernel: branch-cut integral, residues, tabulation
# ---------------------------------------------------------------------------


def kernel_density(params: ModelParams, q):
    """Density of the branch-cut part: K_cut(t) = integral of e^{-qt} * this.

    Equals Im psi(q e^{i pi}) / (pi |psi(q e^{i pi})|^2), the jump of
    1/psi across the cut divided by 2 pi i.
    """
    q = np.asarray(q, dtype=float)
    re, im = char_function_polar(params, q, math.pi)
    re, im = np.asarray(re), np.asarray(im)
    out = im / (math.pi * (re * re + im * im))
    return out if out.ndim else float(out)


def creep_kernel_integral(params: ModelParams, t: float, tol: float = 1e-10) -> float:
    """Branch-cut contribution to the creep kernel at a single t > 0.

    Uses the substitution u = q t, so the e^{-u} window always sits at
    u = O(1) and the density is sampled around q ~ 1/t no matter how large
    t is.
    """
    if t <= 0.0:
        raise ValueError("kernel integral needs t > 0")

    def f(u):
        return np.exp(-u) * kernel_density(params, u / t)

    return float(adaptive_quad(f, 0.0, math.inf, tol=tol).real) / t


def _cut_cell_mass(params: ModelParams, t0: float, t1: float, tol: float) -> float:
    """Integral over [t0, t1] of the branch-cut kernel part.

    Integrating e^{-q t} in t first leaves the factor
    (e^{-q t0} - e^{-q t1}) / q against the cut density.  For t0 = 0 that
    integrand decays only like q^(-1-alpha), so the substitution q = e^u
    is applied and the u-interval truncated where the tail is provably
    below 1e-13 relative.
    """
    if t0 == 0.0:
        u_hi = min(700.0, 40.0 / params.alpha)
    else:
        u_hi = max(math.log(45.0 / t0), -35.0)
    u_lo = u_hi - 80.0 if u_hi - 80.0 < -40.0 else -40.0

    def g(u):
        q = np.exp(u)
        return kernel_density(params, q) * (np.exp(-q * t0) - np.exp(-q * t1))

    return float(adaptive_quad(g, u_lo, u_hi, tol=tol).real)


def creep_kernel_residues(params: ModelParams, zeros: ZeroSet, t):
    """Residue contribution sum_z e^{zt}/psi'(z) over all zeros, real-valued."""
    tt = np.asarray(t, dtype=float)
    out = np.zeros_like(tt)
    for z in zeros.zeros:
        out = out + 2.0 * (np.exp(z * tt) / char_function_deriv(params, z)).real
    for x in zeros.real_zeros:
        out = out + (np.exp(complex(x) * tt) / char_function_deriv(params, complex(x))).real
    return out if out.ndim else float(out)


def _residue_cell_masses(
    params: ModelParams, zeros: ZeroSet, t0: np.ndarray, t1: np.ndarray
) -> np.ndarray:
    """Exact integrals of the residue part over cells [t0, t1]."""
    out = np.zeros_like(t0)
    for z in zeros.zeros:
        c = 1.0 / (z * char_function_deriv(params, z))
        out = out + 2.0 * (c * (np.exp(z * t1) - np.exp(z * t0))).real
    for x in zeros.real_zeros:
        z = complex(x)
        c = 1.0 / (z * char_function_deriv(params, z))
        out = out + (c * (np.exp(z * t1) - np.exp(z * t0))).real
    return out


def _cut_total_mass(params: ModelParams, tol: float = 1e-10) -> float:
    """Integral of the branch-cut kernel part over all t > 0.

    Integrating the Laplace representation in t first leaves the cut
    density against 1/q; the substitution q = e^u then makes both tails
    exponentially small, alpha setting the rate.
    """
    u_cap = min(650.0, 40.0 / params.alpha)

    def g(u):
        return kernel_density(params, np.exp(u))

    return float(adaptive_quad(g, -u_cap, u_cap, tol=tol).real)


def residue_total_mass(params: ModelParams, zeros: ZeroSet) -> float:
    """Integral of the residue kernel part over all t > 0.

    Each conjugate pair contributes -2 Re(1/(z psi'(z))); a real zero
    contributes the same without the doubling.
    """
    total = 0.0
    for z in zeros.zeros:
        total += -2.0 * (1.0 / (z * char_function_deriv(params, z))).real
    for x in zeros.real_zeros:
        z = complex(x)
        total += -(1.0 / (z * char_function_deriv(params, z))).real
    return total


def _merged_zero_set(base: ZeroSet, extra: ZeroSet) -> ZeroSet:
    zeros = list(base.zeros)
    for z in extra.zeros:
        if not any(abs(z - w) <= 1e-7 * max(abs(z), abs(w)) for w in zeros):
            zeros.append(z)
    reals = sorted(set(base.real_zeros) | set(extra.real_zeros))
    return ZeroSet(
        zeros=tuple(sorted(zeros, key=abs)),
        real_zeros=tuple(reals),
        total_count=base.total_count + extra.total_count,
        count_verified=base.count_verified and extra.count_verified,
        simple=base.simple and extra.simple,
    )


def kernel_zero_set(
    params: ModelParams,
    *,
    tol: float = 1e-10,
    mass_tol: float = 1e-7,
    max_shells: int = 8,
) -> ZeroSet:
    """Zero set complete enough for kernel assembly, checked by total mass.

    The creep kernel integrates to exactly 1 because psi(0) = 1, which
    gives a completeness oracle that costs one quadrature: cut mass plus
    the residue masses of the zeros found so far must close the budget.
    When it does not close, psi still has zeros beyond the searched
    annulus.  For a < 2b cosh(pi B) they recur near the negative real
    axis every factor e^{2 pi / B} in radius with geometrically shrinking
    masses, so the search is pushed outward shell by shell until the
    missing mass drops below ``mass_tol``.
    """
    zeros = find_zeros(params)
    cut = _cut_total_mass(params, tol=tol)
    deficit = 1.0 - cut - residue_total_mass(params, zeros)
    if abs(deficit) <= mass_tol:
        return zeros
    if params.B <= 0.0:
        raise ZeroSearchError(
            f"kernel mass misses 1 by {deficit:.3e} with no oscillatory order present"
        )
    r_lo = 1e3
    span = math.exp(2.0 * math.pi / params.B)
    for _ in range(max_shells):
        r_hi = r_lo * span * 8.0
        shell = find_zeros(params, r_inner=r_lo * 0.9, r_outer=r_hi)
        zeros = _merged_zero_set(zeros, shell)
        deficit = 1.0 - cut - residue_total_mass(params, zeros)
        if abs(deficit) <= mass_tol:
            return zeros
        r_lo = r_hi
    raise ZeroSearchError(
        f"kernel mass still misses 1 by {deficit:.3e} after extending the "
        f"zero search to |z| < {r_lo:.3e}"
    )


@dataclass(frozen=True)
class KernelTable:
    """Creep kernel sampled on a uniform grid, plus exact cell masses.

    ``values[j]`` is K(t[j]); the kernel diverges like t^(alpha-1) at the
    origin, so ``values[0]`` is +inf.  ``masses[m]`` is the integral of K
    over the cell [t[m], t[m+1]]: the first ``head_cells`` of them are
    computed by integrating the kernel representation in closed form
    against each cell (the only way to keep the singular head accurate),
    the rest by the trapezoid rule on the node values.  The convolution
    solver consumes the masses, never the raw node values.
    """

    params: ModelParams
    t: np.ndarray
    values: np.ndarray
    masses: np.ndarray
    head_cells: int
    zeros: ZeroSet = field(default_factory=lambda: ZeroSet(zeros=()))

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    def cumulative(self) -> np.ndarray:
        """Integral of K from 0 to each node, masses accumulated."""
        out = np.empty_like(self.t)
        out[0] = 0.0
        np.cumsum(self.masses, out=out[1:])
        return out


def build_kernel_table(
    params: ModelParams,
    t_max: float,
    steps: int,
    *,
    tol: float = 1e-10,
    head_cells: int = 32,
    zeros: ZeroSet | None = None,
) -> KernelTable:
    """Tabulate the creep kernel on linspace(0, t_max, steps + 1).

    When ``zeros`` is not supplied the zero set is determined here, so the
    residue part can never be silently forgotten.
    """
    if steps < 2:
        raise ValueError("need at least 2 steps")
    if t_max <= 0.0:
        raise ValueError("t_max must be positive")
    if zeros is None:
        zeros = kernel_zero_set(params, tol=tol)
    if not zeros.count_verified:
        raise ZeroSearchError(
            "zero count not verified; refusing to build an incomplete kernel"
        )
    if not zeros.simple:
        raise ZeroSearchError("multiple zero of psi: residue formula does not apply")

    t = np.linspace(0.0, t_max, steps + 1)
    values = np.empty_like(t)
    values[0] = math.inf
    for j in range(1, steps + 1):
        values[j] = creep_kernel_integral(params, float(t[j]), tol=tol)
    if len(zeros):
        values[1:] += creep_kernel_residues(params, zeros, t[1:])

    m_head = min(head_cells, steps)
    masses = np.empty(steps)
    for m in range(m_head):
        masses[m] = _cut_cell_mass(params, float(t[m]), float(t[m + 1]), tol)
    if m_head:
        masses[:m_head] += _residue_cell_masses(
            params, zeros, t[:m_head], t[1 : m_head + 1]
        )
    if m_head < steps:
        dt = t[1] - t[0]
        masses[m_head:] = 0.5 * dt * (values[m_head:-1] + values[m_head + 1 :])

    return KernelTable(
        params=params,
        t=t,
        values=values,
        masses=masses,
        head_cells=m_head,
        zeros=zeros,
    )


def solve_strain(table: KernelTable, sigma: np.ndarray) -> np.ndarray:
    """Strain response eps(t) = integral of K(tau) sigma(t - tau) d tau.

    ``sigma`` must be sampled on the table's grid.  Each cell contributes
    its exact kernel mass times the average of the two stress samples it
    multiplies, which keeps the singular head of K from polluting the
    quadrature.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != table.t.shape:
        raise ValueError("sigma must be sampled on the kernel table grid")
    paired = 0.5 * (sigma[1:] + sigma[:-1])
    eps = np.empty_like(sigma)
    eps[0] = 0.0
    eps[1:] = np.convolve(table.masses, paired)[: len(sigma) - 1]
    return eps


# ---------------------------------------------------------------------------
# Laplace inversion by high-order differentiation (Post's formula)
# ---------------------------------------------------------------------------


def post_invert(params: ModelParams, t, n: int = 25):
    """Unit-step creep strain via Post's inversion of 1/(s psi(s)).

    eps(t) is approximated by (-1)^n s0^(n+1) c_n with s0 = n/t and c_n the
    n-th Taylor coefficient of 1/(s psi(s)) at s0, computed with truncated
    power series arithmetic (no finite differences).  Exact in the limit
    n -> infinity; n ~ 25 gives a few-percent answer, which is its role:
    an independent cross-check on the kernel route.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")

    def single(tv: float) -> float:
        if tv <= 0.0:
            raise ValueError("inversion needs t > 0")
        s0 = n / tv
        jet = Jet.variable(s0, n)
        coeff = (Jet.constant(1.0, n) / (jet * char_function(params, jet))).coef[n]
        value = (-1.0) ** n * s0 ** (n + 1) * coeff
        if abs(value.imag) > 1e-8 * (1.0 + abs(value.real)):
            raise RealnessError(
                f"inversion produced imaginary part {value.imag:g} at t={tv:g}"
            )
        return float(value.real)

    tt = np.asarray(t, dtype=float)
    if tt.ndim == 0:
        return single(float(tt))
    return np.array([single(float(tv)) for tv in tt])
