"""Dissipation inequalities for the complex-order Kelvin-Voigt model.

The constitutive law

    sigma = eps + a D^alpha eps + b (D^beta + D^conj(beta)) eps,
    beta = alpha + iB,

is admissible when its complex modulus E(omega) (the steady-state response
to e^{i omega t}, with unit elastic term dropped) has non-negative real and
imaginary parts for all omega > 0.  Minimizing the oscillatory factors over
omega turns that into a closed-form lower bound on a in terms of b, alpha
and B.  Which trigonometric branch binds depends on whether alpha is below
or above 1/2.  A stronger bound of the same shape guarantees that the
characteristic function has no zeros anywhere off the branch cut.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "ModelParams",
    "AdmissibilityReport",
    "StrongCheck",
    "PositivityScan",
    "complex_modulus",
    "storage_loss",
    "thermo_threshold",
    "strong_threshold",
    "check_thermo",
    "check_strong",
    "positivity_scan",
    "default_omega_grid",
]


@dataclass(frozen=True)
class ModelParams:
    """Coefficients of the model: a, b >= 0, 0 < alpha < 1, B >= 0.

    The physical model has a, b, B strictly positive; the degenerate edges
    (pure real order b = 0, pure complex pair a = 0, real-order limit B = 0)
    are permitted here so reduction checks can use the same type.
    """

    a: float
    b: float
    alpha: float
    B: float

    def __post_init__(self) -> None:
        for name in ("a", "b", "alpha", "B"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.a < 0.0 or self.b < 0.0:
            raise ValueError(f"need a >= 0 and b >= 0, got a={self.a}, b={self.b}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"need 0 < alpha < 1, got {self.alpha}")
        if self.B < 0.0:
            raise ValueError(f"need B >= 0, got {self.B}")

    @property
    def beta(self) -> complex:
        return complex(self.alpha, self.B)


class StrongCheck(NamedTuple):
    ok: bool
    threshold: float
    branch: str


@dataclass(frozen=True)
class AdmissibilityReport:
    params: ModelParams
    thermo_ok: bool
    thermo_threshold: float
    thermo_branch: str
    strong_ok: bool
    strong_threshold: float
    strong_branch: str


def complex_modulus(params: ModelParams, omega, include_unit: bool = False):
    """Complex modulus E(omega) for omega > 0 (array friendly).

    With ``include_unit`` the constant elastic term 1 is added, which makes
    the result equal to the characteristic function evaluated at i*omega.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0.0):
        raise ValueError("omega must be positive")
    a, b, al, bb = params.a, params.b, params.alpha, params.B
    half_turn = 0.5 * math.pi * al
    wa = w**al
    lnw = np.log(w)
    out = a * wa * np.exp(1j * half_turn) + b * wa * (
        math.exp(-0.5 * math.pi * bb) * np.exp(1j * (half_turn + bb * lnw))
        + math.exp(0.5 * math.pi * bb) * np.exp(1j * (half_turn - bb * lnw))
    )
    if include_unit:
        out = out + 1.0
    return out if out.ndim else complex(out)


def storage_loss(params: ModelParams, omega):
    """Real and imaginary parts of the complex modulus, expanded form.

    Returns the pair (storage, loss).  Computed from the trigonometric
    expansion rather than from ``complex_modulus``, so the two routes
    cross-validate each other.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0.0):
        raise ValueError("omega must be positive")
    a, b, al, bb = params.a, params.b, params.alpha, params.B
    half_turn = 0.5 * math.pi * al
    ca, sa = math.cos(half_turn), math.sin(half_turn)
    ch = math.cosh(0.5 * math.pi * bb)
    sh = math.sinh(0.5 * math.pi * bb)
    wa = w**al
    arg = bb * np.log(w)
    cl, sl = np.cos(arg), np.sin(arg)
    f = ca * cl * ch + sa * sl * sh
    g = sa * cl * ch - ca * sl * sh
    storage = a * wa * ca + 2.0 * b * wa * f
    loss = a * wa * sa + 2.0 * b * wa * g
    if storage.ndim:
        return storage, loss
    return float(storage), float(loss)


def thermo_threshold(params: ModelParams) -> tuple[float, str]:
    """Dissipation lower bound on ``a`` and the branch that produced it."""
    b, al, bb = params.b, params.alpha, params.B
    ch = math.cosh(0.5 * math.pi * bb)
    th = math.tanh(0.5 * math.pi * bb)
    half_turn = 0.5 * math.pi * al
    if al <= 0.5:
        trig = math.cos(half_turn) / math.sin(half_turn)
        branch = "cot (alpha <= 1/2)"
    else:
        trig = math.tan(half_turn)
        branch = "tan (alpha >= 1/2)"
    return 2.0 * b * ch * math.sqrt(1.0 + (trig * th) ** 2), branch


def strong_threshold(params: ModelParams) -> tuple[float, str]:
    """Lower bound on ``a`` forbidding zeros of the characteristic function."""
    b, al, bb = params.b, params.alpha, params.B
    ch = math.cosh(math.pi * bb)
    th = math.tanh(math.pi * bb)
    turn = math.pi * al
    if 0.25 <= al <= 0.75 and al != 0.5:
        trig = math.tan(turn)
        branch = "tan (1/4 <= alpha <= 3/4, alpha != 1/2)"
    else:
        # cot(pi * alpha); zero at alpha = 1/2, where the bound is 2 b cosh(pi B)
        trig = math.cos(turn) / math.sin(turn)
        branch = "cot (alpha < 1/4, alpha = 1/2 or alpha > 3/4)"
    return 2.0 * b * ch * math.sqrt(1.0 + (trig * th) ** 2), branch


def check_strong(params: ModelParams) -> StrongCheck:
    threshold, branch = strong_threshold(params)
    return StrongCheck(ok=params.a >= threshold, threshold=threshold, branch=branch)


def check_thermo(params: ModelParams) -> AdmissibilityReport:
    """Evaluate both the dissipation bound and the no-zero bound."""
    t_thr, t_branch = thermo_threshold(params)
    strong = check_strong(params)
    return AdmissibilityReport(
        params=params,
        thermo_ok=params.a >= t_thr,
        thermo_threshold=t_thr,
        thermo_branch=t_branch,
        strong_ok=strong.ok,
        strong_threshold=strong.threshold,
        strong_branch=strong.branch,
    )


class PositivityScan(NamedTuple):
    min_storage: float
    argmin_storage: float
    min_loss: float
    argmin_loss: float


def default_omega_grid(
    lo: float = 1e-4, hi: float = 1e4, points: int = 1000
) -> np.ndarray:
    return np.logspace(math.log10(lo), math.log10(hi), points)


def positivity_scan(params: ModelParams, omega_grid=None) -> PositivityScan:
    """Minima of storage and loss moduli over a frequency grid."""
    w = default_omega_grid() if omega_grid is None else np.asarray(omega_grid, float)
    if w.size < 2:
        raise ValueError("need a real grid to scan")
    storage, loss = storage_loss(params, w)
    i = int(np.argmin(storage))
    j = int(np.argmin(loss))
    return PositivityScan(
        min_storage=float(storage[i]),
        argmin_storage=float(w[i]),
        min_loss=float(loss[j]),
        argmin_loss=float(w[j]),
    )
