"""Window functions for shrinking targets and their exact Fourier data.

The target set E_q^gamma = {x : ||q x - gamma|| <= psi(q)} is sandwiched
between periodized piecewise-linear windows W- <= 1_E <= W+ built from
trapezoidal bumps chi+- of half-width psi(q)/q around the shifted rationals
(p + gamma)/q.  Their Fourier coefficients have closed forms supported on
multiples of q; the absolute coefficient sum stays below 3/sqrt(eps)
uniformly, which is what makes the measure estimates work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .arith import FactoredNat

__all__ = [
    "WindowSpec",
    "WSpec",
    "dist_to_int",
    "chi",
    "chi_window",
    "chi_window_hat",
    "comb_window",
    "comb_window_hat",
    "comb_window_hat_multiple",
    "comb_window_hat_abs_sum",
    "target_intervals",
    "intersection_measure",
    "simpson_fourier",
]

TWO_PI = 2.0 * math.pi


def dist_to_int(x):
    """||x||: distance to the nearest integer (works on arrays)."""
    f = np.mod(x, 1.0)
    return np.minimum(f, 1.0 - f)


@dataclass(frozen=True)
class WindowSpec:
    """Half-width delta in (0, 1/4), slope parameter eps in (0, 1], sign."""

    delta: float
    eps: float
    sign: str  # "upper" | "lower"

    def __post_init__(self):
        if not 0 < self.delta < 0.25:
            raise ValueError("delta must lie in (0, 1/4)")
        if not 0 < self.eps <= 1:
            raise ValueError("eps must lie in (0, 1]")
        if self.sign not in ("upper", "lower"):
            raise ValueError("sign must be 'upper' or 'lower'")


@dataclass(frozen=True)
class WSpec:
    """Parameters of one periodized window: denominator, shift, eps, psi(q)."""

    q: Union[int, FactoredNat]
    gamma: float
    eps: float
    psi_q: float

    def __post_init__(self):
        if self.q_log() < math.log(4) - 1e-12:
            raise ValueError("q must be >= 4")
        if not 0 <= self.gamma <= 1:
            raise ValueError("gamma must lie in [0, 1]")
        if not 0 < self.eps <= 1:
            raise ValueError("eps must lie in (0, 1]")
        if not 0 < self.psi_q <= 1:
            raise ValueError("psi(q) must lie in (0, 1]")
        if self.q_is_int() and self.psi_q / int(self.q) >= 0.25:
            raise ValueError("psi(q)/q must stay below 1/4")

    def q_is_int(self) -> bool:
        return isinstance(self.q, int)

    def q_int(self) -> int:
        if not self.q_is_int():
            raise TypeError("q is not a machine integer; use the hat lattice")
        return self.q

    def q_log(self) -> float:
        return math.log(self.q) if self.q_is_int() else self.q.log()


def chi(x, delta: float):
    """Sharp indicator of ||x|| <= delta."""
    return (dist_to_int(x) <= delta).astype(float) if isinstance(
        x, np.ndarray) else float(dist_to_int(x) <= delta)


def _bump(d, delta: float, eps: float, sign: str):
    """Trapezoid profile as a function of the distance d >= 0."""
    d = np.asarray(d, dtype=float)
    if sign == "upper":
        inner, outer = delta, (1 + eps) * delta
    else:
        inner, outer = (1 - eps) * delta, delta
    slope_val = (delta - d) / (delta * eps)
    if sign == "upper":
        slope_val = 1.0 + slope_val
    out = np.where(d <= inner, 1.0, np.where(d <= outer, slope_val, 0.0))
    return out


def chi_window(x, spec: WindowSpec):
    """The continuous upper/lower approximation of chi at x (exact piecewise)."""
    v = _bump(dist_to_int(x), spec.delta, spec.eps, spec.sign)
    return float(v) if np.ndim(x) == 0 else v


def chi_window_hat(k: int, spec: WindowSpec) -> float:
    """k-th Fourier coefficient of the trapezoidal window (real, even in k)."""
    d, e = spec.delta, spec.eps
    if k == 0:
        return (2 + e) * d if spec.sign == "upper" else (2 - e) * d
    if spec.sign == "upper":
        num = math.cos(TWO_PI * k * d) - math.cos(TWO_PI * k * d * (1 + e))
    else:
        num = math.cos(TWO_PI * k * d * (1 - e)) - math.cos(TWO_PI * k * d)
    return num / (2 * math.pi ** 2 * k ** 2 * d * e)


def comb_window(x, w: WSpec, sign: str):
    """Direct evaluation of the periodized window sum at x.

    Uses the lift W(x) = sum_j bump((q x - gamma - j)/q): the bump support
    has width (1+eps) psi(q) <= 2 in the y = q x - gamma variable, so at most
    five integer translates contribute.
    """
    q = w.q_int()
    delta = w.psi_q / q
    y = np.asarray(x, dtype=float) * q - w.gamma
    j0 = np.floor(y)
    total = np.zeros_like(y)
    for off in (-2.0, -1.0, 0.0, 1.0, 2.0):
        u = np.abs(y - (j0 + off)) / q
        total += _bump(u, delta, w.eps, sign)
    return float(total) if np.ndim(x) == 0 else total


def comb_window_hat_multiple(s: int, w: WSpec, sign: str) -> complex:
    """Coefficient at k = s q; depends on q only through psi(q) and gamma.

    Safe for astronomically large q (no materialization): the amplitude is
    a cosine difference in s psi(q) and the phase is exp(-2 pi i s gamma).
    """
    psi, e = w.psi_q, w.eps
    if s == 0:
        return complex((2 + e) * psi if sign == "upper" else (2 - e) * psi)
    if sign == "upper":
        num = math.cos(TWO_PI * s * psi) - math.cos(TWO_PI * s * psi * (1 + e))
    else:
        num = math.cos(TWO_PI * s * psi * (1 - e)) - math.cos(TWO_PI * s * psi)
    amp = num / (2 * math.pi ** 2 * s ** 2 * psi * e)
    phase = -TWO_PI * s * w.gamma
    return amp * complex(math.cos(phase), math.sin(phase))


def comb_window_hat(k: int, w: WSpec, sign: str) -> complex:
    """k-th Fourier coefficient of the periodized window: 0 unless q | k."""
    q = w.q_int()
    if k % q != 0:
        return 0j
    return comb_window_hat_multiple(k // q, w, sign)


def comb_window_hat_abs_sum(w: WSpec, sign: str, s_cap: int) -> float:
    """sum over all s of |W_hat(s q)|, with an analytic tail above s_cap.

    Requires s_cap >= 1/(pi psi(q) sqrt(eps)) so the tail is in the regime
    where |W_hat(sq)| <= 1/(pi^2 s^2 psi eps); the result is provably below
    3/sqrt(eps).
    """
    need = 1.0 / (math.pi * w.psi_q * math.sqrt(w.eps))
    if s_cap < need:
        raise ValueError(f"s_cap must be at least {math.ceil(need)}")
    psi, e = w.psi_q, w.eps
    s = np.arange(1, s_cap + 1, dtype=float)
    if sign == "upper":
        num = np.cos(TWO_PI * s * psi) - np.cos(TWO_PI * s * psi * (1 + e))
    else:
        num = np.cos(TWO_PI * s * psi * (1 - e)) - np.cos(TWO_PI * s * psi)
    amps = np.abs(num / (2 * math.pi ** 2 * s ** 2 * psi * e))
    total = abs(comb_window_hat_multiple(0, w, sign)) + 2 * float(amps.sum())
    # sum_{s > cap} s^-2 < 1/cap, both signs
    total += 2.0 / (math.pi ** 2 * psi * e * s_cap)
    return total


def target_intervals(q: int, gamma: float, psi_q: float) -> list[tuple[float, float]]:
    """E_q^gamma as a normalized disjoint union of closed subintervals of [0,1].

    Intervals [(p + gamma - psi)/q, (p + gamma + psi)/q] are clipped to the
    unit interval with wraparound; overlapping or touching pieces merge.
    """
    if q < 1:
        raise ValueError("q must be a positive integer")
    if psi_q < 0:
        raise ValueError("psi must be nonnegative")
    if 2 * psi_q >= 1:
        return [(0.0, 1.0)]
    r = psi_q / q
    pieces = []
    for p in range(q):
        lo = (p + gamma) / q - r
        hi = (p + gamma) / q + r
        if lo < 0:
            pieces.append((0.0, hi))
            pieces.append((lo + 1.0, 1.0))
        elif hi > 1:
            pieces.append((lo, 1.0))
            pieces.append((0.0, hi - 1.0))
        else:
            pieces.append((lo, hi))
    pieces.sort()
    merged = [list(pieces[0])]
    for lo, hi in pieces[1:]:
        if lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    # wraparound touch: first piece starting at 0 and last ending at 1 stay
    # separate pieces of the same set (already disjoint as intervals)
    return [(lo, hi) for lo, hi in merged]


def _intersection_length(a: list[tuple[float, float]],
                         b: list[tuple[float, float]]) -> float:
    total, i, j = 0.0, 0, 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if hi > lo:
            total += hi - lo
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return total


def intersection_measure(q: int, q2: int, gamma: float,
                         psi_q: float, psi_q2: float) -> float:
    """Exact Lebesgue measure of E_q^gamma intersected with E_q2^gamma."""
    return _intersection_length(target_intervals(q, gamma, psi_q),
                                target_intervals(q2, gamma, psi_q2))


def simpson_fourier(f, k: int, nodes: int = 1 << 16) -> complex:
    """Composite-Simpson quadrature of f(x) e^{-2 pi i k x} over [0, 1].

    `nodes` is the (even) number of subintervals; 2^16 is the standardized
    oracle resolution used throughout the test suite.
    """
    if nodes % 2:
        raise ValueError("Simpson needs an even number of subintervals")
    x = np.linspace(0.0, 1.0, nodes + 1)
    vals = np.asarray(f(x), dtype=complex) * np.exp(-2j * math.pi * k * x)
    wts = np.ones(nodes + 1)
    wts[1:-1:2] = 4.0
    wts[2:-1:2] = 2.0
    return complex((vals * wts).sum() * (1.0 / nodes) / 3.0)
