"""Truncated explicit formula, zero-sum bounds and exact L2 integrals of error terms.

The integrals are computed by an event sweep. Along u the set of n counted by
the window moves only when an endpoint crosses a prime power, so between two
events the sum part of Delta is a constant S and the main term is linear in u.
Each segment [u0, u1] then contributes, with c its midpoint, d its half width
and k the slope of the main term,

    int |S - m(c) - k t|^2 dt over [-d, d] = 2d |S - m(c)|^2 + 2 k^2 d^3 / 3,

which avoids the cancellation of the expanded quadratic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith_chars import DirichletCharacter
from .chebyshev_delta import delta, main_coefficient
from .lfunc_zeros import ZeroSet, zeros_for_character
from .prime_sieve import kernel_weights, lambda_points

__all__ = [
    "EVENT_BUDGET",
    "FormulaEvaluation",
    "Sweep",
    "fit_constant",
    "kernel_points",
    "l2_integral_exact",
    "lemma_allints_bound",
    "lemma_l2_bound",
    "residual_scan",
    "sweep",
    "zero_sum",
]

EVENT_BUDGET = 50_000_000


@dataclass(frozen=True)
class FormulaEvaluation:
    x: float
    y: float
    q: int
    label: int
    T: float
    zero_sum: complex
    truth: complex
    residual: complex
    envelope: float

    @property
    def ratio(self) -> float:
        return abs(self.residual) / self.envelope


def _fsum_complex(values: np.ndarray) -> complex:
    return complex(math.fsum(values.real), math.fsum(values.imag))


def _truncate(zeros: ZeroSet, T: float) -> tuple[np.ndarray, np.ndarray]:
    if T > zeros.tmax:
        raise ValueError(f"T={T} exceeds the completeness height {zeros.tmax} of the zero set")
    g, b = zeros.gammas, zeros.betas
    keep = np.abs(g) <= T
    g, b = g[keep], b[keep]
    order = np.argsort(np.abs(g), kind="stable")
    return g[order], b[order]


def zero_sum(x: float, y: float, zeros: ZeroSet, T: float) -> complex:
    """-sum_{|gamma| <= T} ((x+y)^rho - x^rho) / rho."""
    g, b = _truncate(zeros, T)
    if g.size == 0:
        return 0j
    rho = b + 1j * g
    lx, lxy = math.log(x), math.log(x + y)
    terms = (np.exp(rho * lxy) - np.exp(rho * lx)) / rho
    return -_fsum_complex(terms)


def residual_scan(
    x: float,
    y: float,
    chi: DirichletCharacter,
    T_list,
    zeros: ZeroSet | None = None,
    C: float = 1.0,
) -> list[FormulaEvaluation]:
    """Explicit-formula residuals Delta_psi - zero_sum for each truncation height."""
    if zeros is None:
        zeros = zeros_for_character(chi)
    truth = delta(x, y, chi, "psi").value
    env_base = math.log(chi.q * x) ** 2 * x
    out = []
    for T in T_list:
        zs = zero_sum(x, y, zeros, T)
        out.append(FormulaEvaluation(x, y, chi.q, chi.label, T, zs, truth, truth - zs, C * env_base / T))
    return out


def fit_constant(evaluations) -> float:
    """Smallest C with |residual| <= C (x/T) log^2(qx) on all evaluations."""
    return max(ev.ratio for ev in evaluations)


def lemma_allints_bound(x: float, y: float, zeros: ZeroSet, T: float, q: int | None = None) -> float:
    """(|y|/x) sum_{|gamma| <= T} x^beta + (x/T) log^2(qx)."""
    q = zeros.q if q is None else q
    _, b = _truncate(zeros, T)
    lx = math.log(x)
    zsum = math.fsum(np.exp(b * lx))
    return abs(y) / x * zsum + x / T * math.log(q * x) ** 2


def lemma_l2_bound(X: float, theta: float, zeros: ZeroSet, T: float, q: int | None = None) -> float:
    """sum X^{1+2beta} min(theta^2, gamma^-2) log(q(|gamma|+2)) + (X^3/T^2) log^4(qX)."""
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    if not 4 <= T <= X:
        raise ValueError("need 4 <= T <= X")
    q = zeros.q if q is None else q
    g, b = _truncate(zeros, T)
    with np.errstate(divide="ignore"):
        damp = np.minimum(theta**2, 1.0 / g**2)
    lX = math.log(X)
    terms = np.exp((1 + 2 * b) * lX) * damp * np.log(q * (np.abs(g) + 2))
    return math.fsum(terms) + X**3 / T**2 * math.log(q * X) ** 4


# ----------------------------------------------------------------- sweep


@dataclass(frozen=True)
class Sweep:
    """Segments [left, right) of constant sum part, with Delta at the midpoint.

    ``slope`` is d(main term)/du, so Delta(u) = value - slope (u - mid) on a segment.
    """

    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    slope: float
    pieces: np.ndarray

    @property
    def integral(self) -> float:
        return math.fsum(self.pieces)

    @property
    def sup(self) -> float:
        """sup |Delta| over the range (attained at a segment end)."""
        if self.value.size == 0:
            return 0.0
        d = 0.5 * (self.right - self.left)
        a = np.abs(self.value - self.slope * d)
        b = np.abs(self.value + self.slope * d)
        return float(max(a.max(), b.max()))

    def exception_count(self, threshold: float) -> int:
        """Number of integers u in the range with |Delta(u)| > threshold.

        Exact when the slope is zero (h-mode); otherwise the segment midpoint
        value stands in for the whole segment.
        """
        bad = np.abs(self.value) > threshold
        ints = np.ceil(self.right[bad]) - np.ceil(self.left[bad])
        return int(ints.sum())

    def exception_measure(self, threshold: float) -> float:
        bad = np.abs(self.value) > threshold
        return math.fsum(self.right[bad] - self.left[bad])


def sweep(
    n: np.ndarray,
    c: np.ndarray,
    main: float,
    lo: float,
    hi: float,
    mode: str,
    length: float,
) -> Sweep:
    """Exact sweep of |Delta(u)|^2 over u in [lo, hi] for raw points.

    ``n`` sorted support, ``c`` complex weights; ``main`` is the density of the
    main term. In ``h`` mode Delta(u) = sign * sum_{window} c - main * h with the
    window (u, u+h] (or (u+h, u] for h < 0); in ``theta`` mode the window is
    (u, u(1+theta)] and the main term main * theta * u.
    """
    n = np.asarray(n, dtype=np.float64)
    c = np.asarray(c, dtype=np.complex128)
    if hi <= lo:
        raise ValueError("empty integration range")
    P = np.concatenate([[0j], np.cumsum(c)])

    if mode == "h":
        h = float(length)
        if h == 0:
            raise ValueError("h must be nonzero")
        a, b = (0.0, h) if h > 0 else (h, 0.0)
        enter, leave = n - b, n - a
        main_const, slope, orient = main * abs(h), 0.0, (1.0 if h > 0 else -1.0)
    elif mode == "theta":
        theta = float(length)
        if theta <= 0:
            raise ValueError("theta must be positive")
        enter, leave = n / (1 + theta), n
        main_const, slope, orient = 0.0, main * theta, 1.0
    else:
        raise ValueError(f"unknown mode {mode!r}")

    events = np.concatenate([enter, leave])
    events = events[(events > lo) & (events < hi)]
    if events.size > EVENT_BUDGET:
        raise MemoryError(f"{events.size} events exceed the budget of {EVENT_BUDGET}")
    cuts = np.unique(np.concatenate([[lo], events, [hi]]))
    left, right = cuts[:-1], cuts[1:]
    mid = 0.5 * (left + right)

    if mode == "h":
        i0 = np.searchsorted(n, mid + a, side="right")
        i1 = np.searchsorted(n, mid + b, side="right")
    else:
        i0 = np.searchsorted(n, mid, side="right")
        i1 = np.searchsorted(n, mid * (1 + theta), side="right")
    S = P[i1] - P[i0]
    value = orient * (S - main_const - slope * mid)
    d = 0.5 * (right - left)
    pieces = 2 * d * (value.real**2 + value.imag**2) + 2 * slope**2 * d**3 / 3
    return Sweep(left, right, value, slope, pieces)


def kernel_points(lo: float, hi: float, kernel, weight: str = "theta"):
    """Support and twisted weights of the kernel on the integers of (lo, hi]."""
    seg = lambda_points(lo, hi - lo)
    n, w = seg.points(weight)
    if kernel is None:
        return n, w.astype(np.complex128)
    k = kernel_weights(n, kernel)
    keep = k != 0  # points outside the class or sharing a factor with q never count
    return n[keep], (w * k)[keep]


def _points_range(X: float, upper: float, mode: str, length: float) -> tuple[float, float]:
    if mode == "h":
        return X + min(length, 0.0), upper + max(length, 0.0)
    return X, upper * (1 + length)


def l2_integral_exact(
    X: float,
    mode: str,
    length: float,
    kernel,
    weight: str = "theta",
    upper: float | None = None,
    main: float | None = None,
    full: bool = False,
):
    """int_X^{upper} |Delta(u, h, kernel)|^2 du (h mode) or |Delta(u, theta u)|^2 (theta mode).

    ``upper`` defaults to 2X. ``main`` overrides the main-term density
    (0 disables it). With ``full`` the Sweep is returned instead of the value.
    """
    upper = 2 * X if upper is None else upper
    if mode == "h" and not 0 < abs(length) <= X:
        raise ValueError("need 0 < |h| <= X")
    if mode == "theta" and not 0 < length <= 1:
        raise ValueError("theta must lie in (0, 1]")
    lo, hi = _points_range(X, upper, mode, length)
    n, c = kernel_points(lo, hi, kernel, weight)
    m = (main_coefficient(kernel) if kernel is not None else 1.0) if main is None else main
    res = sweep(n, c, m, X, upper, mode, length)
    return res if full else res.integral
