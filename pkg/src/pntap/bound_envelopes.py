"""Zero-free-region profiles, density estimates and the conditional bound envelopes.

Every implied constant is set to 1: these are shapes, not certified bounds.
Formulas are assembled in log space and exponentiated once, so heights up to
1e12 and beyond do not overflow.

Note the almost-all baselines differ in their exceptional term: the
zero-free-region version carries an extra log q factor, the density version
does not. Both are implemented as stated.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .arith_chars import euler_phi

__all__ = [
    "DensityEstimate",
    "EtaProfile",
    "ExceptionalZero",
    "HypothesisError",
    "corollary_window",
    "envelope_all",
    "envelope_almost_all",
    "eta",
    "eta_inv",
    "exceptional_term",
    "h_threshold",
    "omega",
    "optimal_truncation",
    "siegel_upper",
    "tau",
    "y_threshold",
]


class HypothesisError(ValueError):
    """A theorem's hypothesis fails at the requested point."""


@dataclass(frozen=True)
class EtaProfile:
    """Width eta(T) of the zero-free region 1 - eta(T) < beta, |gamma| <= T.

    Families: ``classical`` c/log T, ``vinogradov-korobov``
    c (log T)^{-2/3} (log log T)^{-1/3}, ``constant`` eta0, and ``grh`` (1/2).
    Decreasing families are capped at 1/2.
    """

    family: str = "grh"
    c: float = 0.05
    eta0: float = 0.5
    T0: float = 4.0

    def __post_init__(self):
        if self.family not in ("classical", "vinogradov-korobov", "constant", "grh"):
            raise ValueError(f"unknown eta family {self.family!r}")
        if self.family == "constant" and not 0 < self.eta0 <= 0.5:
            raise ValueError("constant eta must lie in (0, 1/2]")
        if self.family in ("classical", "vinogradov-korobov") and self.c <= 0:
            raise ValueError("profile constant c must be positive")
        if self.family == "vinogradov-korobov" and self.T0 <= math.e:
            raise ValueError("vinogradov-korobov profile needs T0 > e")

    @classmethod
    def grh(cls) -> EtaProfile:
        return cls("grh", eta0=0.5)

    @classmethod
    def constant(cls, eta0: float, T0: float = 4.0) -> EtaProfile:
        return cls("constant", eta0=eta0, T0=T0)

    @classmethod
    def vinogradov_korobov(cls, c: float = 0.05, T0: float = 100.0) -> EtaProfile:
        return cls("vinogradov-korobov", c=c, T0=T0)

    @classmethod
    def classical(cls, c: float = 0.1, T0: float = 4.0) -> EtaProfile:
        return cls("classical", c=c, T0=T0)

    @property
    def is_constant(self) -> bool:
        return self.family in ("constant", "grh")

    @property
    def limit(self) -> float:
        """eta_0 = lim eta(T)."""
        if self.family == "grh":
            return 0.5
        if self.family == "constant":
            return self.eta0
        return 0.0

    def log_value(self, logT: float) -> float:
        """eta as a function of log T (used by the optimizers)."""
        if self.family == "grh":
            return 0.5
        if self.family == "constant":
            return self.eta0
        if self.family == "classical":
            return min(0.5, self.c / logT)
        return min(0.5, self.c * logT ** (-2.0 / 3.0) * math.log(logT) ** (-1.0 / 3.0))

    def to_config(self) -> dict[str, str]:
        out = {"family": self.family, "T0": repr(self.T0)}
        if self.family == "constant":
            out["eta0"] = repr(self.eta0)
        elif self.family != "grh":
            out["c"] = repr(self.c)
        return out

    @classmethod
    def from_config(cls, block: dict[str, str]) -> EtaProfile:
        fam = block.get("family", "grh")
        if fam == "grh":
            return cls.grh()
        if fam == "constant":
            return cls.constant(float(block["eta0"]), float(block.get("T0", 4.0)))
        default_T0 = 100.0 if fam == "vinogradov-korobov" else 4.0
        return cls(fam, c=float(block.get("c", 0.05)), T0=float(block.get("T0", default_T0)))


@dataclass(frozen=True)
class DensityEstimate:
    """sum_chi N(sigma, T, chi) << (qT)^{A(1-sigma)} g(q, T).

    g families: ``constant`` (value), ``log-power`` log^B(qT) and
    ``subexp`` exp(log^{2/3}(qT)).
    """

    A: float = 7.0 / 3.0
    g_family: str = "log-power"
    B: float = 1.0
    value: float = 1.0
    T0: float = 4.0

    def __post_init__(self):
        if self.A < 2:
            raise ValueError("density exponent A must be >= 2")
        if self.g_family not in ("constant", "log-power", "subexp"):
            raise ValueError(f"unknown g family {self.g_family!r}")
        if self.g_family == "constant" and self.value < 1:
            raise ValueError("constant g must be >= 1")

    def log_g(self, q: float, T: float) -> float:
        if self.g_family == "constant":
            return math.log(self.value)
        L = math.log(q * T)
        if self.g_family == "log-power":
            return self.B * math.log(max(L, 1.0))
        return max(L, 1.0) ** (2.0 / 3.0)

    def g(self, q: float, T: float) -> float:
        return math.exp(self.log_g(q, T))

    def to_config(self) -> dict[str, str]:
        return {"A": repr(self.A), "g": self.g_family, "B": repr(self.B), "value": repr(self.value), "T0": repr(self.T0)}

    @classmethod
    def from_config(cls, block: dict[str, str]) -> DensityEstimate:
        A = block.get("A", "7/3")
        A = float(eval_fraction(A))
        return cls(
            A,
            block.get("g", "log-power"),
            float(block.get("B", 1.0)),
            float(block.get("value", 1.0)),
            float(block.get("T0", 4.0)),
        )


def eval_fraction(text: str) -> float:
    """'7/3' -> 2.333..., '2.5' -> 2.5."""
    if "/" in text:
        a, b = text.split("/", 1)
        return float(a) / float(b)
    return float(text)


@dataclass(frozen=True)
class ExceptionalZero:
    q: int
    beta0: float
    provenance: str = "injected"

    def __post_init__(self):
        if not 0 < self.beta0 < 1:
            raise ValueError("exceptional zero must satisfy 0 < beta0 < 1")


# ----------------------------------------------------------------- profiles


def eta(profile: EtaProfile, T: float) -> float:
    if T < profile.T0:
        raise ValueError(f"eta is defined for T >= T0 = {profile.T0}")
    return profile.log_value(math.log(T))


def eta_inv(profile: EtaProfile, v: float) -> float:
    """The height T with eta(T) = v (T0 for constant profiles)."""
    if profile.is_constant:
        if not math.isclose(v, profile.limit):
            raise ValueError(f"constant profile only takes the value {profile.limit}")
        return profile.T0
    top = eta(profile, profile.T0)
    if not 0 < v <= top:
        raise ValueError(f"value {v} outside the range (0, {top}] of eta")
    if v == top:
        return profile.T0
    # eta(T) -> 0 as T -> inf; bracket in log T
    lo = math.log(profile.T0)
    hi = lo + 1.0
    while profile.log_value(hi) > v:
        hi *= 2.0
        if hi > 1e300:
            raise ValueError(f"value {v} not reached")
    root = brentq(lambda s: profile.log_value(s) - v, lo, hi, xtol=1e-14, rtol=1e-12)
    return math.exp(root)


def _argmin_logT(profile: EtaProfile, logx: float) -> float:
    lo = math.log(profile.T0)
    if logx <= lo:
        return lo
    if profile.is_constant:
        return lo

    def f(s):
        return logx * profile.log_value(s) + s

    grid = np.linspace(lo, logx, 2048)
    vals = np.array([f(s) for s in grid])
    i = int(np.argmin(vals))  # first minimum: ties go to smaller T
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, len(grid) - 1)]
    if b <= a:
        return grid[i]
    res = minimize_scalar(f, bounds=(a, b), method="bounded", options={"xatol": 1e-12})
    return res.x if res.fun <= vals[i] else grid[i]


def omega(profile: EtaProfile, x: float) -> float:
    """omega(x) = log x * eta(argmin_{T0 <= T <= x} (log x eta(T) + log T))."""
    if x <= profile.T0:
        raise ValueError("omega needs x > T0")
    logx = math.log(x)
    if profile.is_constant:
        return profile.limit * logx
    return logx * profile.log_value(_argmin_logT(profile, logx))


def tau(A: float, profile: EtaProfile, x: float) -> float:
    """tau = 1 / (1 + A eta(x^{1/A})); needs eta(x^{1/A}) < 1/A."""
    e = profile.log_value(math.log(x) / A)
    if A * e >= 1:
        raise HypothesisError(f"A * eta(x^(1/A)) = {A * e:.6g} >= 1")
    return 1.0 / (1.0 + A * e)


def exceptional_term(x: float, q: int, ez: ExceptionalZero | None) -> float:
    """B(x, q) = x^{beta0}/phi(q), or 0 without an exceptional zero."""
    if ez is None:
        return 0.0
    return math.exp(ez.beta0 * math.log(x)) / euler_phi(q)


def siegel_upper(q: int, eps0: float, c0: float) -> float:
    """Upper bound 1 - c0 / q^{eps0} for a real zero (c0 supplied by the caller)."""
    if eps0 <= 0 or c0 <= 0:
        raise ValueError("eps0 and c0 must be positive")
    return 1.0 - c0 / q**eps0


# ---------------------------------------------------------- all intervals


def y_threshold(mode: str, profile: EtaProfile, density: DensityEstimate | None, q: int, x: float, eps: float) -> float:
    """Lower end of the admissible |y| range."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    L = math.log(q * x)
    if mode == "ingham":
        return math.exp(math.log(q) + math.log(x) - omega(profile, x) + (2 + eps) * math.log(L))
    if mode == "density":
        A = density.A
        e = profile.log_value(math.log(x) / A)
        if A * e >= 1:
            raise HypothesisError(f"A * eta(x^(1/A)) = {A * e:.6g} >= 1")
        inner = math.log(L) + density.log_g(q, x)  # log(log qx * g(q, x))
        log_y = 2 * math.log(q) + (1 - 1 / A) * math.log(x) + inner / (A * e) + (2 + eps) * math.log(L)
        return math.exp(log_y)
    raise ValueError(f"unknown mode {mode!r}")


def envelope_all(
    mode: str,
    profile: EtaProfile,
    density: DensityEstimate | None,
    q: int,
    x: float,
    y: float | None = None,
    ez: ExceptionalZero | None = None,
    eps: float = 0.1,
) -> float:
    """Right-hand side bounding |Delta_theta(x, y, q, a)| for all residues a."""
    L = math.log(q * x)
    if mode == "ingham":
        main = math.exp(math.log(x) + 2 * math.log(L) - omega(profile, x))
        return exceptional_term(x, q, ez) + main
    if mode != "density":
        raise ValueError(f"unknown mode {mode!r}")
    if y is None:
        raise ValueError("density envelope needs y")
    A = density.A
    t = tau(A, profile, x)
    ay = abs(y)
    try:
        low = y_threshold("density", profile, density, q, x, eps)
        if ay < low:
            warnings.warn(f"|y|={ay:g} below the admissible threshold {low:g}", stacklevel=2)
    except OverflowError:
        pass
    log_main = (
        t * math.log(ay)
        + (1 - t) * (1 - 1 / A) * math.log(x)
        + math.log(q)
        + 2 * math.log(L)
        + t * (density.log_g(q, x) - 2 * math.log(q) - math.log(L))
    )
    return ay / x * exceptional_term(x, q, ez) + math.exp(log_main)


def optimal_truncation(A: float, profile: EtaProfile, q: int, x: float, y: float, density: DensityEstimate) -> float:
    """Height T balancing the zero sum against the truncation error."""
    e = profile.log_value(math.log(x) / A)
    if A * e >= 1:
        raise HypothesisError(f"A * eta(x^(1/A)) = {A * e:.6g} >= 1")
    L = math.log(q * x)
    log_T = (
        (1 - A * e) * math.log(q)
        + (1 + e) * math.log(x)
        - math.log(abs(y))
        + math.log(L)
        - density.log_g(q, x)
    ) / (1 + A * e)
    T = math.exp(log_T)
    if T >= math.exp(math.log(x) / A) / q:
        warnings.warn(f"truncation height {T:g} is not below x^(1/A)/q", stacklevel=2)
    return T


# ------------------------------------------------------- almost all intervals


def h_threshold(mode: str, profile: EtaProfile, density: DensityEstimate | None, q: int, X: float, eps: float) -> float:
    """Lower end of the admissible |h| range."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    L = math.log(q * X)
    e = eta(profile, X)
    if mode == "ingham":
        return math.exp(math.log(q) + (1 - 2 * e) * math.log(X) + (2 + eps) * math.log(L))
    if mode == "density":
        A = density.A
        if profile.limit >= 1 / A:
            raise HypothesisError(f"eta_0 = {profile.limit} is not below 1/A = {1 / A:.6g}")
        inner = density.log_g(q, X) + (2 + eps) * math.log(L)
        return math.exp(math.log(q) + (1 - 2 / A) * math.log(X) + inner / e)
    raise ValueError(f"unknown mode {mode!r}")


def envelope_almost_all(
    mode: str,
    profile: EtaProfile,
    density: DensityEstimate | None,
    q: int,
    X: float,
    h: float,
    ez: ExceptionalZero | None = None,
) -> float:
    """Right-hand side bounding sum*_a int_X^{2X} |Delta_theta(u, h, q, a)|^2 du."""
    ah = abs(h)
    L = math.log(q * X)
    B = exceptional_term(X * X, q, ez)
    e = eta(profile, X)
    if mode == "ingham":
        log_main = math.log(ah) + (2 - 2 * e) * math.log(X) + 2 * math.log(math.log(2 * q * X / ah))
        return ah * ah / X * B * math.log(q) + math.exp(log_main)
    if mode != "density":
        raise ValueError(f"unknown mode {mode!r}")
    A = density.A
    if profile.limit >= 1 / A:
        raise HypothesisError(f"eta_0 = {profile.limit} is not below 1/A = {1 / A:.6g}")
    ratio = math.log(ah) - math.log(q) - (1 - 2 / A) * math.log(X)
    log_main = (
        2 * math.log(ah)
        + math.log(X)
        - A * e * ratio
        + density.log_g(q, X)
        + 2 * math.log(L)
        - math.log(euler_phi(q))
    )
    return ah * ah / X * B + math.exp(log_main)


# ------------------------------------------------------------- corollaries

_KIND_ALIASES = {
    "2.3": "all-korobov",
    "2.4": "all-constant",
    "2.7": "almost-korobov",
    "2.8": "almost-constant",
}


@dataclass(frozen=True)
class Window:
    kind: str
    lower: float
    upper: float
    exceptions: float | None = None

    def contains(self, v: float) -> bool:
        return self.lower <= v <= self.upper


def corollary_window(
    kind: str,
    *,
    x: float,
    A: float = 7.0 / 3.0,
    q: int = 1,
    alpha: float | None = None,
    B: float = 0.0,
    C: float | None = None,
    eta0: float | None = None,
    h: float | None = None,
) -> Window:
    """Admissible window (and exception count for almost-all kinds).

    ``x`` is the height (X for almost-all kinds); ``h`` selects the interval
    length at which the exception count is evaluated (default: lower end).
    """
    kind = _KIND_ALIASES.get(kind, kind)
    logx = math.log(x)
    L = math.log(q * x)
    if kind in ("all-korobov", "almost-korobov"):
        if alpha is None or alpha <= 2 / 3:
            raise HypothesisError("alpha must exceed 2/3")
        drop = 1 / A if kind == "all-korobov" else 2 / A
        lower = math.exp((1 - drop) * logx + logx**alpha)
        if kind == "all-korobov":
            return Window(kind, lower, x)
        hh = lower if h is None else h
        exc = math.exp(logx - (math.log(hh) - math.log(q) - (1 - 2 / A) * logx) / logx**alpha)
        return Window(kind, lower, x, exc)
    if kind in ("all-constant", "almost-constant"):
        if eta0 is None or not 0 < eta0 < 1 / A:
            raise HypothesisError("need 0 < eta0 < 1/A")
        if C is None:
            raise HypothesisError("exponent C required")
        if kind == "all-constant":
            if not C > 2 + (1 + B) / (A * eta0):
                raise HypothesisError(f"C={C} must exceed 2 + (1+B)/(A eta0) = {2 + (1 + B) / (A * eta0):.6g}")
            lower = math.exp(2 * math.log(q) + (1 - 1 / A) * logx + C * math.log(L))
            return Window(kind, lower, x)
        if not C > (B + 2) / (A * eta0):
            raise HypothesisError(f"C={C} must exceed (B+2)/(A eta0) = {(B + 2) / (A * eta0):.6g}")
        lower = math.exp((1 + 1 / (A * eta0)) * math.log(q) + (1 - 2 / A) * logx + C * math.log(L))
        hh = lower if h is None else h
        log_exc = (
            math.log(q) + logx - A * eta0 * (math.log(hh) - math.log(q) - (1 - 2 / A) * logx) + C * math.log(L)
        )
        return Window(kind, lower, x, math.exp(log_exc))
    raise ValueError(f"unknown corollary kind {kind!r}")
