"""Zeros of Dirichlet L-functions: evaluation, location, file I/O and counting.

L(s, chi) is evaluated through the Hurwitz decomposition
L(s, chi) = sum_{r=1}^{q} chi(r) sum_{n>=0} (qn + r)^{-s}, with the first N
terms of every inner sum done directly and the tails by Euler-Maclaurin.
On the critical line the rotated function

    Z(t) = eps(chi)^{-1/2} exp(i theta(t)) L(1/2 + it, chi),
    theta(t) = (t/2) log(q/pi) + Im log Gamma((1/2 + a + it)/2),

is real for primitive chi, and its sign changes locate the zeros.
"""

from __future__ import annotations

import cmath
import math
import os
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.optimize import brentq
from scipy.special import bernoulli, loggamma

from .arith_chars import (
    DirichletCharacter,
    build_group,
    character_from_label,
    characters,
    conrey_label,
    euler_phi,
    inducing_character,
    root_number,
)

__all__ = [
    "DATA_ENV",
    "LValueGrid",
    "ZeroFileError",
    "ZeroSet",
    "all_zero_sets",
    "bundle_zero_data",
    "density_ratio",
    "count_zeros",
    "data_dir",
    "density_sum",
    "find_zeros",
    "l_values",
    "load_zeros",
    "smooth_count",
    "vertical_prediction",
    "write_zeros",
    "z_values",
    "zeros_for_character",
]

DATA_ENV = "PNTAP_DATA_DIR"
MAX_MODULUS = 20
HEIGHT_CAP = 150.0
EM_TERMS = 20
_CHUNK = 1 << 21  # matrix entries per block in the direct sum


class ZeroFileError(ValueError):
    pass


@lru_cache(maxsize=1)
def _bernoulli_coeffs() -> np.ndarray:
    # B_{2k} / (2k)! for k = 1 .. EM_TERMS + 1
    b = bernoulli(2 * EM_TERMS + 2)
    return np.array([b[2 * k] / math.factorial(2 * k) for k in range(1, EM_TERMS + 2)])


def _tail_length(s: np.ndarray, q: int) -> int:
    # makes |s + 2M| / (2 pi a) <= 1/2 for every shift a >= N
    smax = float(np.max(np.abs(s))) if s.size else 0.0
    return max(10, math.ceil((smax + 2 * EM_TERMS + 2) / math.pi))


def _hurwitz_tail(s: np.ndarray, a: float) -> tuple[np.ndarray, np.ndarray]:
    """sum_{n>=0} (n + a)^{-s} by Euler-Maclaurin, with the first omitted term."""
    la = math.log(a)
    a_s = np.exp(-s * la)
    out = a_s * a / (s - 1.0) + 0.5 * a_s
    coeffs = _bernoulli_coeffs()
    poch = s.copy()
    apow = a_s / a  # a^{-s-2k+1} at k=1
    for k in range(1, EM_TERMS + 1):
        out = out + coeffs[k - 1] * poch * apow
        poch = poch * (s + 2 * k - 1) * (s + 2 * k)
        apow = apow / (a * a)
    err = np.abs(coeffs[EM_TERMS] * poch * apow)
    return out, err


def l_values(chi: DirichletCharacter, s) -> tuple[np.ndarray, np.ndarray]:
    """L(s, chi) on an array of complex s, with a truncation error estimate."""
    s = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    q = chi.q
    vals = chi.values()
    n_tail = _tail_length(s, q)
    m = np.arange(1, q * n_tail + 1, dtype=np.int64)
    coef = vals[m % q]
    keep = coef != 0
    m, coef = m[keep], coef[keep]
    logm = np.log(m.astype(np.float64))

    head = np.empty(s.shape, dtype=np.complex128)
    rows = max(1, _CHUNK // max(1, len(m)))
    for i in range(0, len(s), rows):
        blk = s[i : i + rows]
        head[i : i + rows] = np.exp(-np.outer(blk, logm)) @ coef

    tail = np.zeros(s.shape, dtype=np.complex128)
    err = np.zeros(s.shape)
    q_s = np.exp(-s * math.log(q))
    for r in range(1, q + 1):
        c = vals[r % q]
        if c == 0:
            continue
        t_r, e_r = _hurwitz_tail(s, n_tail + r / q)
        tail += c * t_r
        err += e_r
    return head + q_s * tail, err * np.abs(q_s)


def _theta(chi: DirichletCharacter, t: np.ndarray) -> np.ndarray:
    a = chi.parity
    return 0.5 * t * math.log(chi.q / math.pi) + np.imag(loggamma((0.5 + a + 1j * t) / 2.0))


@dataclass(frozen=True)
class LValueGrid:
    chi: DirichletCharacter
    t: np.ndarray = field(repr=False)
    z: np.ndarray = field(repr=False)
    error: float

    def sign_changes(self) -> np.ndarray:
        """Indices i with a sign change of Z between t[i] and t[i+1]."""
        sg = np.sign(self.z)
        return np.flatnonzero(sg[:-1] * sg[1:] < 0)


def _rotation(chi: DirichletCharacter) -> complex:
    return 1.0 / cmath.sqrt(root_number(chi))


def z_values(chi: DirichletCharacter, t) -> LValueGrid:
    """Rotated completed L-function on the critical line (real for primitive chi)."""
    if not chi.is_primitive:
        raise ValueError(f"{chi!r} is not primitive; use its inducing character")
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    lv, em_err = l_values(chi, 0.5 + 1j * t)
    zc = _rotation(chi) * np.exp(1j * _theta(chi, t)) * lv
    err = float(np.max(np.abs(zc.imag) + em_err)) if t.size else 0.0
    return LValueGrid(chi, t, zc.real.copy(), err)


def _z_scalar(chi: DirichletCharacter, rot: complex, t: float) -> float:
    lv, _ = l_values(chi, np.array([0.5 + 1j * t]))
    return float((rot * cmath.exp(1j * float(_theta(chi, np.array([t]))[0])) * lv[0]).real)


@dataclass(frozen=True, eq=False)
class ZeroSet:
    """Nontrivial zeros beta + i gamma of one L(s, chi), complete for |gamma| <= tmax."""

    q: int
    label: int
    gammas: np.ndarray = field(repr=False)
    betas: np.ndarray = field(repr=False)
    tmax: float
    source: str = "computed"

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=np.float64)
        b = np.asarray(self.betas, dtype=np.float64)
        if g.shape != b.shape:
            raise ValueError("gamma and beta columns differ in length")
        if g.size > 1 and np.any(np.diff(g) <= 0):
            raise ValueError("gamma values must be strictly increasing")
        if b.size and (np.any(b <= 0) or np.any(b >= 1)):
            raise ValueError("beta must lie strictly inside (0, 1)")
        g.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "betas", b)

    @property
    def critical_line(self) -> bool:
        return bool(np.all(self.betas == 0.5))

    @property
    def rhos(self) -> np.ndarray:
        return self.betas + 1j * self.gammas

    def __len__(self) -> int:
        return len(self.gammas)

    def reflected(self) -> ZeroSet:
        """gamma -> -gamma: the zeros of the conjugate character."""
        conj_label = pow(self.label, -1, self.q) if self.q > 1 else 1
        return ZeroSet(self.q, conj_label, -self.gammas[::-1], self.betas[::-1], self.tmax, self.source)

    def up_to(self, T: float) -> ZeroSet:
        keep = np.abs(self.gammas) <= T
        return ZeroSet(self.q, self.label, self.gammas[keep], self.betas[keep], min(T, self.tmax), self.source)

    def with_zero(self, beta: float, gamma: float) -> ZeroSet:
        """A copy with one extra zero injected (hypothetical off-line zeros)."""
        g = np.append(self.gammas, gamma)
        b = np.append(self.betas, beta)
        order = np.argsort(g, kind="stable")
        return ZeroSet(self.q, self.label, g[order], b[order], self.tmax, "injected")


def _close_under_reflection(gammas: np.ndarray, betas: np.ndarray):
    g = np.concatenate([-gammas[::-1], gammas])
    b = np.concatenate([betas[::-1], betas])
    return g, b


def smooth_count(chi: DirichletCharacter, T: float) -> float:
    """Smooth part of the number of zeros with 0 < gamma <= T."""
    extra = 1.0 if chi.q == 1 else 0.0
    return float(_theta(chi, np.array([T]))[0]) / math.pi + extra


def _scan_grid(lo: float, hi: float, step_low: float, step_high: float, split: float = 50.0) -> np.ndarray:
    parts = []
    edges = sorted({lo, hi, *(v for v in (-split, split) if lo < v < hi)})
    for a, b in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (a + b)
        step = step_low if abs(mid) <= split else step_high
        n = max(1, math.ceil((b - a) / step))
        parts.append(np.linspace(a, b, n + 1)[:-1])
    parts.append(np.array([hi]))
    return np.concatenate(parts)


def find_zeros(
    chi: DirichletCharacter,
    T: float,
    *,
    step_low: float = 1e-2,
    step_high: float = 1e-3,
    xtol: float = 1e-10,
    height_cap: float = HEIGHT_CAP,
    max_modulus: int = MAX_MODULUS,
    refinements: int = 2,
) -> ZeroSet:
    """All critical-line zeros of L(s, chi) with |gamma| <= T.

    The zero count on each half line is compared with the smooth count;
    a mismatch triggers a rescan at half the step, and persistent mismatch
    raises ``RuntimeError``.
    """
    if not chi.is_primitive:
        raise ValueError(f"{chi!r} is imprimitive; compute its inducing character instead")
    if chi.q > max_modulus:
        raise ValueError(f"modulus {chi.q} above the in-house cap {max_modulus}")
    if T > height_cap:
        raise ValueError(f"height {T} above the in-house cap {height_cap}")
    label = conrey_label(chi)
    if T <= 0:
        empty = np.zeros(0)
        return ZeroSet(chi.q, label, empty, empty, max(T, 0.0), "computed")

    lo = 0.0 if chi.is_real else -T
    rot = _rotation(chi)
    for attempt in range(refinements + 1):
        scale = 0.5**attempt
        grid = z_values(chi, _scan_grid(lo, T, step_low * scale, step_high * scale))
        roots = []
        for i in grid.sign_changes():
            a, b = grid.t[i], grid.t[i + 1]
            roots.append(brentq(lambda t: _z_scalar(chi, rot, t), a, b, xtol=xtol, rtol=4 * np.finfo(float).eps))
        gammas = np.array(roots)
        if _complete(chi, gammas, T):
            break
    else:
        raise RuntimeError(f"zero count for {chi!r} up to T={T} disagrees with the smooth count")
    if chi.is_real:
        gammas = gammas[gammas > 0]
        gammas, _ = _close_under_reflection(gammas, gammas)
    return ZeroSet(chi.q, label, gammas, np.full(gammas.shape, 0.5), float(T), "computed")


def _complete(chi: DirichletCharacter, gammas: np.ndarray, T: float, tol: float = 2.5) -> bool:
    expected = smooth_count(chi, T)
    if abs(np.count_nonzero(gammas > 0) - expected) > tol:
        return False
    if not chi.is_real and abs(np.count_nonzero(gammas < 0) - smooth_count(chi.conj(), T)) > tol:
        return False
    return True


def vertical_prediction(q: int, T: float) -> float:
    """Main term (T/pi) log(qT/2pi) - T/pi of N(0, T, chi)."""
    if T < 4:
        raise ValueError("vertical prediction needs T >= 4")
    return T / math.pi * math.log(q * T / (2 * math.pi)) - T / math.pi


def count_zeros(zeros: ZeroSet, sigma: float, T: float) -> int:
    """#{rho : beta > sigma, |gamma| <= T}."""
    if T > zeros.tmax:
        raise ValueError(f"T={T} exceeds the completeness height {zeros.tmax}")
    return int(np.count_nonzero((zeros.betas > sigma) & (np.abs(zeros.gammas) <= T)))


def density_sum(zero_sets, sigma: float, T: float, q: int | None = None) -> int:
    """sum over all characters mod q of N(sigma, T, chi)."""
    sets = list(zero_sets.values()) if isinstance(zero_sets, dict) else list(zero_sets)
    if q is None:
        q = sets[0].q if sets else 1
    if len(sets) != euler_phi(q):
        raise ValueError(f"need {euler_phi(q)} zero sets modulo {q}, got {len(sets)}")
    return sum(count_zeros(z, sigma, T) for z in sets)


def density_ratio(total: int, q: int, T: float, sigma: float, A: float, g) -> float:
    """total / ((qT)^{A(1 - sigma)} g(q, T))."""
    gval = g(q, T) if callable(g) else float(g)
    return total / ((q * T) ** (A * (1.0 - sigma)) * gval)


# ---------------------------------------------------------------- file I/O


def write_zeros(zeros: ZeroSet, path, positive_only: bool | None = None) -> None:
    """Write the line-oriented zero file; real characters store gamma > 0 only."""
    if positive_only is None:
        positive_only = character_from_label(zeros.q, zeros.label).is_real if zeros.q > 1 else True
    g, b = zeros.gammas, zeros.betas
    if positive_only:
        keep = g > 0
        g, b = g[keep], b[keep]
    with_beta = not zeros.critical_line
    cols = "gamma,beta" if with_beta else "gamma"
    lines = [f"# q={zeros.q} label={zeros.label} tmax={zeros.tmax!r} columns={cols}"]
    for gi, bi in zip(g, b):
        lines.append(f"{float(gi)!r} {float(bi)!r}" if with_beta else repr(float(gi)))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_header(line: str) -> dict[str, str]:
    fields = {}
    for tok in line.lstrip("#").split():
        if "=" in tok:
            k, v = tok.split("=", 1)
            fields[k] = v
    return fields


def load_zeros(path, q: int | None = None, label: int | None = None, tmax: float | None = None) -> ZeroSet:
    """Parse a zero file; gamma-only files get beta = 1/2.

    Files of real characters may list gamma > 0 only; those are closed under
    gamma -> -gamma here.
    """
    path = Path(path)
    header: dict[str, str] = {}
    gam, bet = [], []
    ncols = None
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            h = _parse_header(line)
            if "q" in h and not header:
                header = h
            continue
        parts = line.split()
        try:
            vals = [float(v) for v in parts]
        except ValueError:
            raise ZeroFileError(f"{path}:{lineno}: malformed line {raw!r}") from None
        if len(vals) not in (1, 2) or (ncols is not None and len(vals) != ncols):
            raise ZeroFileError(f"{path}:{lineno}: expected 1 or 2 columns, got {len(vals)}")
        ncols = len(vals)
        if gam and vals[0] <= gam[-1]:
            raise ZeroFileError(f"{path}:{lineno}: gamma values not increasing")
        beta = vals[1] if len(vals) == 2 else 0.5
        if not 0 < beta < 1:
            raise ZeroFileError(f"{path}:{lineno}: beta={beta} outside (0, 1)")
        gam.append(vals[0])
        bet.append(beta)

    fq = int(header.get("q", q if q is not None else 1))
    flabel = int(header.get("label", label if label is not None else 1))
    ftmax = float(header.get("tmax", tmax if tmax is not None else (max(map(abs, gam)) if gam else 0.0)))
    if q is not None and q != fq:
        raise ZeroFileError(f"{path}: file is for modulus {fq}, requested {q}")
    if label is not None and label != flabel:
        raise ZeroFileError(f"{path}: file is for label {flabel}, requested {label}")

    g = np.array(gam, dtype=np.float64)
    b = np.array(bet, dtype=np.float64)
    is_real = fq <= 2 or character_from_label(fq, flabel).is_real
    if is_real and (g.size == 0 or g[0] > 0):
        g, b = _close_under_reflection(g, b)
    zs = ZeroSet(fq, flabel, g, b, ftmax, "file")
    _cross_check(zs, path)
    return zs


def _cross_check(zs: ZeroSet, path) -> None:
    if zs.tmax < 4:
        return
    chi = character_from_label(zs.q, zs.label) if zs.q > 1 else None
    q_eff = chi.conductor if chi is not None else 1
    found = count_zeros(zs, 0.0, zs.tmax)
    pred = vertical_prediction(q_eff, zs.tmax)
    if abs(found - pred) > 5 * math.log(q_eff * zs.tmax):
        warnings.warn(
            f"{path}: {found} zeros up to {zs.tmax}, prediction {pred:.2f}; file may be truncated",
            stacklevel=3,
        )


def data_dir(path=None) -> Path:
    if path is not None:
        return Path(path)
    env = os.environ.get(DATA_ENV)
    if env:
        return Path(env)
    return Path(__file__).resolve().parent / "data"


def zero_file_name(q: int, label: int) -> str:
    return f"zeros_q{q}_l{label}.txt"


def zeros_for_character(chi: DirichletCharacter, directory=None) -> ZeroSet:
    """Zeros of L(s, chi) from the data directory.

    Imprimitive characters share their nontrivial zeros with the inducing
    primitive character. A missing complex character falls back to the
    reflection of its conjugate's file.
    """
    prim = inducing_character(chi)
    base = data_dir(directory)
    label = conrey_label(prim)
    path = base / zero_file_name(prim.q, label)
    if path.exists():
        return load_zeros(path, prim.q, label)
    conj = conrey_label(prim.conj())
    alt = base / zero_file_name(prim.q, conj)
    if alt.exists():
        return load_zeros(alt, prim.q, conj).reflected()
    raise FileNotFoundError(f"no zero data for q={prim.q} label={label} in {base}")


def all_zero_sets(q: int, directory=None) -> dict[int, ZeroSet]:
    """Zero sets of every character modulo q, keyed by Conrey label."""
    return {conrey_label(chi): zeros_for_character(chi, directory) for chi in characters(build_group(q))}


BUNDLE = ((1, 1, 1000.0), (3, 2, 100.0), (4, 3, 100.0), (5, 2, 100.0), (5, 3, 100.0), (5, 4, 100.0))


def bundle_zero_data(directory=None, entries=BUNDLE) -> list[Path]:
    """Recompute the shipped zero files (zeta to 1000, primitive q = 3, 4, 5 to 100)."""
    base = data_dir(directory)
    base.mkdir(parents=True, exist_ok=True)
    written = []
    for q, label, T in entries:
        chi = character_from_label(q, label)
        zs = find_zeros(chi, T, height_cap=max(T, HEIGHT_CAP))
        path = base / zero_file_name(q, label)
        write_zeros(zs, path)
        written.append(path)
    return written
