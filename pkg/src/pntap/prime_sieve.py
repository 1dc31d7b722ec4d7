"""Segmented odd-only sieve and von Mangoldt point sets on half-open windows."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arith_chars import DirichletCharacter

__all__ = [
    "BLOCK_SIZE",
    "SIEVE_CAP",
    "Additive",
    "PrimeSegment",
    "Progression",
    "is_prime",
    "lambda_points",
    "primes_in",
    "twisted_sum",
    "kernel_weights",
]

SIEVE_CAP = 10**9
BLOCK_SIZE = 1 << 18  # odd numbers per block


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=8)
def _base_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    out = np.flatnonzero(flags).astype(np.int64)
    out.setflags(write=False)
    return out


def _sieve_range(lo: int, hi: int, block: int = BLOCK_SIZE) -> np.ndarray:
    """Primes p with lo < p <= hi."""
    if hi <= lo or hi < 2:
        return np.zeros(0, dtype=np.int64)
    base = _base_primes(math.isqrt(hi))
    odd_base = base[1:]
    chunks = []
    if lo < 2 <= hi:
        chunks.append(np.array([2], dtype=np.int64))
    # odd candidates start at the first odd number > lo, at least 3
    start = max(lo + 1, 3)
    if start % 2 == 0:
        start += 1
    while start <= hi:
        count = min(block, (hi - start) // 2 + 1)
        end = start + 2 * (count - 1)
        mask = np.ones(count, dtype=bool)
        for p in odd_base:
            p = int(p)
            pp = p * p
            if pp > end:
                break
            first = max(pp, -(-start // p) * p)
            if first % 2 == 0:
                first += p
            if first > end:
                continue
            mask[(first - start) // 2 :: p] = False
        chunks.append(start + 2 * np.flatnonzero(mask).astype(np.int64))
        start = end + 2
    if not chunks:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(chunks)


def _prime_powers(lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """Prime powers p^k (k >= 2) in (lo, hi] and their bases p."""
    ns, ps = [], []
    for p in _base_primes(math.isqrt(hi)) if hi >= 4 else ():
        p = int(p)
        v = p * p
        while v <= hi:
            if v > lo:
                ns.append(v)
                ps.append(p)
            v *= p
    order = np.argsort(ns, kind="stable")
    return np.asarray(ns, dtype=np.int64)[order], np.asarray(ps, dtype=np.int64)[order]


@dataclass(frozen=True, eq=False)
class PrimeSegment:
    """Primes and prime powers in the integer window (lo, hi].

    ``sign`` is -1 when the segment came from a negative length, i.e. the
    window (x + y, x]; sums over the window are oriented by it downstream.
    """

    lo: int
    hi: int
    sign: int
    primes: np.ndarray = field(repr=False)
    powers: np.ndarray = field(repr=False)
    power_bases: np.ndarray = field(repr=False)
    block_size: int = BLOCK_SIZE

    @property
    def prime_weights(self) -> np.ndarray:
        return np.log(self.primes.astype(np.float64))

    def points(self, weight: str = "psi") -> tuple[np.ndarray, np.ndarray]:
        """Sorted support and weights: log p on primes, plus Lambda on powers for psi."""
        if weight == "theta":
            return self.primes, self.prime_weights
        if weight != "psi":
            raise ValueError(f"unknown weight {weight!r}")
        n = np.concatenate([self.primes, self.powers])
        w = np.concatenate([self.prime_weights, np.log(self.power_bases.astype(np.float64))])
        order = np.argsort(n, kind="stable")
        return n[order], w[order]

    def restrict(self, lo: int, hi: int) -> PrimeSegment:
        """Sub-window (lo, hi] of this segment."""
        if lo < self.lo or hi > self.hi:
            raise ValueError("restriction leaves the sieved window")
        sl = slice(np.searchsorted(self.primes, lo, "right"), np.searchsorted(self.primes, hi, "right"))
        pl = slice(np.searchsorted(self.powers, lo, "right"), np.searchsorted(self.powers, hi, "right"))
        return PrimeSegment(lo, hi, 1, self.primes[sl], self.powers[pl], self.power_bases[pl], self.block_size)

    def __len__(self) -> int:
        return len(self.primes) + len(self.powers)


def _window(x, y) -> tuple[int, int, int]:
    """Integer window (lo, hi] holding the integers of (x, x+y] (or (x+y, x])."""
    a, b = (x, x + y) if y >= 0 else (x + y, x)
    return math.floor(a), math.floor(b), (1 if y >= 0 else -1)


def _check_range(lo: int, hi: int, cap: int) -> None:
    if lo < 0:
        raise ValueError(f"window starts below zero ({lo})")
    if hi > cap:
        raise ValueError(f"window end {hi} exceeds the sieve cap {cap}")


def primes_in(x, y, cap: int = SIEVE_CAP, block: int = BLOCK_SIZE) -> PrimeSegment:
    lo, hi, sign = _window(x, y)
    _check_range(lo, hi, cap)
    empty = np.zeros(0, dtype=np.int64)
    seg = PrimeSegment(lo, hi, sign, _freeze(_sieve_range(lo, hi, block)), empty, empty, block)
    return seg


def lambda_points(x, y, cap: int = SIEVE_CAP, block: int = BLOCK_SIZE) -> PrimeSegment:
    lo, hi, sign = _window(x, y)
    _check_range(lo, hi, cap)
    return _cached_lambda(lo, hi, sign, block)


@lru_cache(maxsize=32)
def _cached_lambda(lo: int, hi: int, sign: int, block: int) -> PrimeSegment:
    ns, ps = _prime_powers(lo, hi)
    return PrimeSegment(lo, hi, sign, _freeze(_sieve_range(lo, hi, block)), _freeze(ns), _freeze(ps), block)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Additive:
    """Additive character n -> e(a n / q)."""

    a: int
    q: int

    def __post_init__(self):
        if math.gcd(self.a, self.q) != 1:
            raise ValueError(f"gcd({self.a}, {self.q}) != 1")


@dataclass(frozen=True)
class Progression:
    """Indicator of the residue class n = a (mod q)."""

    a: int
    q: int

    def __post_init__(self):
        if math.gcd(self.a, self.q) != 1:
            raise ValueError(f"gcd({self.a}, {self.q}) != 1")


def kernel_weights(n: np.ndarray, kernel) -> np.ndarray:
    """Kernel values at the integers n (complex for characters/additive)."""
    if isinstance(kernel, DirichletCharacter):
        return kernel.values()[n % kernel.q]
    if isinstance(kernel, Additive):
        # exact reduction of the turn before the exponential
        r = (kernel.a * (n % kernel.q)) % kernel.q
        return np.exp(2j * np.pi * r / kernel.q)
    if isinstance(kernel, Progression):
        return (n % kernel.q == kernel.a % kernel.q).astype(np.float64)
    raise TypeError(f"unsupported kernel {kernel!r}")


def twisted_sum(segment: PrimeSegment, kernel, weight: str = "psi") -> complex:
    """Unoriented sum over the window of (log p or Lambda(n)) * kernel(n)."""
    n, w = segment.points(weight)
    if kernel is None:
        return complex(math.fsum(w))
    k = kernel_weights(n, kernel)
    if isinstance(kernel, Progression):
        return complex(math.fsum(w[k != 0]))
    terms = w * k
    return complex(math.fsum(terms.real), math.fsum(terms.imag))
