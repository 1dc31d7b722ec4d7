"""Twisted Chebyshev error terms in short intervals and the identities tying them together.

Three families, each with a theta (primes only) and psi (prime powers) weight:

* character:   sum chi(n) w(n)          - delta_chi * y
* additive:    sum e(na/q) w(n)         - mu(q)/phi(q) * y
* progression: sum_{n = a (q)} w(n)     - y/phi(q)

A negative length y means the window (x+y, x] taken with orientation -1, so
that Delta(x, -y) = -Delta(x - y, y).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith_chars import (
    DirichletCharacter,
    build_group,
    characters,
    euler_phi,
    gauss_sum,
    mobius,
)
from .prime_sieve import (
    Additive,
    PrimeSegment,
    Progression,
    kernel_weights,
    lambda_points,
    twisted_sum,
)

__all__ = [
    "DeltaResult",
    "averaged_square",
    "decompose_additive",
    "decompose_ap",
    "delta",
    "dropped_mass",
    "main_coefficient",
    "psi_theta_gap",
]


@dataclass(frozen=True)
class DeltaResult:
    variant: str  # "character" | "additive" | "progression"
    weight: str
    x: float
    y: float
    kernel: object
    value: complex
    main_term: float

    @property
    def real(self) -> float:
        return self.value.real


def _fsum_complex(values) -> complex:
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def main_coefficient(kernel) -> float:
    """Density of the main term per unit length."""
    if isinstance(kernel, DirichletCharacter):
        return 1.0 if kernel.is_principal else 0.0
    if isinstance(kernel, Additive):
        return mobius(kernel.q) / euler_phi(kernel.q)
    if isinstance(kernel, Progression):
        return 1.0 / euler_phi(kernel.q)
    raise TypeError(f"unsupported kernel {kernel!r}")


def _variant(kernel) -> str:
    if isinstance(kernel, DirichletCharacter):
        return "character"
    if isinstance(kernel, Additive):
        return "additive"
    return "progression"


def delta(x, y, kernel, weight: str = "theta", segment: PrimeSegment | None = None) -> DeltaResult:
    if segment is None:
        segment = lambda_points(x, y)
    main = main_coefficient(kernel)
    raw = twisted_sum(segment, kernel, weight)
    value = segment.sign * raw - main * y
    if isinstance(kernel, Progression):
        value = complex(value.real, 0.0)
    return DeltaResult(_variant(kernel), weight, x, y, kernel, value, main * y)


def psi_theta_gap(x, y, chi: DirichletCharacter) -> float:
    """|Delta_psi - Delta_theta|: the prime-power mass of the window."""
    seg = lambda_points(x, y)
    return abs(delta(x, y, chi, "psi", seg).value - delta(x, y, chi, "theta", seg).value)


def decompose_ap(x, y, q: int, a: int, weight: str = "theta"):
    """Direct progression error term and its character-sum reconstruction."""
    seg = lambda_points(x, y)
    direct = delta(x, y, Progression(a, q), weight, seg)
    terms = [chi(a).conjugate() * delta(x, y, chi, weight, seg).value for chi in characters(build_group(q))]
    return direct, _fsum_complex(terms) / euler_phi(q)


def decompose_additive(x, y, q: int, a: int, weight: str = "theta"):
    """Direct additive error term, its Gauss-sum reconstruction and the residual.

    The residual is exactly the (oriented) contribution of the n sharing a
    factor with q, which the character expansion cannot see.
    """
    seg = lambda_points(x, y)
    direct = delta(x, y, Additive(a, q), weight, seg)
    terms = [
        chi(a) * gauss_sum(chi.conj()) * delta(x, y, chi, weight, seg).value
        for chi in characters(build_group(q))
    ]
    recon = _fsum_complex(terms) / euler_phi(q)
    return direct, recon, abs(direct.value - recon)


def dropped_mass(x, y, q: int, a: int, weight: str = "theta") -> complex:
    """Oriented sum of w(n) e(na/q) over n with gcd(n, q) > 1."""
    seg = lambda_points(x, y)
    n, w = seg.points(weight)
    keep = np.gcd(n, q) > 1
    terms = w[keep] * kernel_weights(n[keep], Additive(a, q))
    return seg.sign * complex(math.fsum(terms.real), math.fsum(terms.imag))


def averaged_square(x, y, q: int, variant: str = "ap", weight: str = "theta"):
    """Both sides of the Parseval-type identity over reduced residues.

    ``ap``: sum_a |Delta(x,y,q,a)|^2 against (1/phi) sum_chi |Delta(x,y,chi)|^2.
    ``additive``: the same with Delta(x,y,a/q) and the weight |tau(chi)|^2.
    """
    seg = lambda_points(x, y)
    residues = [a for a in range(1, q + 1) if math.gcd(a, q) == 1]
    phi = euler_phi(q)
    chars = characters(build_group(q))
    if variant == "ap":
        lhs = math.fsum(abs(delta(x, y, Progression(a % q, q), weight, seg).value) ** 2 for a in residues)
        rhs = math.fsum(abs(delta(x, y, chi, weight, seg).value) ** 2 for chi in chars) / phi
    elif variant == "additive":
        lhs = math.fsum(abs(delta(x, y, Additive(a % q, q), weight, seg).value) ** 2 for a in residues)
        rhs = math.fsum(
            abs(gauss_sum(chi)) ** 2 * abs(delta(x, y, chi, weight, seg).value) ** 2 for chi in chars
        ) / phi
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return lhs, rhs
