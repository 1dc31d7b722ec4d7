"""Dirichlet characters modulo q.

The unit group (Z/qZ)* is split by CRT into cyclic components, one per odd
prime power plus at most two for the power of two (<-1> x <5> when 8 | q).
A character is identified by its exponent vector on those components and its
values are kept as exact fractions of a full turn; complex numbers are only
produced on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache, reduce

import numpy as np

__all__ = [
    "MODULUS_CAP",
    "CharacterGroup",
    "DirichletCharacter",
    "build_group",
    "characters",
    "character_from_label",
    "conrey_label",
    "eval_char",
    "euler_phi",
    "factorize",
    "gauss_sum",
    "inducing_character",
    "mobius",
    "principal_character",
    "root_number",
]

MODULUS_CAP = 10**6


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of n >= 1 as ascending (p, k) pairs."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(q: int) -> int:
    if q < 1:
        raise ValueError("euler_phi needs q >= 1")
    result = 1
    for p, k in factorize(q):
        result *= (p - 1) * p ** (k - 1)
    return result


def mobius(q: int) -> int:
    if q < 1:
        raise ValueError("mobius needs q >= 1")
    fac = factorize(q)
    if any(k > 1 for _, k in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def _is_primitive_root(g: int, p: int) -> bool:
    for r, _ in factorize(p - 1):
        if pow(g, (p - 1) // r, p) == 1:
            return False
    return True


@lru_cache(maxsize=None)
def _conrey_root(p: int) -> int:
    # smallest primitive root mod p that stays primitive mod p^2 (hence mod p^k)
    if p == 2:
        return 1
    g = 2
    while True:
        if _is_primitive_root(g, p) and pow(g, p - 1, p * p) != 1:
            return g
        g += 1


@dataclass(frozen=True)
class _Component:
    prime: int
    is_sign: bool  # the <-1> factor of a power of two
    modulus: int  # the prime power this component lives in
    generator: int  # generator residue modulo `modulus`
    order: int


@dataclass(frozen=True, eq=False)
class CharacterGroup:
    """The group of Dirichlet characters modulo ``q``.

    ``logs[n]`` holds the exponent vector of ``n`` (row of -1 when
    gcd(n, q) > 1); ``components`` lists the cyclic factors of (Z/qZ)*.
    """

    q: int
    factorization: tuple[tuple[int, int], ...]
    components: tuple[_Component, ...]
    logs: np.ndarray = field(repr=False)
    order: int

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(c.order for c in self.components)

    @property
    def exponent(self) -> int:
        """Least common multiple of the component orders."""
        return reduce(math.lcm, self.orders, 1)

    def residue(self, exps) -> int:
        """Reassemble the unit with the given exponent vector (CRT)."""
        local: dict[int, int] = {}
        for comp, e in zip(self.components, exps):
            v = local.get(comp.modulus, 1)
            local[comp.modulus] = v * pow(comp.generator, int(e), comp.modulus) % comp.modulus
        n = 1 % self.q
        for pk, v in local.items():
            rest = self.q // pk
            # x = n (mod rest), x = v (mod pk)
            base = n % rest
            n = (base + rest * (((v - base) * pow(rest, -1, pk)) % pk)) % self.q
        return n


def _components_for(q: int, fac) -> list[_Component]:
    comps = []
    for p, k in fac:
        pk = p**k
        if p == 2:
            if k == 2:
                comps.append(_Component(2, True, 4, 3, 2))
            elif k >= 3:
                comps.append(_Component(2, True, pk, pk - 1, 2))
                comps.append(_Component(2, False, pk, 5, 2 ** (k - 2)))
        else:
            comps.append(_Component(p, False, pk, _conrey_root(p), (p - 1) * p ** (k - 1)))
    return comps


def build_group(q: int, cap: int = MODULUS_CAP) -> CharacterGroup:
    if q < 1:
        raise ValueError(f"modulus must be positive, got {q}")
    if q > cap:
        raise ValueError(f"modulus {q} exceeds the table cap {cap}")
    fac = factorize(q) if q > 1 else []
    comps = _components_for(q, fac)
    logs = np.full((q, len(comps)), -1, dtype=np.int64)

    if not comps:
        logs = np.zeros((q, 0), dtype=np.int64)
        return CharacterGroup(q, tuple(fac), (), logs, 1)

    n_idx = np.arange(q, dtype=np.int64)
    coprime = np.gcd(n_idx, q) == 1
    # per prime power: discrete logs by walking generator powers
    col = 0
    for p, k in fac:
        pk = p**k
        mine = [c for c in comps if c.modulus == pk]
        if not mine:
            continue  # q = 2 * odd: the factor 2 contributes no component
        if p == 2 and len(mine) == 2:
            sign_log = np.full(pk, -1, dtype=np.int64)
            five_log = np.full(pk, -1, dtype=np.int64)
            v = 1
            for e in range(mine[1].order):
                sign_log[v] = 0
                five_log[v] = e
                sign_log[pk - v] = 1
                five_log[pk - v] = e
                v = v * 5 % pk
            r = n_idx % pk
            logs[:, col] = sign_log[r]
            logs[:, col + 1] = five_log[r]
            col += 2
        else:
            comp = mine[0]
            table = np.full(pk, -1, dtype=np.int64)
            v = 1
            for e in range(comp.order):
                table[v] = e
                v = v * comp.generator % pk
            logs[:, col] = table[n_idx % pk]
            col += 1
    logs[~coprime] = -1
    logs.setflags(write=False)
    return CharacterGroup(q, tuple(fac), tuple(comps), logs, euler_phi(q))


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    """A Dirichlet character, stored as exact turn fractions.

    ``numerators[n]`` is ``v`` with chi(n) = e(v / denominator), or -1 when
    gcd(n, q) > 1.
    """

    group: CharacterGroup = field(repr=False)
    exponents: tuple[int, ...]
    denominator: int = field(repr=False)
    numerators: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return self.group.q

    @property
    def order(self) -> int:
        ords = [o // math.gcd(e, o) for e, o in zip(self.exponents, self.group.orders)]
        return reduce(math.lcm, ords, 1)

    @property
    def is_principal(self) -> bool:
        return all(e == 0 for e in self.exponents)

    @property
    def is_real(self) -> bool:
        return self.order <= 2

    @property
    def parity(self) -> int:
        """0 for even characters, 1 for odd ones."""
        if self.q <= 2:
            return 0
        v = int(self.numerators[self.q - 1])
        return 0 if v == 0 else 1

    @property
    def conductor(self) -> int:
        f = 1
        for comp, e in zip(self.group.components, self.exponents):
            e %= comp.order
            if e == 0:
                continue
            ord_ = comp.order // math.gcd(e, comp.order)
            if comp.prime == 2:
                if comp.is_sign:
                    f = math.lcm(f, 4)
                else:
                    f = math.lcm(f, 4 * ord_)
            else:
                v = 0
                while ord_ % comp.prime == 0:
                    ord_ //= comp.prime
                    v += 1
                f = math.lcm(f, comp.prime ** (v + 1))
        return f

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.q

    @property
    def label(self) -> int:
        return conrey_label(self)

    @cached_property
    def _values(self) -> np.ndarray:
        nums = self.numerators
        den = self.denominator
        vals = np.exp(2j * np.pi * (nums % den) / den)
        # quarter turns are set exactly so real characters stay exactly real
        quarter = (4 * nums) % den == 0
        vals[quarter] = np.array([1, 1j, -1, -1j])[((4 * nums[quarter]) // den) % 4]
        vals[nums < 0] = 0
        vals.setflags(write=False)
        return vals

    def values(self) -> np.ndarray:
        """Complex value table indexed by n mod q."""
        return self._values

    def turn(self, n: int) -> Fraction | None:
        v = int(self.numerators[n % self.q])
        return None if v < 0 else Fraction(v, self.denominator)

    def __call__(self, n):
        if isinstance(n, np.ndarray):
            return self.values()[np.mod(n, self.q)]
        return eval_char(self, n)

    def conj(self) -> DirichletCharacter:
        return _make_character(
            self.group, tuple((-e) % o for e, o in zip(self.exponents, self.group.orders))
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DirichletCharacter)
            and self.q == other.q
            and self.exponents == other.exponents
        )

    def __hash__(self) -> int:
        return hash((self.q, self.exponents))

    def __repr__(self) -> str:
        return f"DirichletCharacter(q={self.q}, label={self.label})"


def _make_character(group: CharacterGroup, exps) -> DirichletCharacter:
    exps = tuple(int(e) % o for e, o in zip(exps, group.orders))
    den = group.exponent
    nums = np.zeros(group.q, dtype=np.int64)
    for comp, e, col in zip(group.components, exps, range(len(exps))):
        step = den // comp.order
        nums = nums + group.logs[:, col] * (e * step)
    nums %= den
    if group.components:
        nums[group.logs[:, 0] < 0] = -1
    elif group.q > 1:  # q = 2
        nums[np.gcd(np.arange(group.q), group.q) != 1] = -1
    nums.setflags(write=False)
    return DirichletCharacter(group, exps, den, nums)


def characters(group: CharacterGroup) -> list[DirichletCharacter]:
    """All phi(q) characters, ordered by exponent vector."""
    chars = [_make_character(group, ())] if not group.components else []
    if group.components:
        for exps in np.ndindex(*group.orders):
            chars.append(_make_character(group, exps))
    return chars


def principal_character(q: int) -> DirichletCharacter:
    group = build_group(q)
    return _make_character(group, (0,) * len(group.components))


def eval_char(chi: DirichletCharacter, n: int) -> complex:
    return complex(chi.values()[n % chi.q])


def gauss_sum(chi: DirichletCharacter) -> complex:
    """tau(chi) = sum_b chi(b) e(b/q), summed with exact angle bookkeeping."""
    q, den = chi.q, chi.denominator
    b = np.arange(q, dtype=np.int64)
    nums = chi.numerators
    ok = nums >= 0
    # angle of chi(b) e(b/q) as an exact fraction num / (den * q)
    full = den * q
    ang = (nums[ok] * q + b[ok] * den) % full
    terms = np.exp(2j * np.pi * ang / full)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def conrey_label(chi: DirichletCharacter) -> int:
    """Conrey-style label: the unit whose exponent vector equals chi's."""
    if chi.q == 1:
        return 1
    return chi.group.residue(chi.exponents)


def character_from_label(q: int, label: int) -> DirichletCharacter:
    if math.gcd(label, q) != 1:
        raise ValueError(f"label {label} is not coprime to {q}")
    group = build_group(q)
    if not group.components:
        return _make_character(group, ())
    exps = group.logs[label % q]
    return _make_character(group, tuple(int(e) for e in exps))


def root_number(chi: DirichletCharacter) -> complex:
    """epsilon(chi) = tau(chi) / (i^a sqrt(q)) for primitive chi."""
    return gauss_sum(chi) / ((1j) ** chi.parity * math.sqrt(chi.q))


def inducing_character(chi: DirichletCharacter) -> DirichletCharacter:
    """The primitive character modulo the conductor that induces chi."""
    f = chi.conductor
    if f == chi.q:
        return chi
    return character_from_label(f, conrey_label(chi) % f if f > 1 else 1)

