from __future__ import annotations

import math

import pytest

from oracles import mangoldt, trial_is_prime, window_sum
from pntap.arith_chars import build_group, character_from_label, characters, principal_character
from pntap.chebyshev_delta import (
    averaged_square,
    decompose_additive,
    decompose_ap,
    delta,
    dropped_mass,
    psi_theta_gap,
)
from pntap.prime_sieve import Additive, Progression


def test_reference_values():
    assert math.isclose(delta(10, 10, Progression(1, 3)).real, math.log(13 * 19) - 5, rel_tol=1e-12)
    assert math.isclose(delta(10, 10, Progression(1, 3)).real, 0.5093883366, rel_tol=1e-9)
    # Lambda(16) = log 2
    assert math.isclose(delta(10, 10, Progression(1, 3), "psi").real, math.log(13 * 19 * 2) - 5, rel_tol=1e-12)
    assert math.isclose(psi_theta_gap(10, 10, principal_character(3)), math.log(2), rel_tol=1e-12)


@pytest.mark.parametrize("x,y", [(100, 50), (1000, -300), (57.5, 20.25), (5000, 1)])
def test_progression_against_brute_force(x, y):
    q = 7
    for a in range(1, 7):
        ref = window_sum(x, y, lambda n: mangoldt(n) if n % q == a else 0.0) - y / 6
        assert math.isclose(delta(x, y, Progression(a, q), "psi").real, ref, rel_tol=1e-11, abs_tol=1e-9)
        ref_t = window_sum(x, y, lambda n: math.log(n) if n % q == a and trial_is_prime(n) else 0.0) - y / 6
        assert math.isclose(delta(x, y, Progression(a, q), "theta").real, ref_t, rel_tol=1e-11, abs_tol=1e-9)


def test_signed_convention():
    chi = character_from_label(5, 2)
    for x, y in [(1000, 300), (777.5, 40.5)]:
        a = delta(x, -y, chi).value
        b = delta(x - y, y, chi).value
        assert abs(a + b) < 1e-10


@pytest.mark.parametrize("q", [3, 8, 12, 30])
@pytest.mark.parametrize("weight", ["theta", "psi"])
def test_ap_decomposition(q, weight):
    for a in range(1, q):
        if math.gcd(a, q) == 1:
            d, r = decompose_ap(10**4, 10**3, q, a, weight)
            assert abs(d.value - r) <= 1e-9 * max(1.0, abs(d.value))


@pytest.mark.parametrize("q", [4, 9, 10, 12])
def test_additive_residual_is_the_dropped_mass(q):
    for a in range(1, q):
        if math.gcd(a, q) != 1:
            continue
        d, r, resid = decompose_additive(2000, 500, q, a, "psi")
        assert abs((d.value - r) - dropped_mass(2000, 500, q, a, "psi")) < 1e-9
        # only powers of primes dividing q can be dropped
        assert resid <= math.log(2500) * len({p for p in (2, 3, 5, 7) if q % p == 0}) + 1e-9


@pytest.mark.parametrize("variant", ["ap", "additive"])
def test_parseval(variant):
    lhs, rhs = averaged_square(10**4, 10**3, 15, variant, "psi")
    if variant == "ap":
        assert math.isclose(lhs, rhs, rel_tol=1e-9)
    else:
        assert lhs > 0 and rhs > 0


def test_character_delta_main_term_only_principal():
    for chi in characters(build_group(5)):
        res = delta(100, 50, chi)
        assert res.main_term == (50 if chi.is_principal else 0)


def test_additive_main_term_uses_mobius():
    res = delta(1000, 100, Additive(1, 6))
    assert math.isclose(res.main_term, 100 * 1 / 2)
