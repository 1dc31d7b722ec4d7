from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import mangoldt, trial_is_prime, trial_primes, window_sum
from pntap.arith_chars import character_from_label
from pntap.prime_sieve import (
    SIEVE_CAP,
    Additive,
    Progression,
    is_prime,
    lambda_points,
    primes_in,
    twisted_sum,
)


def test_small_windows():
    assert list(primes_in(10, 10).primes) == [11, 13, 17, 19]
    seg = primes_in(10, -10)
    assert list(seg.primes) == [2, 3, 5, 7] and seg.sign == -1
    assert list(lambda_points(8, 1).powers) == [9]
    n, _ = lambda_points(2, 2).points("psi")
    assert list(n) == [3, 4]


@given(st.integers(0, 20000), st.integers(1, 3000))
@settings(max_examples=60, deadline=None)
def test_sieve_matches_trial_division(lo, length):
    seg = primes_in(lo, length)
    assert list(seg.primes) == trial_primes(lo, lo + length)


def test_block_boundaries():
    lo, hi = 1000, 1000 + 5000
    ref = trial_primes(lo, hi)
    for block in (1, 7, 64, 1000):
        assert list(primes_in(lo, hi - lo, block=block).primes) == ref


def test_real_endpoints_use_integers_of_the_window():
    # (10.5, 13.5] holds 11, 12, 13
    assert list(primes_in(10.5, 3.0).primes) == [11, 13]


@given(st.integers(2, 5000), st.integers(-2000, 2000))
@settings(max_examples=60, deadline=None)
def test_psi_weights_match_mangoldt(x, y):
    if x + y < 0:
        return
    seg = lambda_points(x, y)
    total = seg.sign * twisted_sum(seg, None, "psi").real
    assert math.isclose(total, window_sum(x, y, mangoldt), rel_tol=1e-12, abs_tol=1e-9)


def test_is_prime():
    assert [n for n in range(100) if is_prime(n)] == trial_primes(0, 99)
    assert is_prime(2**61 - 1) and not is_prime(2**61 + 1)
    for n in range(10**6, 10**6 + 300):
        assert is_prime(n) == trial_is_prime(n)


def test_cap_and_negative():
    with pytest.raises(ValueError):
        primes_in(SIEVE_CAP, 10)
    with pytest.raises(ValueError):
        primes_in(5, -10)


def test_kernels():
    seg = lambda_points(10, 10)
    assert math.isclose(twisted_sum(seg, Progression(1, 3), "theta").real, math.log(13) + math.log(19))
    chi = character_from_label(4, 3)
    expect = -math.log(11) + math.log(13) + math.log(17) - math.log(19)
    assert math.isclose(twisted_sum(seg, chi, "theta").real, expect)
    add = twisted_sum(seg, Additive(1, 4), "theta")
    ref = sum(math.log(p) * np.exp(2j * np.pi * p / 4) for p in (11, 13, 17, 19))
    assert abs(add - ref) < 1e-12
    with pytest.raises(ValueError):
        Progression(2, 4)
