from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_conductor
from pntap.arith_chars import (
    build_group,
    character_from_label,
    characters,
    conrey_label,
    euler_phi,
    factorize,
    gauss_sum,
    inducing_character,
    mobius,
    principal_character,
    root_number,
)


def test_factorize_and_phi_small():
    assert factorize(360) == [(2, 3), (3, 2), (5, 1)]
    assert [euler_phi(n) for n in range(1, 13)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]
    assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]


@pytest.mark.parametrize("q", [1, 2, 3, 4, 8, 12, 15, 16, 24, 27, 49, 60, 64])
def test_group_structure(q):
    chars = characters(build_group(q))
    assert len(chars) == euler_phi(q)
    assert len({c.exponents for c in chars}) == len(chars)
    units = [n for n in range(q) if math.gcd(n, q) == 1] or [0]
    for chi in chars:
        v = chi.values()
        for m in range(q):
            for n in range(q):
                assert abs(v[m * n % q] - v[m] * v[n]) < 1e-12
        for n in range(q):
            if math.gcd(n, q) != 1:
                assert v[n] == 0
    # row orthogonality
    for c1 in chars:
        for c2 in chars:
            s = sum(c1(n) * c2(n).conjugate() for n in units)
            assert abs(s - (len(units) if c1 == c2 else 0)) < 1e-9


def test_principal_and_real():
    chi = principal_character(12)
    assert chi.is_principal and chi.is_real and chi.conductor == 1
    assert [chi(n) for n in (1, 5, 6, 7)] == [1, 1, 0, 1]


def test_real_characters_are_exactly_real():
    for chi in characters(build_group(24)):
        assert chi.is_real
        assert set(np.unique(chi.values().real)) <= {-1.0, 0.0, 1.0}
        assert np.all(chi.values().imag == 0)


@pytest.mark.parametrize("q", range(1, 60))
def test_conductor_matches_brute_force(q):
    for chi in characters(build_group(q)):
        assert chi.conductor == brute_conductor(chi.values(), q)


@pytest.mark.parametrize("q", [5, 7, 8, 9, 12, 16, 21, 40])
def test_labels_round_trip(q):
    seen = set()
    for chi in characters(build_group(q)):
        lab = conrey_label(chi)
        assert math.gcd(lab, q) == 1
        assert character_from_label(q, lab) == chi
        seen.add(lab)
    assert len(seen) == euler_phi(q)


def test_label_of_conjugate_is_inverse():
    for chi in characters(build_group(13)):
        assert conrey_label(chi.conj()) == pow(conrey_label(chi), -1, 13)


def test_label_rejects_non_unit():
    with pytest.raises(ValueError):
        character_from_label(10, 4)


def test_parity_mod_4_and_5():
    chi4 = character_from_label(4, 3)
    assert chi4.parity == 1 and chi4(3) == -1
    assert character_from_label(5, 4).parity == 0
    assert character_from_label(5, 2).parity == 1


@given(st.integers(min_value=1, max_value=80))
@settings(max_examples=40, deadline=None)
def test_gauss_sum_modulus(q):
    for chi in characters(build_group(q)):
        tau = gauss_sum(chi)
        if chi.is_primitive:
            assert abs(abs(tau) ** 2 - q) < 1e-9 * q
    assert abs(gauss_sum(principal_character(q)) - mobius(q)) < 1e-9


def test_root_number_is_unimodular_and_real_for_quadratic():
    for q in (3, 4, 5, 8, 11):
        for chi in characters(build_group(q)):
            if not chi.is_primitive:
                continue
            eps = root_number(chi)
            assert abs(abs(eps) - 1) < 1e-12
            if chi.is_real:
                assert abs(eps - 1) < 1e-12  # quadratic Gauss sums


def test_inducing_character_agrees_on_units():
    for chi in characters(build_group(20)):
        prim = inducing_character(chi)
        assert prim.is_primitive and prim.q == chi.conductor
        for n in range(1, 100):
            if math.gcd(n, 20) == 1:
                assert cmath.isclose(chi(n), prim(n), abs_tol=1e-12)


def test_modulus_cap():
    with pytest.raises(ValueError):
        build_group(10**6 + 1)
    with pytest.raises(ValueError):
        build_group(0)
