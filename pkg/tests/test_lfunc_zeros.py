from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest

from oracles import mp_l_value
from pntap.arith_chars import build_group, character_from_label, characters, principal_character
from pntap.lfunc_zeros import (
    DATA_ENV,
    ZeroFileError,
    ZeroSet,
    density_ratio,
    count_zeros,
    data_dir,
    density_sum,
    find_zeros,
    l_values,
    load_zeros,
    vertical_prediction,
    write_zeros,
    z_values,
    zeros_for_character,
    all_zero_sets,
)


@pytest.mark.parametrize("q,label", [(1, 1), (3, 2), (4, 3), (5, 2), (7, 3), (8, 5)])
def test_l_values_match_mpmath(q, label):
    chi = character_from_label(q, label)
    s = np.array([0.5 + 14.1j, 0.7 - 3j, 2.0 + 0j, 0.5 + 60j])
    vals, err = l_values(chi, s)
    for si, v in zip(s, vals):
        ref = mp_l_value(chi.values(), complex(si))
        assert abs(v - ref) < 1e-9 * max(1, abs(ref))
    assert np.all(err < 1e-9)


def test_z_is_real_and_matches_siegelz():
    t = np.linspace(1, 60, 40)
    grid = z_values(principal_character(1), t)
    ref = np.array([float(mpmath.siegelz(x)) for x in t])
    assert np.max(np.abs(grid.z - ref)) < 1e-8


def test_z_rejects_imprimitive():
    with pytest.raises(ValueError):
        z_values(principal_character(5), np.array([1.0]))


def test_first_zeta_zeros():
    zs = find_zeros(principal_character(1), 50)
    pos = zs.gammas[zs.gammas > 0]
    ref = [float(mpmath.zetazero(k).imag) for k in range(1, 11)]
    assert np.max(np.abs(pos[:10] - ref)) < 1e-8
    # symmetric under gamma -> -gamma
    assert np.allclose(np.sort(-zs.gammas), zs.gammas)


def test_complex_character_zeros_are_not_symmetric():
    chi = character_from_label(5, 2)
    zs = find_zeros(chi, 30)
    assert not np.allclose(np.sort(-zs.gammas), zs.gammas)
    # reflection gives the conjugate character's zeros
    conj = find_zeros(chi.conj(), 30)
    assert np.allclose(zs.reflected().gammas, conj.gammas, atol=1e-8)


def test_vertical_prediction_reference():
    assert math.isclose(vertical_prediction(1, 100), 56.2546871746507, rel_tol=1e-12)
    with pytest.raises(ValueError):
        vertical_prediction(1, 3)


def test_bundled_data_loads():
    for q in (1, 3, 4, 5):
        sets = all_zero_sets(q)
        assert len(sets) == len(characters(build_group(q)))
        for zs in sets.values():
            assert zs.critical_line


def test_count_and_density():
    zs = zeros_for_character(principal_character(1))
    assert count_zeros(zs, 0.0, 100) == 58
    assert count_zeros(zs, 0.0, 500) == 538
    assert count_zeros(zs, 0.5, 100) == 0
    with pytest.raises(ValueError):
        count_zeros(zs, 0.0, 2000)
    sets = all_zero_sets(5)
    total = density_sum(sets, 0.0, 50, 5)
    assert total == sum(count_zeros(z, 0.0, 50) for z in sets.values())
    assert density_ratio(10, 1, 10, 0.5, 2, 1.0) == 1.0


def test_round_trip(tmp_path):
    zs = find_zeros(character_from_label(5, 2), 20)
    path = tmp_path / "z.txt"
    write_zeros(zs, path)
    back = load_zeros(path)
    assert back.q == 5 and back.label == 2 and np.array_equal(back.gammas, zs.gammas)
    real = find_zeros(character_from_label(4, 3), 20)
    write_zeros(real, tmp_path / "r.txt")
    assert np.array_equal(load_zeros(tmp_path / "r.txt").gammas, real.gammas)


@pytest.mark.parametrize(
    "body",
    [
        "# q=1 label=1 tmax=50 columns=gamma\n14.13\nabc\n",
        "# q=1 label=1 tmax=50 columns=gamma\n21.0\n14.13\n",
        "# q=1 label=1 tmax=50 columns=gamma,beta\n14.13 1.5\n",
    ],
)
def test_malformed_files(tmp_path, body):
    path = tmp_path / "bad.txt"
    path.write_text(body)
    with pytest.raises(ZeroFileError):
        load_zeros(path)


def test_env_var_data_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(DATA_ENV, str(tmp_path))
    assert data_dir() == tmp_path
    with pytest.raises(FileNotFoundError):
        zeros_for_character(principal_character(1))


def test_zero_set_validation():
    with pytest.raises(ValueError):
        ZeroSet(1, 1, np.array([2.0, 1.0]), np.array([0.5, 0.5]), 10)
    z = ZeroSet(1, 1, np.array([]), np.array([]), 10).with_zero(0.9, 0.0)
    assert count_zeros(z, 0.8, 5) == 1
