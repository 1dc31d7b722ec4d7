from __future__ import annotations

import csv
import io
import math

import numpy as np
import pytest

from pntap.bound_envelopes import EtaProfile
from pntap.experiments import (
    ExperimentConfig,
    almost_all_point,
    density_fit,
    run_experiment,
    saffari_vaughan_check,
)
from pntap.arith_chars import principal_character

ALL = """
[experiment]
kind = all-intervals
weight = theta

[grid]
x = 1e5, 1e6
y = 1e4
q = 1, 3, 7
residues = all

[profile]
family = grh
"""


def _cfg(text, **kw):
    return ExperimentConfig.from_string(text, **kw)


def test_config_parsing():
    cfg = _cfg(ALL)
    assert cfg.kind == "all-intervals" and cfg.grid["x"] == [1e5, 1e6] and cfg.grid["q"] == [1, 3, 7]
    assert cfg.residues is None and cfg.residue_list(7) == [1, 2, 3, 4, 5, 6]
    assert cfg.residue_list(1) == [1]
    assert _cfg(ALL, threads=4).threads == 4


@pytest.mark.parametrize(
    "patch,err",
    [
        (("kind = all-intervals", "kind = nonsense"), "kind"),
        (("y = 1e4", "y ="), "empty"),
        (("residues = all", "residues = 3"), "coprime"),
        (("x = 1e5, 1e6", "x = 1e9"), "cap"),
        (("weight = theta", "weight = gamma"), "weight"),
    ],
)
def test_config_validation(patch, err):
    with pytest.raises(ValueError, match=err):
        _cfg(ALL.replace(*patch))


def test_all_intervals_report():
    rep = run_experiment(_cfg(ALL), write=False)
    assert len(rep.rows) == 6
    assert all(math.isfinite(r) for r in rep.column("ratio"))
    assert rep.c_fit == max(rep.column("ratio")) and rep.passed
    assert "config" in rep.digests


def test_full_interval_under_grh_envelope():
    text = ALL.replace("x = 1e5, 1e6", "x = 1e5, 1e6").replace("y = 1e4", "y = 1e5, 1e6").replace("q = 1, 3, 7", "q = 1")
    rep = run_experiment(_cfg(text), write=False)
    full = [r for r in rep.rows if r[1] == r[2]]
    assert full and all(r[7] < 1 for r in full)


def test_almost_all_routes_and_trivial_bound():
    r = almost_all_point(5, 1e5, 1e3)
    assert math.isclose(r["direct"], r["parseval"], rel_tol=1e-10)
    full = almost_all_point(3, 1e4, 1e4)
    assert full["direct"] / (1e4 * 1e4 * 1e4 / 2) < 1
    assert 0 <= full["exceptions"][0.5] <= full["exceptions"][0.1] <= 1


def test_almost_all_experiment():
    text = """
[experiment]
kind = almost-all
[grid]
X = 1e4, 1e5
h_exponent = 0.9
q = 4
[profile]
family = grh
"""
    rep = run_experiment(_cfg(text), write=False)
    assert all(d < 1e-8 for d in rep.column("route_rel_diff"))
    assert any("delta" in n for n in rep.notes)


def test_saffari_vaughan():
    lhs, rhs, ratio = saffari_vaughan_check(1e4, 100, principal_character(1), "psi")
    assert lhs > 0 and rhs > 0 and ratio == lhs / rhs
    zero = (np.array([]), np.array([]), 0.0)
    assert saffari_vaughan_check(1e4, 100, None, kernel=zero)[0] == 0
    lhs, rhs, ratio = saffari_vaughan_check(6e3, 1e3, principal_character(1), "psi")
    assert ratio < 100


def test_density_fit_counts():
    rep = density_fit([1], [0.0], [50, 100, 200, 500, 1000])
    assert all(rep.column("within_5logT"))
    for total, pred, T in zip(rep.column("total"), rep.column("prediction"), rep.column("T")):
        assert abs(total - pred) <= 5 * math.log(T)
    crit = density_fit([1, 5], [0.6], [50])
    assert crit.column("total") == [0, 0] and all(crit.column("zero_free_holds"))


def test_density_fit_flags_injected_zero():
    bad = density_fit([5], [0.0], [50], profile=EtaProfile.constant(0.2), beta0=0.9)
    assert not any(bad.column("zero_free_holds"))
    ok = density_fit([5], [0.0], [50], profile=EtaProfile.constant(0.05), beta0=0.9)
    assert all(ok.column("zero_free_holds"))


def test_explicit_scan_experiment():
    text = """
[experiment]
kind = explicit-formula-scan
[grid]
x = 2e5, 6e5, 1e6
y = 1e4
T = 50, 800
"""
    rep = run_experiment(_cfg(text), write=False)
    assert len(rep.rows) == 6 and rep.c_fit < 2
    assert any(k.startswith("zeros_q1") for k in rep.digests)


def test_csv_round_trip_and_threads(tmp_path):
    cfg1 = _cfg(ALL, output=str(tmp_path / "a.csv"), threads=1)
    cfg3 = _cfg(ALL, output=str(tmp_path / "b.csv"), threads=3)
    r1, r3 = run_experiment(cfg1), run_experiment(cfg3)
    a, b = (tmp_path / "a.csv").read_bytes(), (tmp_path / "b.csv").read_bytes()
    assert a == b
    assert (tmp_path / "a.summary.txt").exists()
    parsed = list(csv.DictReader(io.StringIO(a.decode())))
    assert [float(p["ratio"]) for p in parsed] == r1.column("ratio")


def test_from_file_resolves_relative_paths(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text(ALL + "\n[zeros]\ndirectory = zd\n" + "")
    cfg = ExperimentConfig.from_file(path)
    assert cfg.zero_dir == str(tmp_path / "zd")
