from __future__ import annotations

import csv
import io
import math

import pytest

from pntap.bound_envelopes import EtaProfile, envelope_all
from pntap.chebyshev_delta import delta
from pntap.cli import format_number, main
from pntap.lfunc_zeros import DATA_ENV, vertical_prediction
from pntap.prime_sieve import Progression


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_delta_golden(capsys):
    rc, out, _ = run(capsys, "delta", "--x", "10", "--y", "10", "--q", "3", "--a", "1", "--weight", "theta")
    assert rc == 0 and out.strip() == "0.509388337"
    assert out.strip().startswith("0.5093884"[:8])
    lib = delta(10, 10, Progression(1, 3)).real
    assert float(out) == float(format_number(lib))


def test_envelope_golden(capsys):
    rc, out, _ = run(capsys, "envelope", "all", "--profile", "grh", "--q", "1", "--x", "1e6")
    assert rc == 0
    assert float(out) == float(format(envelope_all("ingham", EtaProfile.grh(), None, 1, 1e6), ".9g"))
    assert f"{float(out):.5g}" == "1.9087e+05"


def test_predict_golden(capsys):
    rc, out, _ = run(capsys, "zeros", "predict", "--q", "1", "--T", "100")
    assert rc == 0 and out.strip() == "56.2546872"
    # the quoted reference 56.26 is within 0.01 of the exact formula value
    assert abs(float(out) - 56.26) < 0.01


def test_full_precision(capsys):
    _, out, _ = run(capsys, "zeros", "predict", "--q", "1", "--T", "100", "--full")
    assert float(out) == vertical_prediction(1, 100)


def test_csv_round_trip(capsys):
    rc, out, _ = run(capsys, "gauss", "--q", "7", "--format", "csv")
    assert rc == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 6
    for r in rows:
        tau = complex(r["tau"])
        assert float(r["abs_tau_sq"]) == abs(tau) ** 2


def test_usage_errors(capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "delta", "--x", "10")[0] == 2
    assert run(capsys, "delta", "--x", "10", "--y", "1", "--q", "3")[0] == 2
    assert run(capsys, "delta", "--x", "10", "--y", "1", "--q", "3", "--a", "1", "--nope")[0] == 2


def test_computation_errors(capsys):
    rc, _, err = run(capsys, "delta", "--x", "10", "--y", "1", "--q", "4", "--a", "2")
    assert rc == 1 and "gcd" in err
    rc, _, err = run(capsys, "envelope", "window", "--kind", "all-korobov", "--x", "1e9", "--alpha", "0.6")
    assert rc == 1


def test_help_documents_everything(capsys):
    assert main(["--help"]) == 0
    out = capsys.readouterr().out
    assert DATA_ENV in out
    for cmd in ("sieve", "delta", "identities", "gauss", "zeros", "explicit", "envelope", "experiment", "report"):
        assert cmd in out


def test_other_commands(capsys):
    rc, out, _ = run(capsys, "sieve", "--x", "10", "--y", "10", "--list")
    assert rc == 0 and "11 13 17 19" in out
    rc, out, _ = run(capsys, "identities", "--x", "1e4", "--y", "1e3", "--q", "12")
    assert rc == 0
    rec = dict(line.split(": ") for line in out.strip().splitlines())
    assert float(rec["parseval_rel_error"]) < 1e-9
    rc, out, _ = run(capsys, "zeros", "count", "--q", "1", "--T", "100")
    assert out.strip() == "58"
    rc, out, _ = run(capsys, "explicit", "scan", "--x", "1e6", "--y", "1e4", "--T", "50,800", "--format", "csv")
    assert rc == 0 and len(list(csv.DictReader(io.StringIO(out)))) == 2
    rc, out, _ = run(capsys, "envelope", "window", "--kind", "all-korobov", "--x", "1e9", "--alpha", "0.7")
    assert rc == 0 and "lower" in out
    rc, out, _ = run(capsys, "envelope", "almost-all", "--X", "1e6", "--h", "1e3", "--threshold")
    assert rc == 0 and "h_threshold" in out


def test_zero_file_commands(capsys, tmp_path, monkeypatch):
    path = tmp_path / "zeros_q1_l1.txt"
    rc, out, _ = run(capsys, "zeros", "find", "--q", "1", "--T", "30", "--out", str(path))
    assert rc == 0 and path.exists()
    rc, out, _ = run(capsys, "zeros", "load", str(path))
    assert rc == 0 and "count: 6" in out
    monkeypatch.setenv(DATA_ENV, str(tmp_path))
    rc, out, _ = run(capsys, "zeros", "count", "--q", "1", "--T", "30")
    assert out.strip() == "6"
    rc, _, err = run(capsys, "zeros", "count", "--q", "1", "--T", "100")
    assert rc == 1


def test_experiment_and_report(capsys, tmp_path):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(
        "[experiment]\nkind = all-intervals\noutput = out.csv\ncap = 1e9\n[grid]\nx = 1e5\ny = 1e4\nq = 5\n"
    )
    rc, out, _ = run(capsys, "experiment", "run", str(cfg), "--threads", "2")
    assert rc == 0 and "result: pass" in out
    assert (tmp_path / "out.csv").exists()
    rc, out, _ = run(capsys, "report", str(tmp_path / "out.csv"), "--cap", "1e-12")
    assert rc == 1 and "pass: false" in out
    cfg.write_text(cfg.read_text().replace("cap = 1e9", "cap = 1e-12"))
    rc, out, _ = run(capsys, "experiment", "run", str(cfg))
    assert rc == 1


def test_format_number():
    assert format_number(1 / 3) == "0.333333333"
    assert format_number(1 / 3, True) == repr(1 / 3)
    assert format_number(3) == "3"
    assert format_number(complex(1, -2)) == "1-2j"
    assert math.isnan(float(format_number(math.nan)))
