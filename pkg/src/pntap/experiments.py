"""Desk-scale experiments: sieved error terms against the conditional envelopes.

Configs are ``key = value`` files with ``[section]`` headers::

    [experiment]
    kind = almost-all          ; all-intervals | almost-all | saffari-vaughan
                               ; explicit-formula-scan | density-fit
    weight = theta
    output = report.csv
    cap = 1e6                  ; largest acceptable fitted constant

    [grid]
    X = 1e5, 1e6
    h_exponent = 0.9           ; or: h = 1000
    q = 3, 5
    residues = all

    [profile]
    family = grh

    [density]
    A = 7/3
    g = log-power
    B = 1

Grid points run on a thread pool and are merged in grid order, so the CSV is
independent of the thread count. Wall-clock time only enters the summary.
"""

from __future__ import annotations

import configparser
import hashlib
import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .arith_chars import build_group, character_from_label, characters, euler_phi
from .bound_envelopes import (
    DensityEstimate,
    EtaProfile,
    ExceptionalZero,
    envelope_all,
    envelope_almost_all,
    eta,
)
from .chebyshev_delta import delta
from .explicit_formula import kernel_points, residual_scan, sweep
from .lfunc_zeros import (
    all_zero_sets,
    count_zeros,
    data_dir,
    density_sum,
    vertical_prediction,
    zeros_for_character,
)
from .prime_sieve import SIEVE_CAP, Progression, lambda_points

__all__ = [
    "DELTAS",
    "KINDS",
    "ExperimentConfig",
    "ExperimentReport",
    "almost_all_point",
    "density_fit",
    "run_all_intervals",
    "run_almost_all",
    "run_density_fit",
    "run_experiment",
    "run_explicit_scan",
    "run_saffari_vaughan",
    "saffari_vaughan_check",
]

KINDS = ("all-intervals", "almost-all", "saffari-vaughan", "explicit-formula-scan", "density-fit")
DELTAS = (0.5, 0.1)
_DEFAULT_CAP = {"saffari-vaughan": 100.0}


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.replace(",", " ").split()]


def _ints(text: str) -> list[int]:
    return [int(float(t)) for t in text.replace(",", " ").split()]


@dataclass
class ExperimentConfig:
    kind: str
    grid: dict[str, list] = field(default_factory=dict)
    weight: str = "theta"
    residues: list[int] | None = None  # None means all reduced residues
    profile: EtaProfile = field(default_factory=EtaProfile.grh)
    density: DensityEstimate = field(default_factory=DensityEstimate)
    mode: str = "ingham"
    eps: float = 0.1
    label: int = 1
    beta0: float | None = None
    zero_dir: str | None = None
    output: str | None = None
    summary: str | None = None
    cap: float = math.inf
    threads: int = 1
    source: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.weight not in ("theta", "psi"):
            raise ValueError(f"unknown weight {self.weight!r}")
        if not self.grid:
            raise ValueError("empty parameter grid")
        for key, vals in self.grid.items():
            if len(vals) == 0:
                raise ValueError(f"grid entry {key!r} is empty")
        for q in self.grid.get("q", [1]):
            if q < 1:
                raise ValueError(f"bad modulus {q}")
            for a in self.residues or ():
                if math.gcd(a, q) != 1:
                    raise ValueError(f"residue {a} is not coprime to {q}")
        top = 0.0
        for key in ("x", "X"):
            for v in self.grid.get(key, []):
                top = max(top, 3.0 * v if self.kind == "saffari-vaughan" else 2.0 * v)
        for v in self.grid.get("x", []):
            for y in self.grid.get("y", [0.0]):
                top = max(top, v + abs(y))
        if top > SIEVE_CAP:
            raise ValueError(f"grid reaches {top:g}, beyond the sieve cap {SIEVE_CAP}")

    @classmethod
    def from_string(cls, text: str, **overrides) -> ExperimentConfig:
        cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        cp.optionxform = str  # keep X and x apart
        cp.read_string(text)
        exp = dict(cp["experiment"]) if cp.has_section("experiment") else {}
        raw = dict(cp["grid"]) if cp.has_section("grid") else {}
        grid: dict[str, list] = {}
        for key, val in raw.items():
            if key == "residues":
                continue
            grid[key] = _ints(val) if key in ("q", "label") else _floats(val)
        residues = None
        if raw.get("residues", "all").strip() != "all":
            residues = _ints(raw["residues"])
        kw = dict(
            kind=exp.get("kind", "all-intervals"),
            grid=grid,
            weight=exp.get("weight", "theta"),
            residues=residues,
            profile=EtaProfile.from_config(dict(cp["profile"])) if cp.has_section("profile") else EtaProfile.grh(),
            density=DensityEstimate.from_config(dict(cp["density"])) if cp.has_section("density") else DensityEstimate(),
            mode=exp.get("mode", "ingham"),
            eps=float(exp.get("eps", 0.1)),
            label=int(exp.get("label", 1)),
            beta0=float(cp["exceptional"]["beta0"]) if cp.has_section("exceptional") else None,
            zero_dir=cp["zeros"].get("directory") if cp.has_section("zeros") else None,
            output=exp.get("output"),
            summary=exp.get("summary"),
            cap=float(exp.get("cap", _DEFAULT_CAP.get(exp.get("kind", ""), math.inf))),
            threads=int(exp.get("threads", 1)),
            source=text,
        )
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kw)

    @classmethod
    def from_file(cls, path, **overrides) -> ExperimentConfig:
        text = Path(path).read_text()
        cfg = cls.from_string(text, **overrides)
        base = Path(path).parent
        for attr in ("output", "summary", "zero_dir"):
            v = getattr(cfg, attr)
            if v is not None and not Path(v).is_absolute():
                setattr(cfg, attr, str(base / v))
        return cfg

    def h_values(self, X: float) -> list[float]:
        if "h" in self.grid:
            return list(self.grid["h"])
        if "h_exponent" in self.grid:
            return [X**e for e in self.grid["h_exponent"]]
        raise ValueError("grid needs h or h_exponent")

    def residue_list(self, q: int) -> list[int]:
        if self.residues is None:
            return [a for a in range(1, q + 1) if math.gcd(a, q) == 1]
        return [a % q for a in self.residues]

    def exceptional_for(self, q: int) -> ExceptionalZero | None:
        return None if self.beta0 is None else ExceptionalZero(q, self.beta0)


@dataclass
class ExperimentReport:
    kind: str
    columns: tuple[str, ...]
    rows: list[tuple]
    c_fit: float
    cap: float
    notes: list[str] = field(default_factory=list)
    digests: dict[str, str] = field(default_factory=dict)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return self.c_fit <= self.cap

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def csv_text(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(_cell(v) for v in row))
        return "\n".join(lines) + "\n"

    def summary_text(self) -> str:
        out = [
            f"kind: {self.kind}",
            f"points: {len(self.rows)}",
            f"fitted constant: {self.c_fit!r}",
            f"cap: {self.cap!r}",
            f"result: {'pass' if self.passed else 'fail'}",
            f"runtime_seconds: {self.runtime:.3f}",
        ]
        out += [f"digest {k}: {v}" for k, v in sorted(self.digests.items())]
        out += [f"note: {n}" for n in self.notes]
        return "\n".join(out) + "\n"

    def write(self, csv_path, summary_path=None) -> None:
        csv_path = Path(csv_path)
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        csv_path.write_text(self.csv_text())
        summary_path = Path(summary_path) if summary_path else csv_path.with_suffix(".summary.txt")
        summary_path.write_text(self.summary_text())


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _pool_map(fn, items, threads: int) -> list:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _decreasing(values) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


# ------------------------------------------------------------ all intervals


def run_all_intervals(config: ExperimentConfig) -> ExperimentReport:
    cols = ("q", "x", "y", "max_abs_delta", "argmax_a", "pnt_ratio", "envelope", "ratio")
    points = list(itertools.product(config.grid.get("q", [1]), config.grid["x"], config.grid["y"]))

    def work(p):
        q, x, y = p
        seg = lambda_points(x, y)
        best, arg = -1.0, None
        for a in config.residue_list(q):
            v = abs(delta(x, y, Progression(a, q), config.weight, seg).value)
            if v > best:
                best, arg = v, a
        env = envelope_all(
            config.mode, config.profile, config.density, q, x, y, config.exceptional_for(q), config.eps
        )
        pnt = best * euler_phi(q) / abs(y)
        return (q, x, y, best, arg, pnt, env, best / env)

    rows = _pool_map(work, points, config.threads)
    notes = []
    for q in config.grid.get("q", [1]):
        for y in config.grid["y"]:
            trend = [r[5] for r in rows if r[0] == q and r[2] == y]
            if len(trend) > 1:
                notes.append(f"q={q} y={y!r}: pnt ratio decreasing along x: {_decreasing(trend)}")
    return ExperimentReport(config.kind, cols, rows, max(r[7] for r in rows), config.cap, notes)


# ------------------------------------------------------------ almost all


def almost_all_point(q: int, X: float, h: float, weight: str = "theta", residues=None) -> dict:
    """Exact averaged square integral at one grid point, by both routes.

    Returns the direct residue sum, the character (Parseval) route, the
    largest sup_u |Delta| phi(q)/|h| over residues and the exception
    densities #{n in [X, 2X) : |Delta(n, h, q, a)| > delta h / phi(q)} / X
    (largest over residues) for each delta in DELTAS.
    """
    phi = euler_phi(q)
    lo, hi = X + min(h, 0.0), 2 * X + max(h, 0.0)
    res = residues if residues is not None else [a for a in range(1, q + 1) if math.gcd(a, q) == 1]
    direct_parts, sup, exc = [], 0.0, {d: 0.0 for d in DELTAS}
    for a in res:
        n, c = kernel_points(lo, hi, Progression(a, q), weight)
        sw = sweep(n, c, 1.0 / phi, X, 2 * X, "h", h)
        direct_parts.append(sw.integral)
        sup = max(sup, sw.sup * phi / abs(h))
        for d in DELTAS:
            exc[d] = max(exc[d], sw.exception_count(d * abs(h) / phi) / X)
    char_parts = []
    if residues is None:
        for chi in characters(build_group(q)):
            n, c = kernel_points(lo, hi, chi, weight)
            sw = sweep(n, c, 1.0 if chi.is_principal else 0.0, X, 2 * X, "h", h)
            char_parts.append(sw.integral)
    direct = math.fsum(direct_parts)
    parseval = math.fsum(char_parts) / phi if char_parts else math.nan
    return {"direct": direct, "parseval": parseval, "sup_ratio": sup, "exceptions": exc}


def run_almost_all(config: ExperimentConfig) -> ExperimentReport:
    cols = (
        "q", "X", "h", "direct", "parseval", "route_rel_diff", "envelope", "ratio",
        "trivial_ratio", "sup_ratio", *(f"exc_density_{d}" for d in DELTAS),
    )
    points = [
        (q, X, h) for q in config.grid.get("q", [1]) for X in config.grid["X"] for h in config.h_values(X)
    ]

    def work(p):
        q, X, h = p
        r = almost_all_point(q, X, h, config.weight, config.residues)
        env = envelope_almost_all(config.mode, config.profile, config.density, q, X, h, config.exceptional_for(q))
        rel = abs(r["direct"] - r["parseval"]) / max(abs(r["direct"]), 1e-300)
        trivial = r["direct"] / (h * h * X / euler_phi(q))
        exc = tuple(r["exceptions"][d] for d in DELTAS)
        return (q, X, h, r["direct"], r["parseval"], rel, env, r["direct"] / env, trivial, r["sup_ratio"], *exc)

    rows = _pool_map(work, points, config.threads)
    notes = [
        "exception densities count integer n with |Delta| > delta*h/phi(q); the delta threshold is a convention of this toolkit"
    ]
    for q in config.grid.get("q", [1]):
        trend = [r[9] for r in rows if r[0] == q]
        if len(trend) > 1:
            notes.append(f"q={q}: sup ratio decreasing along X: {_decreasing(trend)}")
    return ExperimentReport(config.kind, cols, rows, max(r[7] for r in rows), config.cap, notes)


# ------------------------------------------------------------ saffari-vaughan


def _adaptive_simpson(f, a: float, b: float, rel: float, depth: int = 40) -> float:
    cache: dict[float, float] = {}

    def F(t):
        if t not in cache:
            cache[t] = f(t)
        return cache[t]

    def simpson(lo, hi):
        mid = 0.5 * (lo + hi)
        return (hi - lo) / 6 * (F(lo) + 4 * F(mid) + F(hi))

    whole = simpson(a, b)
    # refine once more up front so a lucky coarse estimate cannot stop the recursion
    m = 0.5 * (a + b)
    whole = simpson(a, m) + simpson(m, b)
    tol = rel * abs(whole) if whole else rel

    def rec(lo, hi, est, tol, depth):
        mid = 0.5 * (lo + hi)
        left, right = simpson(lo, mid), simpson(mid, hi)
        if depth <= 0 or abs(left + right - est) <= 15 * tol:
            return left + right + (left + right - est) / 15
        return rec(lo, mid, left, tol / 2, depth - 1) + rec(mid, hi, right, tol / 2, depth - 1)

    return rec(a, m, simpson(a, m), tol / 2, depth) + rec(m, b, simpson(m, b), tol / 2, depth)


def saffari_vaughan_check(X: float, h: float, chi, weight: str = "psi", rel: float = 1e-4, kernel=None):
    """lhs = int_X^{2X} |Delta(u,h)|^2, rhs = (X/|h|) int_{|h|/3X}^{3|h|/X} int_X^{3X} |Delta(u,theta u)|^2.

    ``kernel`` may replace ``chi`` by precomputed (n, c, main) points; a
    synthetic empty kernel gives lhs = 0.
    """
    if not 0 < abs(h) <= X:
        raise ValueError("need 0 < |h| <= X")
    ah = abs(h)
    th_lo, th_hi = ah / (3 * X), 3 * ah / X
    if kernel is None:
        n, c = kernel_points(X - ah, 3 * X * (1 + th_hi) + ah, chi, weight)
        main = 1.0 if chi.is_principal else 0.0
    else:
        n, c, main = kernel
        n = np.asarray(n, dtype=np.float64)
        c = np.asarray(c, dtype=np.complex128)
    lhs = sweep(n, c, main, X, 2 * X, "h", h).integral
    inner = _adaptive_simpson(lambda t: sweep(n, c, main, X, 3 * X, "theta", t).integral, th_lo, th_hi, rel)
    rhs = X / ah * inner
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
    return lhs, rhs, ratio


def run_saffari_vaughan(config: ExperimentConfig) -> ExperimentReport:
    cols = ("q", "label", "X", "h", "lhs", "rhs", "ratio")
    points = [(q, X, h) for q in config.grid.get("q", [1]) for X in config.grid["X"] for h in config.grid["h"]]

    def work(p):
        q, X, h = p
        chi = character_from_label(q, config.label % q if q > 1 else 1)
        lhs, rhs, ratio = saffari_vaughan_check(X, h, chi, config.weight)
        return (q, chi.label, X, h, lhs, rhs, ratio)

    rows = _pool_map(work, points, config.threads)
    return ExperimentReport(config.kind, cols, rows, max(r[6] for r in rows), config.cap)


# ------------------------------------------------------------ explicit formula


def run_explicit_scan(config: ExperimentConfig) -> ExperimentReport:
    cols = ("q", "label", "x", "y", "T", "zero_sum_re", "zero_sum_im", "truth_re", "abs_residual", "envelope", "ratio")
    qs = config.grid.get("q", [1])
    Ts = config.grid["T"]
    points = [(q, x, y) for q in qs for x in config.grid["x"] for y in config.grid["y"]]

    def work(p):
        q, x, y = p
        chi = character_from_label(q, config.label % q if q > 1 else 1)
        zeros = zeros_for_character(chi, config.zero_dir)
        return [
            (q, chi.label, x, y, ev.T, ev.zero_sum.real, ev.zero_sum.imag, ev.truth.real, abs(ev.residual),
             ev.envelope, ev.ratio)
            for ev in residual_scan(x, y, chi, Ts, zeros)
        ]

    rows = [r for chunk in _pool_map(work, points, config.threads) for r in chunk]
    notes = []
    for q in qs:
        meds = [float(np.median([r[8] for r in rows if r[0] == q and r[4] == T])) for T in Ts]
        notes.append(f"q={q}: median |residual| by T: " + ", ".join(f"{T!r}:{m!r}" for T, m in zip(Ts, meds)))
        notes.append(f"q={q}: median at largest T below smallest T: {meds[-1] < meds[0]}")
    rep = ExperimentReport(config.kind, cols, rows, max(r[10] for r in rows), config.cap, notes)
    rep.digests.update(_zero_digests(qs, config.zero_dir))
    return rep


def _zero_digests(qs, directory) -> dict[str, str]:
    base = data_dir(directory)
    out = {}
    for q in qs:
        for path in sorted(base.glob("zeros_q*_l*.txt")):
            f = int(path.name.split("_")[1][1:])
            if q % f == 0:
                out[path.name] = _sha256(path.read_bytes())
    return out


# ------------------------------------------------------------ density fit


def density_fit(
    q_list,
    sigma_grid,
    T_grid,
    density: DensityEstimate | None = None,
    profile: EtaProfile | None = None,
    beta0: float | None = None,
    directory=None,
) -> ExperimentReport:
    """Zero counts against the vertical prediction and the density estimate.

    With ``beta0`` a real zero beta0 is injected into the real nonprincipal
    character of each modulus (the principal one when q = 1) and the zero-free region
    is checked against ``profile``.
    """
    density = density or DensityEstimate()
    profile = profile or EtaProfile.grh()
    cols = ("q", "sigma", "T", "total", "prediction", "deviation", "within_5logT", "density_ratio", "max_beta",
            "zero_free_holds")
    rows = []
    for q in q_list:
        chars = characters(build_group(q))
        sets = all_zero_sets(q, directory)
        if beta0 is not None:
            target = next((c for c in chars if c.is_real and not c.is_principal), chars[0])
            sets[target.label] = sets[target.label].with_zero(beta0, 0.0)
        for sigma in sigma_grid:
            for T in T_grid:
                total = density_sum(sets, sigma, T, q)
                if sigma <= 0:
                    pred = math.fsum(vertical_prediction(c.conductor, T) for c in chars)
                    dev = total - pred
                    ok = abs(dev) <= 5 * math.log(T) * len(chars)
                else:
                    pred, dev, ok = math.nan, math.nan, True
                ratio = total / (math.exp(density.A * (1 - sigma) * math.log(q * T)) * density.g(q, T))
                top = max(
                    (float(z.betas[np.abs(z.gammas) <= T].max()) for z in sets.values() if count_zeros(z, 0.0, T)),
                    default=0.0,
                )
                holds = top <= 1 - eta(profile, max(T, profile.T0))
                rows.append((q, sigma, T, total, pred, dev, ok, ratio, top, holds))
    notes = ["critical-line data satisfies the zero-free region for every profile" if all(r[9] for r in rows)
             else "zero-free region violated at some (q, T): a zero lies right of 1 - eta(T)"]
    c_fit = max((r[7] for r in rows), default=0.0)
    rep = ExperimentReport("density-fit", cols, rows, c_fit, math.inf, notes)
    rep.digests.update(_zero_digests(q_list, directory))
    return rep


def run_density_fit(config: ExperimentConfig) -> ExperimentReport:
    rep = density_fit(
        config.grid.get("q", [1]),
        config.grid.get("sigma", [0.0]),
        config.grid["T"],
        config.density,
        config.profile,
        config.beta0,
        config.zero_dir,
    )
    rep.cap = config.cap
    return rep


# ------------------------------------------------------------ dispatch

_RUNNERS = {
    "all-intervals": run_all_intervals,
    "almost-all": run_almost_all,
    "saffari-vaughan": run_saffari_vaughan,
    "explicit-formula-scan": run_explicit_scan,
    "density-fit": run_density_fit,
}


def run_experiment(config: ExperimentConfig, write: bool = True) -> ExperimentReport:
    start = time.perf_counter()
    report = _RUNNERS[config.kind](config)
    report.runtime = time.perf_counter() - start
    report.digests["config"] = _sha256(config.source.encode())
    if write and config.output:
        report.write(config.output, config.summary)
    return report
