"""Command-line front end.

Exit status: 0 on success, 1 when a computation fails (or an experiment
exceeds its cap), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path

from . import __version__
from .arith_chars import (
    build_group,
    character_from_label,
    characters,
    conrey_label,
    gauss_sum,
)
from .bound_envelopes import (
    DensityEstimate,
    EtaProfile,
    ExceptionalZero,
    corollary_window,
    envelope_all,
    envelope_almost_all,
    eval_fraction,
    h_threshold,
    y_threshold,
)
from .chebyshev_delta import averaged_square, decompose_additive, decompose_ap, delta
from .explicit_formula import fit_constant, residual_scan
from .experiments import ExperimentConfig, run_experiment
from .lfunc_zeros import (
    DATA_ENV,
    bundle_zero_data,
    count_zeros,
    find_zeros,
    load_zeros,
    vertical_prediction,
    write_zeros,
    zeros_for_character,
)
from .prime_sieve import Additive, Progression, lambda_points

__all__ = ["build_parser", "format_number", "main"]


class UsageError(Exception):
    pass


def format_number(v, full: bool = False) -> str:
    if isinstance(v, bool) or v is None:
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, complex):
        if v.imag == 0:
            return format_number(v.real, full)
        sign = "+" if v.imag >= 0 or math.isnan(v.imag) else "-"
        return f"{format_number(v.real, full)}{sign}{format_number(abs(v.imag), full)}j"
    v = float(v)
    return repr(v) if full else format(v, ".9g")


def _emit(args, records: list[dict]) -> None:
    """Print records as 'key: value' lines, or as CSV (always full precision)."""
    out = sys.stdout
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(list(records[0]))
        for rec in records:
            w.writerow([format_number(v, True) for v in rec.values()])
        return
    for i, rec in enumerate(records):
        if i:
            out.write("\n")
        if len(rec) == 1:
            out.write(format_number(next(iter(rec.values())), args.full) + "\n")
            continue
        for k, v in rec.items():
            out.write(f"{k}: {format_number(v, args.full)}\n")


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.replace(",", " ").split()]


# ------------------------------------------------------------- commands


def cmd_sieve(args):
    seg = lambda_points(args.x, args.y)
    _, wt = seg.points("theta")
    _, wp = seg.points("psi")
    rec = {"lo": seg.lo, "hi": seg.hi, "primes": len(seg.primes), "prime_powers": len(seg.powers),
           "theta": math.fsum(wt), "psi": math.fsum(wp)}
    _emit(args, [rec])
    if args.list:
        print(" ".join(str(int(p)) for p in seg.primes))


def _kernel(args):
    chosen = [args.a is not None, args.label is not None, args.additive is not None]
    if sum(chosen) != 1:
        raise UsageError("give exactly one of --a, --label, --additive")
    if args.a is not None:
        return Progression(args.a % args.q, args.q)
    if args.label is not None:
        return character_from_label(args.q, args.label)
    return Additive(args.additive % args.q, args.q)


def cmd_delta(args):
    res = delta(args.x, args.y, _kernel(args), args.weight)
    _emit(args, [{"delta": res.value}])


def cmd_identities(args):
    q = args.q
    worst_ap, worst_add = 0.0, 0.0
    for a in range(1, q + 1):
        if math.gcd(a, q) != 1:
            continue
        direct, recon = decompose_ap(args.x, args.y, q, a, args.weight)
        worst_ap = max(worst_ap, abs(direct.value - recon) / max(1.0, abs(direct.value)))
        d2, _, resid = decompose_additive(args.x, args.y, q, a, args.weight)
        worst_add = max(worst_add, resid)
    lhs, rhs = averaged_square(args.x, args.y, q, "ap", args.weight)
    _emit(args, [{"q": q, "decomposition_rel_error": worst_ap, "additive_residual_max": worst_add,
                  "parseval_lhs": lhs, "parseval_rhs": rhs,
                  "parseval_rel_error": abs(lhs - rhs) / max(abs(lhs), 1e-300)}])


def cmd_gauss(args):
    chars = characters(build_group(args.q))
    if args.label is not None:
        chars = [character_from_label(args.q, args.label)]
    recs = []
    for chi in chars:
        tau = gauss_sum(chi)
        recs.append({"label": conrey_label(chi), "conductor": chi.conductor, "primitive": chi.is_primitive,
                     "tau": tau, "abs_tau_sq": abs(tau) ** 2})
    _emit(args, recs)


def cmd_zeros(args):
    if args.zeros_cmd == "predict":
        _emit(args, [{"prediction": vertical_prediction(args.q, args.T)}])
    elif args.zeros_cmd == "find":
        chi = character_from_label(args.q, args.label)
        zs = find_zeros(chi, args.T, height_cap=max(args.T, 150.0))
        if args.out:
            write_zeros(zs, args.out)
        if args.format == "csv" or args.list:
            _emit(args, [{"gamma": g, "beta": b} for g, b in zip(zs.gammas, zs.betas)])
        else:
            _emit(args, [{"q": zs.q, "label": zs.label, "count": len(zs), "tmax": zs.tmax}])
    elif args.zeros_cmd == "load":
        zs = load_zeros(args.file)
        _emit(args, [{"q": zs.q, "label": zs.label, "count": len(zs), "tmax": zs.tmax,
                      "critical_line": zs.critical_line}])
    elif args.zeros_cmd == "count":
        chi = character_from_label(args.q, args.label)
        zs = zeros_for_character(chi, args.data_dir)
        _emit(args, [{"count": count_zeros(zs, args.sigma, args.T)}])
    elif args.zeros_cmd == "bundle":
        for p in bundle_zero_data(args.dir):
            print(p)


def cmd_explicit(args):
    chi = character_from_label(args.q, args.label)
    zs = zeros_for_character(chi, args.data_dir)
    evs = residual_scan(args.x, args.y, chi, _float_list(args.T), zs)
    _emit(args, [{"T": ev.T, "zero_sum": ev.zero_sum, "truth": ev.truth, "abs_residual": abs(ev.residual),
                  "envelope": ev.envelope, "ratio": ev.ratio} for ev in evs])
    if args.format != "csv":
        print(f"fitted_constant: {format_number(fit_constant(evs), args.full)}")


def _profile(args) -> EtaProfile:
    if args.profile == "grh":
        return EtaProfile.grh()
    if args.profile == "constant":
        if args.eta0 is None:
            raise UsageError("--profile constant needs --eta0")
        return EtaProfile.constant(args.eta0, args.T0 or 4.0)
    if args.profile == "vinogradov-korobov":
        return EtaProfile.vinogradov_korobov(args.c or 0.05, args.T0 or 100.0)
    return EtaProfile.classical(args.c or 0.1, args.T0 or 4.0)


def _density(args) -> DensityEstimate:
    return DensityEstimate(eval_fraction(args.A), args.g, args.B, args.gvalue)


def cmd_envelope(args):
    prof = _profile(args)
    dens = _density(args)
    ez = ExceptionalZero(args.q, args.beta0) if args.beta0 is not None else None
    if args.env_cmd == "all":
        if args.mode == "density" and args.y is None:
            raise UsageError("density mode needs --y")
        env = envelope_all(args.mode, prof, dens, args.q, args.x, args.y, ez, args.eps)
        if args.threshold:
            _emit(args, [{"envelope": env, "y_threshold": y_threshold(args.mode, prof, dens, args.q, args.x, args.eps)}])
        else:
            _emit(args, [{"envelope": env}])
    elif args.env_cmd == "almost-all":
        env = envelope_almost_all(args.mode, prof, dens, args.q, args.X, args.h, ez)
        if args.threshold:
            _emit(args, [{"envelope": env, "h_threshold": h_threshold(args.mode, prof, dens, args.q, args.X, args.eps)}])
        else:
            _emit(args, [{"envelope": env}])
    else:
        w = corollary_window(args.kind, x=args.x, A=eval_fraction(args.A), q=args.q, alpha=args.alpha,
                             B=args.B, C=args.C, eta0=args.eta0, h=args.h)
        rec = {"lower": w.lower, "upper": w.upper}
        if w.exceptions is not None:
            rec["exceptions"] = w.exceptions
        _emit(args, [rec])


def cmd_experiment(args):
    cfg = ExperimentConfig.from_file(
        args.config, threads=args.threads, output=args.output, summary=args.summary, zero_dir=args.data_dir
    )
    rep = run_experiment(cfg)
    if args.format == "csv":
        sys.stdout.write(rep.csv_text())
    else:
        sys.stdout.write(rep.summary_text())
    return 0 if rep.passed else 1


def cmd_report(args):
    text = Path(args.csv).read_text()
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise ValueError(f"{args.csv} has no records")
    rec = {"records": len(rows)}
    if "ratio" in rows[0]:
        ratios = [float(r["ratio"]) for r in rows]
        rec["max_ratio"] = max(ratios)
        rec["min_ratio"] = min(ratios)
    if args.cap is not None and "ratio" in rows[0]:
        rec["pass"] = rec["max_ratio"] <= args.cap
    _emit(args, [rec])
    return 0 if rec.get("pass", True) else 1


# ------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--full", action="store_true", help="print numbers at full precision (default 9 digits)")
    common.add_argument("--format", choices=("text", "csv"), default="text", help="output format")
    common.add_argument("--threads", type=int, default=None, help="worker thread cap")
    common.add_argument("--data-dir", default=None, help=f"zero-data directory (default: ${DATA_ENV} or bundled data)")

    p = argparse.ArgumentParser(
        prog="pntap",
        description="Primes in short intervals of arithmetic progressions: sieved error terms, "
        "L-function zeros, explicit formula and conditional envelopes.",
        epilog=f"Environment: {DATA_ENV} sets the default zero-data directory. "
        "Common flags (--full, --format, --threads, --data-dir) go after the subcommand.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True, metavar="command")

    s = sub.add_parser("sieve", parents=[common], help="primes and prime powers in (x, x+y]")
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--y", type=float, required=True)
    s.add_argument("--list", action="store_true", help="also list the primes")
    s.set_defaults(func=cmd_sieve)

    s = sub.add_parser("delta", parents=[common], help="twisted Chebyshev error term Delta(x, y, .)")
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--y", type=float, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--a", type=int, help="residue class a mod q")
    s.add_argument("--label", type=int, help="Dirichlet character by label")
    s.add_argument("--additive", type=int, metavar="A", help="additive character e(An/q)")
    s.add_argument("--weight", choices=("theta", "psi"), default="theta")
    s.set_defaults(func=cmd_delta)

    s = sub.add_parser("identities", parents=[common], help="check the character decompositions and Parseval")
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--y", type=float, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--weight", choices=("theta", "psi"), default="theta")
    s.set_defaults(func=cmd_identities)

    s = sub.add_parser("gauss", parents=[common], help="Gauss sums of the characters mod q")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--label", type=int)
    s.set_defaults(func=cmd_gauss)

    z = sub.add_parser("zeros", help="L-function zeros: find, load, count, predict, bundle")
    zs = z.add_subparsers(dest="zeros_cmd", required=True, metavar="action")
    s = zs.add_parser("find", parents=[common], help="locate zeros on the critical line up to height T")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--label", type=int, default=1)
    s.add_argument("--T", type=float, required=True)
    s.add_argument("--out", help="write a zero file")
    s.add_argument("--list", action="store_true", help="print every zero")
    s = zs.add_parser("load", parents=[common], help="validate and summarize a zero file")
    s.add_argument("file")
    s = zs.add_parser("count", parents=[common], help="N(sigma, T, chi) from zero data")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--label", type=int, default=1)
    s.add_argument("--T", type=float, required=True)
    s.add_argument("--sigma", type=float, default=0.0)
    s = zs.add_parser("predict", parents=[common], help="(T/pi) log(qT/2pi) - T/pi")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--T", type=float, required=True)
    s = zs.add_parser("bundle", parents=[common], help="regenerate the bundled zero files")
    s.add_argument("--dir", default=None)
    z.set_defaults(func=cmd_zeros)

    e = sub.add_parser("explicit", help="explicit formula residuals")
    es = e.add_subparsers(dest="explicit_cmd", required=True, metavar="action")
    s = es.add_parser("scan", parents=[common], help="residual Delta_psi - zero sum for a list of T")
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--y", type=float, required=True)
    s.add_argument("--q", type=int, default=1)
    s.add_argument("--label", type=int, default=1)
    s.add_argument("--T", default="50,100,200,400,800", help="comma separated heights")
    e.set_defaults(func=cmd_explicit)

    env = sub.add_parser("envelope", help="conditional bound envelopes and corollary windows")
    ens = env.add_subparsers(dest="env_cmd", required=True, metavar="action")
    shape = argparse.ArgumentParser(add_help=False)
    shape.add_argument("--profile", choices=("grh", "constant", "classical", "vinogradov-korobov"), default="grh")
    shape.add_argument("--eta0", type=float)
    shape.add_argument("--c", type=float)
    shape.add_argument("--T0", type=float)
    shape.add_argument("--A", default="7/3", help="density exponent, e.g. 7/3")
    shape.add_argument("--g", choices=("constant", "log-power", "subexp"), default="log-power")
    shape.add_argument("--B", type=float, default=1.0)
    shape.add_argument("--gvalue", type=float, default=1.0, help="value of a constant g")
    shape.add_argument("--beta0", type=float, help="exceptional zero")
    shape.add_argument("--q", type=int, default=1)
    shape.add_argument("--eps", type=float, default=0.1)
    shape.add_argument("--mode", choices=("ingham", "density"), default="ingham")
    shape.add_argument("--threshold", action="store_true", help="also print the admissibility threshold")
    s = ens.add_parser("all", parents=[common, shape], help="all-intervals envelope")
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--y", type=float)
    s = ens.add_parser("almost-all", parents=[common, shape], help="almost-all envelope")
    s.add_argument("--X", type=float, required=True)
    s.add_argument("--h", type=float, required=True)
    s = ens.add_parser("window", parents=[common, shape], help="admissible windows: all-korobov, all-constant, almost-korobov, almost-constant")
    s.add_argument("--kind", required=True)
    s.add_argument("--x", type=float, required=True, help="x, or X for almost-all kinds")
    s.add_argument("--alpha", type=float)
    s.add_argument("--C", type=float)
    s.add_argument("--h", type=float)
    env.set_defaults(func=cmd_envelope)

    x = sub.add_parser("experiment", help="run an experiment config")
    xs = x.add_subparsers(dest="experiment_cmd", required=True, metavar="action")
    s = xs.add_parser("run", parents=[common], help="run and write the CSV report and summary")
    s.add_argument("config")
    s.add_argument("--output", help="override the CSV path of the config")
    s.add_argument("--summary", help="override the summary path of the config")
    x.set_defaults(func=cmd_experiment)

    s = sub.add_parser("report", parents=[common], help="summarize a CSV report")
    s.add_argument("csv")
    s.add_argument("--cap", type=float, help="fail when the largest ratio exceeds this")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        rc = args.func(args)
    except UsageError as exc:
        print(f"pntap: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, OSError, RuntimeError, MemoryError) as exc:
        print(f"pntap: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
