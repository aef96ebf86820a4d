"""Command-line front end.

Exit status: 0 on success, 2 on usage errors (bad flags, malformed or
non-fundamental inputs, x beyond an explicit sieve limit), 1 when a
computation fails (memory budget, undefined ratios, singular quadrature).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .arith import CharacterSpec, parse_bigint
from .charsum import (
    DEFAULT_CUTOFF,
    chi_on_primes,
    curly_l,
    e_chi,
    l1_euler_product,
    l1_interval_from_curly_l,
    prime_char_sum,
)
from .errors import InvalidDiscriminantError, OutOfRangeError, P2RaceError
from .polyprimes import PolySpec, conjecture_f_report
from .presets import PRESETS
from .race import Convention, exact_bias_ratio, landau_residual, race_series
from .search import EULER_GAMMA, curly_threshold_from_l1, scan_discriminants, tail_proportion
from .sieve import load_or_build

SCHEMA_VERSION = 1
RACE_CSV_HEADER = [
    "x", "n_pp", "n_pm", "n_mp", "n_mm", "n_coprime",
    "r_minus", "r_plus", "predicted_minus", "cutoff", "oscillation",
]
SEARCH_CSV_HEADER = ["d", "curly_value", "cutoff", "oscillation"]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    d: int | None = None
    A: int | None = None
    xs: list = field(default_factory=list)
    eta: int = -1
    cutoff: int = DEFAULT_CUTOFF
    convention: Convention = Convention.ORDERED_WITH_EQUAL
    output: str = "table"
    threads: int = 1
    prime_cache: str | None = None
    sieve_limit: int | None = None


def _bigint(text):
    try:
        return parse_bigint(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed integer: {text!r}")


def _count(text):
    # decimal integers, also 1e6-style powers of ten
    try:
        if "e" in text.lower():
            mant, _, exp = text.lower().partition("e")
            value = int(mant) * 10 ** int(exp)
        else:
            value = parse_bigint(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed integer: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def _count_list(text):
    return [_count(part) for part in text.split(",") if part]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("table", "csv", "json"), default="table")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads (default: machine parallelism)")
    common.add_argument("--prime-cache", metavar="PATH",
                        help="binary prime-table cache; P2RACE_CACHE supplies a default")
    common.add_argument("--sieve-limit", type=_count, metavar="N",
                        help="sieve exactly this far instead of the minimum needed")

    character = argparse.ArgumentParser(add_help=False)
    group = character.add_mutually_exclusive_group(required=True)
    group.add_argument("--d", type=_bigint, help="fundamental discriminant (decimal, any length)")
    group.add_argument("--preset", choices=sorted(PRESETS))
    character.add_argument("--trial-bound", type=_count, default=10**6,
                           help="trial-division bound for squarefreeness of d")

    parser = _Parser(prog="p2race", description="Prime races among products of two primes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)

    race = sub.add_parser("race", parents=[common, character],
                          help="observed and predicted race ratios r_d(x)")
    race.add_argument("--xs", "--x", type=_count_list, action="extend", required=True,
                      help="comma-separated bounds x, ascending")
    race.add_argument("--eta", type=int, choices=(-1, 1), default=-1)
    race.add_argument("--cutoff", type=_count, default=DEFAULT_CUTOFF,
                      help="prime cutoff for the predicted ratio")
    race.add_argument("--convention", choices=[c.value for c in Convention],
                      default=Convention.ORDERED_WITH_EQUAL.value)

    lsum = sub.add_parser("lsum", parents=[common, character],
                          help="truncated sum_p chi(p)/p, E(chi) and sum_p chi(p)")
    lsum.add_argument("--cutoff", type=_count, default=DEFAULT_CUTOFF)

    l1 = sub.add_parser("l1", parents=[common, character],
                        help="truncated Euler product for L(1, chi)")
    l1.add_argument("--cutoff", type=_count, default=DEFAULT_CUTOFF)

    search = sub.add_parser(
        "search", parents=[common],
        help="rank fundamental discriminants by the truncated prime sum",
        description=(
            "Tail thresholds --tau apply to the prime-sum scale.  A threshold "
            "L(1,chi) >= e^gamma * t needs a prime sum of at least "
            "gamma + log t - 0.315718; --tau-l1 applies that conversion (and "
            "gamma + log t - 0.18198 for --side le)."
        ),
    )
    search.add_argument("--D", type=_count, required=True, help="scan |d| <= D")
    search.add_argument("--d-min", type=_count, default=0,
                        help="skip |d| below this (split long scans into ranges)")
    search.add_argument("--signs", choices=("positive", "negative", "both"), default="both")
    search.add_argument("--cutoff", type=_count, default=10**6)
    search.add_argument("--top-k", type=int, default=10)
    search.add_argument("--tau", type=float, action="append", default=[],
                        help="report tail proportions at this prime-sum threshold")
    search.add_argument("--tau-l1", type=float, action="append", default=[],
                        help="threshold t on the L(1,chi) >= e^gamma t scale")
    search.add_argument("--side", choices=("ge", "le"), default="ge")

    hl = sub.add_parser("hl", parents=[common],
                        help="prime values of x^2+x+A against C(delta) L_A(n)")
    g = hl.add_mutually_exclusive_group(required=True)
    g.add_argument("--A", type=_bigint)
    g.add_argument("--preset", choices=sorted(PRESETS))
    hl.add_argument("--n", type=_count, required=True)
    hl.add_argument("--cutoff", type=_count, default=DEFAULT_CUTOFF)
    hl.add_argument("--rounds", type=int, default=32, help="probable-prime rounds above 2**64")

    landau = sub.add_parser("landau", parents=[common],
                            help="ordered prime-pair counts against Landau's asymptotic")
    landau.add_argument("--xs", "--x", type=_count_list, action="extend", required=True)
    return parser


def _config(args) -> RunConfig:
    cfg = RunConfig(args.subcommand, output=args.output, threads=max(1, args.threads),
                    sieve_limit=args.sieve_limit)
    cfg.prime_cache = args.prime_cache or os.environ.get("P2RACE_CACHE") or None
    if getattr(args, "preset", None):
        cfg.A, cfg.d = PRESETS[args.preset]
    if getattr(args, "d", None) is not None:
        cfg.d = args.d
    if getattr(args, "A", None) is not None:
        cfg.A = args.A
    if hasattr(args, "xs"):
        cfg.xs = list(args.xs)
        if any(b <= a for a, b in zip(cfg.xs, cfg.xs[1:])):
            raise UsageError("--xs must be strictly ascending")
    if hasattr(args, "eta"):
        cfg.eta = args.eta
    if hasattr(args, "cutoff"):
        cfg.cutoff = args.cutoff
    if hasattr(args, "convention"):
        cfg.convention = Convention(args.convention)
    return cfg


def _character(cfg: RunConfig, trial_bound: int) -> CharacterSpec:
    if cfg.d in (0, 1):
        raise UsageError("d must be a fundamental discriminant ≠ 0, 1")
    try:
        return CharacterSpec.create(cfg.d, trial_bound)
    except InvalidDiscriminantError as exc:
        raise UsageError(str(exc))


def _table(cfg: RunConfig, need: int):
    need = max(need, 2)
    if cfg.sieve_limit is not None:
        if cfg.sieve_limit < need:
            raise UsageError(f"x={need} exceeds the sieve limit {cfg.sieve_limit}")
        need = cfg.sieve_limit
    return load_or_build(need, cfg.prime_cache, threads=cfg.threads)


def _estimate(est):
    return {"value": est.value, "cutoff": est.cutoff, "oscillation": est.oscillation}


def _ratio(frac: Fraction):
    return [frac.numerator, frac.denominator]


def run_race(cfg, args):
    spec = _character(cfg, args.trial_bound)
    if not cfg.xs:
        raise UsageError("--xs needs at least one value")
    table = _table(cfg, max(cfg.xs[-1], cfg.cutoff))
    cache = chi_on_primes(spec, table, cfg.threads)
    curly = curly_l(cache, table, cfg.cutoff)
    rows = race_series(spec, cache, table, cfg.xs, cfg.eta, cfg.convention, curly, cfg.threads)
    out = []
    for row in rows:
        t = row.tally
        coprime = t.n_coprime > 0
        exact = exact_bias_ratio(t, cfg.eta) if coprime else None
        out.append({
            "x": row.x,
            "counts": {k: v for k, v in t.as_dict().items() if k.startswith("n_")},
            "r": row.r,
            "r_exact": {"numerator": 4 * t.count(cfg.eta), "denominator": t.n_coprime},
            "r_reduced": _ratio(exact) if exact is not None else None,
            "r_minus": 4 * t.n_mm / t.n_coprime,
            "r_plus": 4 * t.n_pp / t.n_coprime,
            "predicted": row.predicted,
            "predicted_minus": 1.0 - curly.value / math.log(math.log(row.x)) if row.x >= 16 else None,
        })
    return {
        "d": str(spec.d),
        "validation": spec.validation,
        "trial_bound": spec.trial_bound,
        "eta": cfg.eta,
        "convention": cfg.convention.value,
        "curly_l": _estimate(curly),
        "rows": out,
    }


def run_lsum(cfg, args):
    spec = _character(cfg, args.trial_bound)
    table = _table(cfg, cfg.cutoff)
    cache = chi_on_primes(spec, table, cfg.threads)
    curly = curly_l(cache, table, cfg.cutoff)
    lo, hi = l1_interval_from_curly_l(curly)
    return {
        "d": str(spec.d),
        "validation": spec.validation,
        "trial_bound": spec.trial_bound,
        "curly_l": _estimate(curly),
        "e_chi": _estimate(e_chi(cache, table, cfg.cutoff)),
        "l1_interval": {"low": lo, "high": hi, "cutoff": curly.cutoff,
                        "oscillation": curly.oscillation},
        "prime_char_sum": {"x": cfg.cutoff, "value": prime_char_sum(cache, table, cfg.cutoff)},
    }


def run_l1(cfg, args):
    spec = _character(cfg, args.trial_bound)
    table = _table(cfg, cfg.cutoff)
    cache = chi_on_primes(spec, table, cfg.threads)
    curly = curly_l(cache, table, cfg.cutoff)
    lo, hi = l1_interval_from_curly_l(curly)
    return {
        "d": str(spec.d),
        "validation": spec.validation,
        "trial_bound": spec.trial_bound,
        "l1_euler_product": _estimate(l1_euler_product(cache, table, cfg.cutoff)),
        "curly_l": _estimate(curly),
        "l1_interval": {"low": lo, "high": hi, "cutoff": curly.cutoff,
                        "oscillation": curly.oscillation},
    }


def run_search(cfg, args, stream=None):
    if args.D < 3:
        raise UsageError("--D must be >= 3")
    table = _table(cfg, cfg.cutoff)
    result = scan_discriminants(
        args.D, args.signs, table, cfg.cutoff, args.top_k, cfg.threads, args.d_min,
        on_record=stream,
    )
    taus = [("curly", t, t) for t in args.tau]
    taus += [("l1", t, curly_threshold_from_l1(math.exp(EULER_GAMMA) * t, args.side))
             for t in args.tau_l1]
    tails = []
    for scale, given, tau in taus:
        share = tail_proportion(result.records, tau, args.side) if result.records else None
        tails.append({"scale": scale, "given": given, "curly_threshold": tau,
                      "side": args.side, "proportion": share})

    def rec(r):
        return {"d": str(r.d), "sign_class": r.sign_class, "curly_l": _estimate(r.curly)}

    return {
        "D": args.D,
        "d_min": args.d_min,
        "signs": args.signs,
        "cutoff": cfg.cutoff,
        "scanned": len(result.records),
        "most_negative": [rec(r) for r in result.most_negative],
        "most_positive": [rec(r) for r in result.most_positive],
        "tails": tails,
    }


def run_hl(cfg, args):
    spec = PolySpec.from_A(cfg.A)
    table = _table(cfg, cfg.cutoff)
    report = conjecture_f_report(spec, args.n, table, cfg.cutoff, args.rounds, cfg.threads)
    return {
        "A": str(spec.A),
        "delta": str(spec.delta),
        "n": args.n,
        "P": report.P,
        "L": report.L,
        "C": _estimate(report.C),
        "ratio": report.ratio,
        "ratio_cutoff": report.C.cutoff,
        "ratio_oscillation": report.C.oscillation,
    }


def run_landau(cfg, args):
    if not cfg.xs:
        raise UsageError("--xs needs at least one value")
    if cfg.xs[0] < 4:
        raise UsageError("landau needs x >= 4")
    table = _table(cfg, cfg.xs[-1])
    rows = []
    for x in cfg.xs:
        count, residual = landau_residual(table, x)
        rows.append({"x": x, "count": count, "residual": residual})
    return {"rows": rows}


RUNNERS = {
    "race": run_race,
    "lsum": run_lsum,
    "l1": run_l1,
    "search": run_search,
    "hl": run_hl,
    "landau": run_landau,
}


# ---- rendering -------------------------------------------------------------

def _fmt(v):
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _print_table(header, rows, out):
    cells = [[_fmt(v) for v in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h) for i, h in enumerate(header)]
    out.write("  ".join(h.rjust(w) for h, w in zip(header, widths)) + "\n")
    for r in cells:
        out.write("  ".join(c.rjust(w) for c, w in zip(r, widths)) + "\n")


def _kv(pairs, out):
    width = max(len(k) for k, _ in pairs)
    for k, v in pairs:
        out.write(f"{k.ljust(width)}  {_fmt(v)}\n")


def _est_text(e):
    return f"{e['value']:.6g} (cutoff {e['cutoff']}, oscillation {e['oscillation']:.3g})"


def render_table(cmd, res, out):
    if cmd == "race":
        _kv([("d", res["d"]), ("validation", res["validation"]), ("eta", res["eta"]),
             ("convention", res["convention"]), ("curly_l", _est_text(res["curly_l"]))], out)
        out.write("\n")
        key = "n_mm" if res["eta"] < 0 else "n_pp"
        _print_table(["x", "n_coprime", key, "r", "predicted"],
                     [[r["x"], r["counts"]["n_coprime"], r["counts"][key], r["r"], r["predicted"]]
                      for r in res["rows"]], out)
    elif cmd in ("lsum", "l1"):
        pairs = [("d", res["d"]), ("validation", res["validation"])]
        for k in ("curly_l", "e_chi", "l1_euler_product"):
            if k in res:
                pairs.append((k, _est_text(res[k])))
        iv = res["l1_interval"]
        pairs.append(("l1_interval", f"[{iv['low']:.6g}, {iv['high']:.6g}]"))
        if "prime_char_sum" in res:
            pairs.append((f"sum chi(p), p <= {res['prime_char_sum']['x']}", res["prime_char_sum"]["value"]))
        _kv(pairs, out)
    elif cmd == "search":
        _kv([("D", res["D"]), ("signs", res["signs"]), ("cutoff", res["cutoff"]),
             ("scanned", res["scanned"])], out)
        for title in ("most_negative", "most_positive"):
            out.write(f"\n{title}\n")
            _print_table(["d", "curly_l", "oscillation"],
                         [[r["d"], r["curly_l"]["value"], r["curly_l"]["oscillation"]] for r in res[title]], out)
        if res["tails"]:
            out.write("\ntails\n")
            _print_table(["scale", "given", "curly_threshold", "side", "proportion"],
                         [[t["scale"], t["given"], t["curly_threshold"], t["side"], t["proportion"]]
                          for t in res["tails"]], out)
    elif cmd == "hl":
        _kv([("A", res["A"]), ("delta", res["delta"]), ("n", res["n"]), ("P", res["P"]),
             ("L", res["L"]), ("C", _est_text(res["C"])), ("ratio P/(C L)", res["ratio"])], out)
    elif cmd == "landau":
        _print_table(["x", "count", "residual"],
                     [[r["x"], r["count"], r["residual"]] for r in res["rows"]], out)


def render_csv(cmd, res, out):
    writer = csv.writer(out)
    if cmd == "race":
        writer.writerow(RACE_CSV_HEADER)
        c = res["curly_l"]
        for r in res["rows"]:
            n = r["counts"]
            writer.writerow([r["x"], n["n_pp"], n["n_pm"], n["n_mp"], n["n_mm"], n["n_coprime"],
                             repr(r["r_minus"]), repr(r["r_plus"]),
                             "" if r["predicted_minus"] is None else repr(r["predicted_minus"]),
                             c["cutoff"], repr(c["oscillation"])])
    elif cmd in ("lsum", "l1"):
        writer.writerow(["d", "quantity", "value", "cutoff", "oscillation"])
        for k in ("curly_l", "e_chi", "l1_euler_product"):
            if k in res:
                e = res[k]
                writer.writerow([res["d"], k, repr(e["value"]), e["cutoff"], repr(e["oscillation"])])
        iv = res["l1_interval"]
        writer.writerow([res["d"], "l1_interval_low", repr(iv["low"]), iv["cutoff"], repr(iv["oscillation"])])
        writer.writerow([res["d"], "l1_interval_high", repr(iv["high"]), iv["cutoff"], repr(iv["oscillation"])])
    elif cmd == "hl":
        writer.writerow(["A", "n", "P", "L", "C", "ratio", "cutoff", "oscillation"])
        writer.writerow([res["A"], res["n"], res["P"], repr(res["L"]), repr(res["C"]["value"]),
                         repr(res["ratio"]), res["C"]["cutoff"], repr(res["C"]["oscillation"])])
    elif cmd == "landau":
        writer.writerow(["x", "count", "residual"])
        for r in res["rows"]:
            writer.writerow([r["x"], r["count"], repr(r["residual"])])


def dump_json(cmd, res) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, "subcommand": cmd, **res},
                      indent=2, ensure_ascii=False) + "\n"


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.subcommand is None:
        parser.print_usage(stderr)
        stderr.write("p2race: error: a subcommand is required (race, lsum, l1, search, hl, landau)\n")
        return 2
    try:
        cfg = _config(args)
        stream = None
        if cfg.subcommand == "search" and cfg.output == "csv":
            writer = csv.writer(stdout)
            writer.writerow(SEARCH_CSV_HEADER)

            def stream(rec):
                c = rec.curly
                writer.writerow([rec.d, repr(c.value), c.cutoff, repr(c.oscillation)])

            run_search(cfg, args, stream)
            return 0
        res = RUNNERS[cfg.subcommand](cfg, args)
    except UsageError as exc:
        stderr.write(f"p2race {args.subcommand}: error: {exc}\n")
        return 2
    except OutOfRangeError as exc:
        stderr.write(f"p2race {args.subcommand}: error: {exc}\n")
        return 2
    except (P2RaceError, MemoryError, ValueError) as exc:
        stderr.write(f"p2race {args.subcommand}: failed: {exc}\n")
        return 1

    if cfg.output == "json":
        stdout.write(dump_json(cfg.subcommand, res))
    elif cfg.output == "csv":
        render_csv(cfg.subcommand, res, stdout)
    else:
        render_table(cfg.subcommand, res, stdout)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
