"""Command-line entry point: ``lcilimit <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from .analysis import (blocks_analysis, classify_case, emax_grid_oracle, f_value)
from .core import (Instance, RngConfig, fmt_number, format_word, load_instance, parse_word,
                   sample_word, uniform_instance)
from .errors import LciError
from .exact import BlockOrder, lc_b_blocks, lc_blocks_length, lci_length, lcs_length
from .harness import converge
from .mfunc import m_closed, m_lp_oracle
from .sampler import DEFAULT_R, DEFAULT_STEPS, sample_limit, write_samples_csv


class CheckFailed(Exception):
    pass


def _int_list(text: str) -> list:
    return [int(tok) for tok in text.replace(" ", "").split(",") if tok]


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # shared by the top-level parser and every subcommand, so flags work in either position;
    # the subcommand copies use SUPPRESS so they do not overwrite values given earlier
    defaults = {"seed": 0, "threads": 1, "out": None, "check": False}
    if suppress:
        defaults = dict.fromkeys(defaults, argparse.SUPPRESS)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=defaults["seed"], help="master RNG seed")
    p.add_argument("--threads", type=int, default=defaults["threads"], help="worker threads")
    p.add_argument("--out", default=defaults["out"], help="output file (default: stdout)")
    p.add_argument("--check", action="store_true", default=defaults["check"],
                   help="exit nonzero if any invariant check fails")
    return p


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _check(args, ok: bool, what: str) -> None:
    if args.check and not ok:
        raise CheckFailed(what)


def _report(args):
    inst = load_instance(args.instance)
    if getattr(args, "blocks", None):
        return inst, blocks_analysis(inst, BlockOrder(tuple(_int_list(args.blocks)), inst.m))
    return inst, classify_case(inst)


def cmd_analyze(args) -> int:
    inst, rep = _report(args)
    out = rep.to_json()
    e = rep.e_max
    _check(args, rep.e1 <= e <= min(max(inst.pX.probs), max(inst.pY.probs)),
           "e1 <= e_max <= min(max pX, max pY)")
    fa = f_value(rep, *rep.anchor)
    _check(args, abs(float(fa) - float(e)) <= 1e-9, "anchor attains e_max")
    if args.oracle_r:
        g = emax_grid_oracle(inst, args.oracle_r)
        out["grid_oracle"] = {"r": args.oracle_r, "value": fmt_number(g),
                              "gap": float(e) - float(g)}
        _check(args, float(g) <= float(e) + 1e-12, "grid oracle below e_max")
        _check(args, float(e) - float(g) <= 2 * inst.m / args.oracle_r + 1e-12,
               "grid oracle within 2m/r of e_max")
    _emit(args, _dump(out))
    return 0


def _word_pair(args):
    m = args.m
    if m is None:
        letters = [int(t) for w in (args.x, args.y)
                   for t in (w.split(",") if "," in w else list(w)) if t.strip()]
        m = max(letters + [2])
    return parse_word(args.x, m), parse_word(args.y, m)


def cmd_lci(args) -> int:
    if args.random:
        if args.n is None:
            raise LciError("--random needs --n")
        inst = load_instance(args.instance) if args.instance else uniform_instance(args.m or 2)
        rng = RngConfig(args.seed)
        x = sample_word(inst.pX, args.n, rng.child(0))
        y = sample_word(inst.pY, args.n, rng.child(1))
    else:
        if args.x is None or args.y is None:
            raise LciError("give --x and --y, or --random")
        x, y = _word_pair(args)
    lci = lci_length(x, y)
    lcs = lcs_length(x, y)
    out = {"n_x": len(x), "n_y": len(y), "lci": lci, "lcs": lcs}
    if len(x) <= 200 and len(y) <= 200:
        out["x"], out["y"] = format_word(x), format_word(y)
    _check(args, lci <= lcs <= min(len(x), len(y)), "lci <= lcs <= min length")
    _emit(args, _dump(out))
    return 0


def _load_nu(path):
    with open(path) as fh:
        obj = json.load(fh)
    conv = lambda v: Fraction(v) if isinstance(v, str) else v
    return [conv(v) for v in obj["nuX"]], [conv(v) for v in obj["nuY"]]


def cmd_mfunc(args) -> int:
    inst, rep = _report(args)
    nu = _load_nu(args.nu)
    closed = m_closed(rep, nu)
    out = {"case": rep.case, "closed": fmt_number(closed)}
    if args.oracle:
        orc = m_lp_oracle(rep, nu)
        gap = abs(float(closed) - orc)
        out.update({"oracle": orc, "gap": gap})
        _check(args, gap <= 1e-8, "closed form matches the LP oracle")
    _emit(args, _dump(out))
    return 0


def cmd_sample_limit(args) -> int:
    inst, rep = _report(args)
    rng = RngConfig(args.seed)
    res = sample_limit(rep, args.path_steps, args.grid_r, args.reps, rng, args.threads,
                       args.refine)
    meta = res.metadata()
    meta["instance"] = inst.digest()
    summary = {"case": rep.case, "reps": res.reps, "mean": res.mean(),
               "std": float(np.std(res.samples, ddof=1)) if res.reps > 1 else 0.0,
               "grid_points": res.meta.get("grid_points")}
    _check(args, bool(np.all(np.isfinite(res.samples))), "finite samples")
    if args.out:
        write_samples_csv(args.out, res.samples, meta)
        sys.stdout.write(_dump(summary))
    else:
        sys.stdout.write("".join(f"# {k}: {v}\n" for k, v in meta.items()))
        sys.stdout.write("sample\n" + "".join(f"{float(x)!r}\n" for x in res.samples))
    return 0


def cmd_converge(args) -> int:
    inst = load_instance(args.instance)
    rep = classify_case(inst)
    res = converge(inst, _int_list(args.n), args.reps, args.path_steps, args.grid_r,
                   args.limit_reps, RngConfig(args.seed), rep, args.threads)
    _check(args, res.trend_nonincreasing(), "KS distance decreases from first to last n")
    _emit(args, res.to_gnuplot() if args.gnuplot else _dump(res.to_json()))
    return 0


def cmd_blocks(args) -> int:
    if args.instance:
        if not args.alpha:
            raise LciError("--instance needs --alpha")
        inst = load_instance(args.instance)
        rep = blocks_analysis(inst, BlockOrder(tuple(_int_list(args.alpha)), inst.m))
        _emit(args, _dump(rep.to_json()))
        return 0
    if args.x is None or args.y is None:
        raise LciError("give --instance, or --x and --y")
    x, y = _word_pair(args)
    out = {"lci": lci_length(x, y)}
    if args.alpha:
        out["alpha"] = _int_list(args.alpha)
        out["length"] = lc_blocks_length(x, y, out["alpha"])
    if args.b:
        out["b"] = args.b
        out["best_over_orders"] = lc_b_blocks(x, y, args.b)
    _emit(args, _dump(out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(suppress=True)
    parser = argparse.ArgumentParser(
        prog="lcilimit", parents=[_global_flags(suppress=False)],
        description="Longest common weakly increasing subsequences: exact lengths, "
                    "limit analysis and Monte Carlo limit laws.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="e_max, case, active set, constants")
    p.add_argument("--instance", required=True)
    p.add_argument("--blocks", help="block order, e.g. 2,1,2")
    p.add_argument("--oracle-r", type=int, default=0, help="cross-check e_max on a 1/r grid")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("lci", parents=[common], help="exact LCI length of two words")
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--random", action="store_true")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--instance")
    p.set_defaults(func=cmd_lci)

    p = sub.add_parser("mfunc", parents=[common], help="Case b functional, closed form vs LP")
    p.add_argument("--instance", required=True)
    p.add_argument("--nu", required=True, help='JSON {"nuX": [...], "nuY": [...]}')
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--blocks")
    p.set_defaults(func=cmd_mfunc)

    p = sub.add_parser("sample-limit", parents=[common], help="draw from the limit law")
    p.add_argument("--instance", required=True)
    p.add_argument("--blocks")
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--path-steps", type=int, default=DEFAULT_STEPS)
    p.add_argument("--grid-r", type=int, default=DEFAULT_R)
    p.add_argument("--refine", action="store_true", help="local search around each grid max")
    p.set_defaults(func=cmd_sample_limit)

    p = sub.add_parser("converge", parents=[common], help="KS of simulated Z_n vs the limit")
    p.add_argument("--instance", required=True)
    p.add_argument("--n", required=True, help="comma-separated word lengths")
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--limit-reps", type=int, default=10_000)
    p.add_argument("--path-steps", type=int, default=DEFAULT_STEPS)
    p.add_argument("--grid-r", type=int, default=DEFAULT_R)
    p.add_argument("--gnuplot", action="store_true", help="whitespace table instead of JSON")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("blocks", parents=[common], help="block-order lengths or analysis")
    p.add_argument("--instance")
    p.add_argument("--alpha", help="block order, e.g. 2,1,2")
    p.add_argument("--b", type=int, help="maximize over all onto orders with b blocks")
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--m", type=int)
    p.set_defaults(func=cmd_blocks)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except LciError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
