"""srtdiv command line.

Exit status: 0 success, 1 mismatches or containment violations, 2 usage error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__, harness, kernel
from .fuzzy import DEFAULT_RULES, defuzzify_centroid, fuzzify, load_rules, mamdani_aggregate
from .ieee754 import fdiv
from .qds import POLICIES, build_pd_map, sweep_containment
from .srt_core import SrtConfig, estimate_latency, trace_to_csv, trace_to_json


def _hex64(text: str) -> int:
    t = text.lower().removeprefix("0x")
    try:
        v = int(t, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a hex word: {text!r}") from None
    if not 0 <= v < 1 << 64 or len(t) > 16:
        raise argparse.ArgumentTypeError(f"not a 64-bit word: {text!r}")
    return v


def _meta(args) -> str:
    def show(k, v):
        return f"{v:016X}" if k in ("a", "b") else v
    params = " ".join(f"{k}={show(k, v)}" for k, v in sorted(vars(args).items())
                      if k not in ("func", "command") and v is not None)
    return f"srtdiv {__version__} {args.command} {params}".rstrip()


def _rules(args):
    path = getattr(args, "rules", None)
    return load_rules(path) if path else None


def cmd_div(args) -> int:
    trace = [] if args.trace else None
    bits, flags = fdiv(args.a, args.b, args.policy, rules=_rules(args), trace=trace)
    print(f"{bits:016X} flags:{flags}")
    if args.trace:
        path = Path(args.trace)
        if path.suffix == ".json":
            path.write_text(trace_to_json(trace) + "\n")
        else:
            path.write_text(trace_to_csv(trace, meta=_meta(args)))
    return 0


def _emit_report(report, args) -> int:
    meta = {"tool": "srtdiv", "version": __version__, "invocation": _meta(args)}
    text = report.to_json(meta=meta)
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(f"{report.cases_run} cases, {len(report.mismatches)} mismatches")
    else:
        print(text)
    if args.timing:
        print(f"wall_time {report.wall_time:.3f}s", file=sys.stderr)
    return 0 if report.ok else 1


def cmd_fuzz(args) -> int:
    report = harness.fuzz_divide(args.n, args.seed, args.policy, args.oracle,
                                 rules=_rules(args))
    return _emit_report(report, args)


def cmd_regress(args) -> int:
    try:
        report = harness.run_regressions(args.file)
    except harness.RegressionFormatError as exc:
        print(f"error: {args.file}: {exc}", file=sys.stderr)
        return 2
    return _emit_report(report, args)


def cmd_compare(args) -> int:
    report = harness.compare_policies(args.frac_bits, args.d_bits, args.divides,
                                      args.seed, rules=_rules(args))
    return _emit_report(report, args)


def cmd_sweep(args) -> int:
    report = sweep_containment(args.frac_bits, args.policy, args.d_bits,
                               args.trunc_bits, rules=_rules(args))
    print(f"policy={args.policy} cells={report.cells_checked}")
    for d, rp, q, pn in report.violations[:20]:
        print(f"violation d={d.to_decimal()} rp={rp.to_decimal()} q={q} "
              f"p_next={pn.to_decimal()}")
    print(f"{len(report.violations)} violations")
    return 0 if report.ok else 1


def cmd_pdmap(args) -> int:
    pd = build_pd_map(args.res_d, args.res_p, args.policy, rules=_rules(args))
    with open(args.out, "w", newline="") as fh:
        pd.write_csv(fh, meta=_meta(args))
    print(f"{len(pd.rows)} cells written to {args.out}")
    return 0


def cmd_fuzzy_demo(args) -> int:
    rules = _rules(args) or DEFAULT_RULES
    if not 0.0 <= args.u <= 1.0:
        print("error: --u must lie in [0, 1]", file=sys.stderr)
        return 2
    mk, mi = fuzzify(args.u, rules)
    agg = mamdani_aggregate(mk, mi, rules)
    y = defuzzify_centroid(agg)
    print(f"u {args.u!r}")
    print(f"memberships keep={mk!r} inc={mi!r}")
    step = max(1, len(agg.ys) // args.samples)
    print("aggregate samples (y mu):")
    for i in range(0, len(agg.ys), step):
        print(f"  {agg.ys[i]:.6f} {agg.mus[i]:.6f}")
    print(f"centroid {y!r}")
    print(f"decision {'increment' if y > 0.5 else 'keep'}")
    return 0


def cmd_latency(args) -> int:
    est = estimate_latency(SrtConfig(n_iters=args.iters), args.stage_ns, args.overhead_ns)
    print(f"{est:g} ns")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="srtdiv", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version",
                   version=f"srtdiv {__version__} ({kernel.BACKEND} kernel)")
    sub = p.add_subparsers(dest="command", required=True)

    def policy_arg(sp, default="exact"):
        sp.add_argument("--policy", choices=POLICIES, default=default)
        sp.add_argument("--rules", help="fuzzy rule file (name: x,mu; ...)")

    def report_args(sp):
        sp.add_argument("--out", help="write the JSON report here")
        sp.add_argument("--timing", action="store_true", help="print wall time to stderr")

    sp = sub.add_parser("div", help="divide two binary64 words given in hex")
    sp.add_argument("a", type=_hex64)
    sp.add_argument("b", type=_hex64)
    policy_arg(sp)
    sp.add_argument("--trace", metavar="FILE", help="per-cycle trace (.json or csv)")
    sp.set_defaults(func=cmd_div)

    sp = sub.add_parser("fuzz", help="fuzz fdiv against a reference oracle")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--oracle", choices=sorted(harness.ORACLES), default="platform")
    policy_arg(sp)
    report_args(sp)
    sp.set_defaults(func=cmd_fuzz)

    sp = sub.add_parser("sweep", help="exhaustive containment sweep")
    sp.add_argument("--frac-bits", type=int, required=True)
    sp.add_argument("--d-bits", type=int)
    sp.add_argument("--trunc-bits", type=int, help="truncate residuals (constants policy)")
    policy_arg(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("pdmap", help="export the P-D region map as CSV")
    sp.add_argument("--res-d", type=int, required=True)
    sp.add_argument("--res-p", type=int, required=True)
    sp.add_argument("--out", required=True)
    policy_arg(sp)
    sp.set_defaults(func=cmd_pdmap)

    sp = sub.add_parser("fuzzy-demo", help="show one fuzzy inference")
    sp.add_argument("--u", type=float, required=True)
    sp.add_argument("--samples", type=int, default=16, help="aggregate rows to print")
    sp.add_argument("--rules")
    sp.set_defaults(func=cmd_fuzzy_demo)

    sp = sub.add_parser("latency", help="iteration-count latency model")
    sp.add_argument("--iters", type=int, required=True)
    sp.add_argument("--stage-ns", type=float, action="append", required=True,
                    help="per-cycle stage delay; repeat for parallel stages")
    sp.add_argument("--overhead-ns", type=float, default=0.0)
    sp.set_defaults(func=cmd_latency)

    sp = sub.add_parser("regress", help="run a regression vector file")
    sp.add_argument("--file", required=True)
    report_args(sp)
    sp.set_defaults(func=cmd_regress)

    sp = sub.add_parser("compare", help="cross-compare the three correction policies")
    sp.add_argument("--frac-bits", type=int, required=True)
    sp.add_argument("--d-bits", type=int)
    sp.add_argument("--divides", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--rules")
    report_args(sp)
    sp.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
