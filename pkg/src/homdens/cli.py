"""Command-line front end: JSON in, JSON out, deterministic given a seed.

Exit codes: 0 success/certified, 1 verdict-negative, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .bigraph import (
    BigraphError,
    bigraph_from_json,
    bigraph_to_json,
    plain_graph_from_json,
)
from .density import DensityError, density, expansion, expansion_total, hom_count
from .harness import HarnessError, builtin_registry, check_entry, get_entry, run_registry
from .kernels import (
    KernelError,
    cut_norm,
    kernel_from_json,
    kernel_to_json,
    l2_norm,
    linf_norm,
    sample_kernel,
    schatten_norm,
)
from .local_sidorenko import VerifierError, certify_graph, verify_variant

USAGE_ERROR = 2


class CliError(Exception):
    pass


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise CliError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")


def _load_bigraph(path: str):
    return bigraph_from_json(_load_json(path))


def _load_plain(path: str):
    return plain_graph_from_json(_load_json(path))


def _load_kernel(path: str):
    return kernel_from_json(_load_json(path))


def _fmt_value(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
    return x


def _emit(obj: dict, args) -> None:
    indent = 2 if args.pretty else None
    text = json.dumps(obj, indent=indent, sort_keys=True)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _parse_eps(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise CliError(f"cannot parse eps {text!r}; use a rational like 1/2048")


def cmd_density(args) -> int:
    f = _load_bigraph(args.graph)
    k = _load_kernel(args.kernel)
    _emit({"command": "density", "value": _fmt_value(density(f, k))}, args)
    return 0


def cmd_hom(args) -> int:
    f = _load_bigraph(args.graph)
    g = _load_plain(args.target)
    _emit({"command": "hom", "value": str(hom_count(f, g))}, args)
    return 0


def cmd_norm(args) -> int:
    k = _load_kernel(args.kernel)
    out = {"command": "norm", "kind": args.kind}
    if args.kind == "cut":
        res = cut_norm(k)
        out["value"] = _fmt_value(res.value)
        out["exact"] = res.exact
    elif args.kind == "l2":
        out["value"] = l2_norm(k)
    elif args.kind == "linf":
        out["value"] = _fmt_value(linf_norm(k))
    else:
        out["value"] = schatten_norm(k, args.r)
        out["r"] = args.r
    _emit(out, args)
    return 0


def cmd_expand(args) -> int:
    f = _load_bigraph(args.graph)
    u = _load_kernel(args.kernel)
    terms = expansion(f, u)
    out = {
        "command": "expand",
        "terms": [
            {
                "nodes": t.n_nodes,
                "edges": t.n_edges,
                "multiplicity": t.multiplicity,
                "value": _fmt_value(t.value),
                "graph": bigraph_to_json(t.graph),
            }
            for t in terms
        ],
        "total": _fmt_value(expansion_total(terms)),
    }
    _emit(out, args)
    return 0


def cmd_check(args) -> int:
    if args.entry == "all":
        report = run_registry(trials=args.trials, tol=args.tol, seed=args.seed)
        _emit({"command": "check", **report}, args)
        return 0 if report["all_paper_passed"] else 1
    entry = get_entry(args.entry)
    rep = check_entry(entry, args.trials, tol=args.tol, seed=args.seed)
    _emit({"command": "check", **rep.to_json()}, args)
    if entry.status == "paper":
        return 0 if rep.passed else 1
    return 0


def cmd_verify(args) -> int:
    f = _load_bigraph(args.graph)
    w = _load_kernel(args.kernel)
    eps = _parse_eps(args.eps) if args.eps else None
    cert = verify_variant(f, w, args.variant, eps)
    _emit({"command": "verify", **cert.to_json()}, args)
    return 0 if cert.verdict == "certified" else 1


def cmd_certify_graph(args) -> int:
    g = _load_plain(args.target)
    f = _load_bigraph(args.graph)
    cert = certify_graph(g, f, _parse_eps(args.eps))
    _emit({"command": "certify-graph", **cert.to_json()}, args)
    return 0 if cert.verdict == "certified" else 1


def cmd_sample(args) -> int:
    lo, hi = (float(x) for x in args.range.split(","))
    k = sample_kernel(
        args.blocks,
        (lo, hi),
        symmetric=args.symmetric,
        seed=args.seed,
        mean_zero=args.mean_zero,
        mode=args.mode,
    )
    _emit({"command": "sample", "kernel": kernel_to_json(k)}, args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homdens",
        description="homomorphism densities of bigraphs in step kernels, "
                    "inequality screening, and local-minimality certificates",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-o", "--output", help="write JSON here instead of stdout")
        p.add_argument("--pretty", action="store_true", help="indent the JSON output")
        p.add_argument("--threads", type=int,
                       default=int(os.environ.get("HOMDENS_THREADS", "1")),
                       help="worker hint; evaluation is sequential and "
                            "deterministic regardless")

    p = sub.add_parser("density", help="t(F, K) for a graph and kernel")
    p.add_argument("graph")
    p.add_argument("kernel")
    common(p)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("hom", help="exact homomorphism count hom(F, G)")
    p.add_argument("graph")
    p.add_argument("target")
    common(p)
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("norm", help="kernel norms")
    p.add_argument("kernel")
    p.add_argument("--kind", choices=("l2", "linf", "cut", "schatten"), required=True)
    p.add_argument("--r", type=int, default=2, help="schatten order")
    common(p)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("expand", help="spanning-subgraph expansion ledger")
    p.add_argument("graph")
    p.add_argument("kernel")
    common(p)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("check", help="run registry inequality checks")
    p.add_argument("entry", help="an entry id, or 'all'")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verify", help="local-minimality certificate for t(F, W) >= 1")
    p.add_argument("graph")
    p.add_argument("kernel")
    p.add_argument("--variant", choices=("close", "infty", "c4", "reg"), default="close")
    p.add_argument("--eps", help="rational slack for the reg variant, e.g. 1/4096")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("certify-graph", help="discrepancy certificate on a finite graph")
    p.add_argument("target", help="plain graph JSON")
    p.add_argument("graph", help="bigraph JSON")
    p.add_argument("--eps", required=True)
    common(p)
    p.set_defaults(func=cmd_certify_graph)

    p = sub.add_parser("sample", help="deterministic random step kernel")
    p.add_argument("--blocks", type=int, required=True)
    p.add_argument("--range", default="-1,1")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--mean-zero", action="store_true")
    p.add_argument("--mode", choices=("rational", "float"), default="rational")
    common(p)
    p.set_defaults(func=cmd_sample)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (CliError, BigraphError, KernelError, DensityError, HarnessError,
            VerifierError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
