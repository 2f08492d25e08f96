"""Command-line front end.

Every subcommand writes one JSON document (keys sorted, exact polynomial
strings) that embeds the toolkit version and the resolved configuration.
Exit codes: 0 pass, 1 verification failure, 2 usage or order error,
3 resource budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .exact import format_rational, parse_rational
from .expand import (InsufficientOrderError, expand_hfe, min_order, specialize,
                     to_document)
from .families import FamilyError, resolve_family
from .feqsolve import FeqParams, feq_residual, solve_feq
from .ideal import Budget, BudgetExceeded, MonomialOrder, membership
from .poly import parse_poly

log = logging.getLogger("hirzebruch")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

# smallest order reproducing each published relation set (z^7 variant for n = 6 with c)
DEFAULT_ORDERS = {3: 9, 4: 12, 5: 16, 6: 21}
DEFAULT_TOL = 1e-9


class UsageError(ValueError):
    pass


@dataclass
class JobConfig:
    subcommand: str
    n: int | None = None
    order: int | None = None
    terms: int | None = None
    family: str | None = None
    params: list = field(default_factory=list)
    tolerance: float | None = None
    seed: int = 0
    samples: int | None = None
    max_pairs: int | None = None
    threads: int = 1
    out: str | None = None
    extra: dict = field(default_factory=dict)


def _default_budget():
    env = os.environ.get("HFE_MAX_PAIRS")
    return int(env) if env else 1_000_000


def _parse_list(text):
    if text is None or text == "":
        return []
    return [t.strip() for t in text.split(",")]


def _rationals(items):
    try:
        return [parse_rational(t) for t in items]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad rational parameter: {exc}") from exc


def _order_for(n, order):
    if order is not None:
        return order
    return DEFAULT_ORDERS.get(n, min_order(n))


def _emit(doc, out, cfg: JobConfig):
    doc = dict(doc)
    doc["version"] = __version__
    doc["config"] = asdict(cfg)
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    else:
        sys.stdout.write(text)
    return doc


# ------------------------------------------------------------- subcommands
def cmd_expand(args, cfg):
    if not 3 <= args.n <= 6:
        raise UsageError("n must be between 3 and 6")
    D = _order_for(args.n, args.order)
    cfg.order = D
    t0 = time.perf_counter()
    rs = expand_hfe(args.n, D, method=args.method,
                    reduce_translation=not args.no_translation, threads=args.threads)
    if args.c_zero:
        rs = specialize(rs, {"c": 0})
    wall = round(time.perf_counter() - t0, 3) if args.timing else None
    _emit(to_document(rs, wall_time=wall), args.out, cfg)
    return EXIT_OK


def verify_family(family: str, params, n: int, D: int, threads: int = 1):
    """Substitute a family's series into the relation set; return a report dict."""
    spec = resolve_family(family, params)
    rs = expand_hfe(n, D, threads=threads)
    kmax = max(int(v[1:]) for v in rs.ctx.names if v.startswith("q"))
    qvals = spec.q_values(kmax)
    check = rs.check_q_point(qvals)
    expected = spec.expected_c(n)
    rows = [{"expr": r.to_string(), "value": format_rational(v)}
            for r, v in zip(rs.residual, check["residual"])]
    c_val = check["c"]
    c_ok = expected is None or c_val == expected
    passed = check["ok"] and c_ok
    return {
        "family": family,
        "params": [format_rational(p) for p in spec.params],
        "branch": spec.branch,
        "n": n,
        "D": D,
        "q": [format_rational(q) for q in qvals[:4]],
        "c": None if c_val is None else format_rational(c_val),
        "expected_c": None if expected is None else format_rational(expected),
        "solved_mismatch": {k: format_rational(v) for k, v in sorted(check["solved_mismatch"].items())},
        "residuals": rows,
        "status": "PASS" if passed else "FAIL",
    }


def cmd_verify(args, cfg):
    params = _rationals(_parse_list(args.params))
    D = _order_for(args.n, args.order)
    cfg.order = D
    report = verify_family(args.family, params, args.n, D, args.threads)
    out = args.out
    if out is None and args.out_dir:
        out = str(Path(args.out_dir) / "reports" / f"{args.family}_{args.n}.report")
    _emit(report, out, cfg)
    if report["status"] != "PASS":
        bad = [r["expr"] for r in report["residuals"] if r["value"] != "0"]
        msg = bad[0] if bad else f"c = {report['c']} but expected {report['expected_c']}"
        print(f"verification failed: {msg}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _series_text(f):
    parts = []
    for k, c in enumerate(f.coeffs):
        if not c:
            continue
        mono = "z" if k == 1 else f"z^{k}"
        parts.append(mono if c == 1 else f"{format_rational(c)}*{mono}")
    return "f = " + (" + ".join(parts) if parts else "0")


def cmd_ode(args, cfg):
    q = _rationals(_parse_list(args.q))
    if len(q) != 4:
        raise UsageError("--q needs four rationals q1,q2,q3,q4")
    if args.terms < 5:
        raise UsageError("--terms must be at least 5")
    f = solve_feq(FeqParams(*q), args.terms)
    res = feq_residual(f, *q[:3])
    doc = {
        "q": [format_rational(x) for x in q],
        "f": [format_rational(c) for c in f.coeffs],
        "text": _series_text(f),
        "residual_zero": res.is_zero(),
    }
    _emit(doc, args.out, cfg)
    return EXIT_OK if res.is_zero() else EXIT_FAIL


def cmd_family(args, cfg):
    params = _rationals(_parse_list(args.params))
    spec = resolve_family(args.family, params)
    f = spec.series(args.terms)
    doc = {
        "family": args.family,
        "params": [format_rational(p) for p in spec.params],
        "branch": spec.branch,
        "q": [format_rational(x) for x in spec.q_values(min(args.terms - 1, 8))],
        "f": [format_rational(c) for c in f.coeffs],
        "c": {str(n): format_rational(spec.expected_c(n))
              for n in range(3, 7) if spec.expected_c(n) is not None},
    }
    _emit(doc, args.out, cfg)
    return EXIT_OK


def _ideal_from_tag(tag: str, threads=1):
    """``n4``, ``n5c0``, ``n6c0`` or ``n6D22``-style tags."""
    t = tag.lower().strip()
    if not t.startswith("n") or len(t) < 2 or not t[1].isdigit():
        raise UsageError(f"bad ideal tag {tag!r}; use e.g. n4, n5c0, n6D22")
    n = int(t[1])
    rest = t[2:]
    c_zero = False
    D = None
    if rest.startswith("c0"):
        c_zero, rest = True, rest[2:]
    if rest.startswith("d"):
        D = int(rest[1:])
    elif rest:
        raise UsageError(f"bad ideal tag {tag!r}")
    rs = expand_hfe(n, _order_for(n, D), threads=threads)
    if c_zero:
        rs = specialize(rs, {"c": 0})
    return rs


def cmd_membership(args, cfg):
    rs = _ideal_from_tag(args.ideal, args.threads)
    target = parse_poly(args.target, rs.ctx)
    budget = Budget(max_pairs=args.max_pairs or _default_budget())
    cfg.max_pairs = budget.max_pairs
    order = MonomialOrder(rs.ctx, weights=rs.weights)
    t0 = time.perf_counter()
    member, gb = membership(target, rs.generators(), order, budget=budget, return_basis=True)
    doc = {
        "target": target.to_string(),
        "ideal": args.ideal,
        "n": rs.n,
        "D": rs.D,
        "member": member,
        "pairs_reduced": gb.stats["pairs_reduced"] if gb else 0,
        "basis_size": len(gb) if gb else 0,
        "wall_time": round(time.perf_counter() - t0, 3) if args.timing else None,
    }
    _emit(doc, args.out, cfg)
    return EXIT_OK if member else EXIT_FAIL


def _numeric_family(name, params, omega, omega_p):
    from . import wnum
    name = name.lower()
    if name == "tanh":
        return wnum.tanh_numeric()
    if name == "todd":
        return wnum.todd_numeric(*params)
    if name == "rational":
        return wnum.rational_numeric(*params)
    if name == "singkr":
        return wnum.singular_krichever_numeric(*params)
    if name == "sh":
        N, k = int(params[0]), int(params[1])
        eta = params[2] if len(params) > 2 else 1.0
        return wnum.elliptic_sh_numeric(N, k, eta)
    if name.startswith("level") and name[5:].isdigit():
        return wnum.level_numeric(wnum.Lattice(omega, omega_p), int(name[5:]))
    raise UsageError(f"unknown numeric family {name!r}")


def cmd_numcheck(args, cfg):
    from . import wnum
    params = [complex(p) for p in _parse_list(args.params)]
    fam = _numeric_family(args.family, params, complex(args.omega), complex(args.omega_p))
    c = complex(args.c) if args.c is not None else fam.expected_c(args.n)
    if c is None:
        raise UsageError(f"no known c for {args.family} at n={args.n}; pass --c")
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    cfg.tolerance = tol
    pts = wnum.sample_tuples(args.n, args.samples, args.seed)
    rep = wnum.hfe_residual_numeric(fam, args.n, pts, c)
    doc = {
        "family": args.family,
        "n": args.n,
        "samples": rep.samples,
        "skipped": rep.skipped,
        "max_residual": rep.max_residual,
        "tolerance": tol,
        "seed": args.seed,
        "c": [c.real, c.imag],
        "status": "PASS" if rep.samples and rep.max_residual < tol else "FAIL",
    }
    out = args.out
    if out is None and args.out_dir:
        out = str(Path(args.out_dir) / "reports" / f"{args.family}_{args.n}.report")
    _emit(doc, out, cfg)
    return EXIT_OK if doc["status"] == "PASS" else EXIT_FAIL


def cmd_atlas(args, cfg):
    root = Path(args.out_dir) / "atlas"
    written = []
    for item in _parse_list(args.jobs):
        n, _, d = item.partition(":")
        n = int(n)
        D = _order_for(n, int(d) if d else None)
        t0 = time.perf_counter()
        rs = expand_hfe(n, D, threads=args.threads)
        wall = round(time.perf_counter() - t0, 3) if args.timing else None
        sub = JobConfig("atlas", n=n, order=D, threads=args.threads)
        path = root / f"n{n}_D{D}.relations"
        _emit(to_document(rs, wall_time=wall), str(path), sub)
        written.append(str(path))
    print("\n".join(written))
    return EXIT_OK


# ------------------------------------------------------------------ parser
def build_parser():
    p = argparse.ArgumentParser(prog="hirzebruch", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--out", help="write the document here instead of stdout")
        sp.add_argument("--threads", type=int, default=1, help="worker cap")
        sp.add_argument("--timing", action="store_true",
                        help="record wall time (documents then differ between runs)")

    e = sub.add_parser("expand", help="derive the relation set for n at z-degree D")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--order", type=int, help="post-clearing z-degree D")
    e.add_argument("--method", choices=("alternant", "full"), default="alternant")
    e.add_argument("--no-translation", action="store_true", help="keep z_n free")
    e.add_argument("--c-zero", action="store_true", help="specialize c = 0")
    common(e)

    v = sub.add_parser("verify", help="substitute a family into the relation set")
    v.add_argument("--family", required=True)
    v.add_argument("--params", default="")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--order", type=int)
    v.add_argument("--out-dir")
    common(v)

    o = sub.add_parser("ode", help="series solution of the third-order equation")
    o.add_argument("--q", required=True, help="q1,q2,q3,q4")
    o.add_argument("--terms", type=int, default=10)
    common(o)

    f = sub.add_parser("family", help="series and q-values of a family")
    f.add_argument("--family", required=True)
    f.add_argument("--params", default="")
    f.add_argument("--terms", type=int, default=10)
    common(f)

    m = sub.add_parser("membership", help="ideal membership test")
    m.add_argument("--target", required=True)
    m.add_argument("--ideal", required=True, help="n4, n5c0, n6c0, n6D22, ...")
    m.add_argument("--max-pairs", type=int)
    common(m)

    nc = sub.add_parser("numcheck", help="Monte-Carlo residual of the functional equation")
    nc.add_argument("--family", required=True, help="tanh, todd, rational, singkr, sh, level2..level6")
    nc.add_argument("--params", default="")
    nc.add_argument("--n", type=int, required=True)
    nc.add_argument("--samples", type=int, default=100)
    nc.add_argument("--seed", type=int, default=0)
    nc.add_argument("--tol", type=float)
    nc.add_argument("--c", help="override the expected c (complex literal)")
    nc.add_argument("--omega", default="1")
    nc.add_argument("--omega-p", default="0.3+1.2j")
    nc.add_argument("--out-dir")
    common(nc)

    a = sub.add_parser("atlas", help="write atlas/n{n}_D{D}.relations documents")
    a.add_argument("--jobs", default="3,4,5,6", help="comma list of n or n:D")
    a.add_argument("--out-dir", default=".")
    common(a)
    return p


HANDLERS = {
    "expand": cmd_expand,
    "verify": cmd_verify,
    "ode": cmd_ode,
    "family": cmd_family,
    "membership": cmd_membership,
    "numcheck": cmd_numcheck,
    "atlas": cmd_atlas,
}


def _config(args) -> JobConfig:
    known = {"subcommand", "n", "order", "terms", "family", "seed", "samples", "threads", "out"}
    cfg = JobConfig(args.subcommand)
    extra = {}
    for k, v in sorted(vars(args).items()):
        if k in known:
            setattr(cfg, k, v)
        elif k == "params":
            cfg.params = _parse_list(v)
        elif k == "tol":
            cfg.tolerance = v
        elif k == "max_pairs":
            cfg.max_pairs = v
        elif k not in ("verbose", "timing"):
            extra[k] = v
    cfg.extra = extra
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = _config(args)
    try:
        return HANDLERS[args.subcommand](args, cfg)
    except InsufficientOrderError as exc:
        print(f"insufficient order: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, FamilyError, ValueError, KeyError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded after {exc.pairs_reduced} S-pair reductions: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
