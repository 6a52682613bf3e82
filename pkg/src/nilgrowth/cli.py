"""Command line driver: ``nilgrowth <subcommand> ...``.

Exit status is 0 on success, 1 when a checked property fails (a
counterexample is printed to stderr) and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence

from .exactnum import CoeffRing, format_fraction, parse_fraction


def _cell(key: str, value):
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, float):
        if key.endswith("_approx"):
            return value if math.isfinite(value) else format_fraction(value)
        if value == float("-inf"):
            return "-inf"
        raise ValueError(f"float value in exact column {key!r}")
    if isinstance(value, Fraction):
        return format_fraction(value)
    return value


def emit_table(rows: Sequence[Dict[str, object]], fmt: str = "csv", stream=None,
               params: Optional[Dict[str, object]] = None, columns: Optional[List[str]] = None) -> None:
    """Write rows as CSV (header row), NDJSON or one JSON document.

    Fractions become ``"num/den"``; floats are only accepted in columns
    whose name ends in ``_approx``.
    """
    stream = stream or sys.stdout
    cols = list(columns) if columns else (list(rows[0]) if rows else [])
    clean = [{k: _cell(k, r.get(k)) for k in cols} for r in rows]
    if fmt == "csv":
        if params:
            stream.write("# " + " ".join(f"{k}={v}" for k, v in params.items()) + "\n")
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        if cols:
            writer.writeheader()
        writer.writerows(clean)
        stream.write(buf.getvalue())
    elif fmt == "ndjson":
        if params:
            stream.write(json.dumps({"params": params}, sort_keys=True) + "\n")
        for r in clean:
            stream.write(json.dumps(r) + "\n")
    elif fmt == "json":
        doc = {"params": params or {}, "rows": clean}
        stream.write(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def _emit_doc(doc: Dict[str, object], stream) -> None:
    stream.write(json.dumps(doc, sort_keys=True, indent=1, default=_json_default) + "\n")


def _json_default(x):
    if isinstance(x, Fraction):
        return format_fraction(x)
    if isinstance(x, float):
        return format_fraction(x)
    raise TypeError(f"not serializable: {type(x).__name__}")


def _fail(message: str, counterexample) -> int:
    sys.stderr.write(f"FAILED: {message}\n")
    sys.stderr.write("counterexample: " + json.dumps(counterexample, sort_keys=True, default=_json_default) + "\n")
    return 1


# -- subcommands ------------------------------------------------------------

def cmd_content(args, out) -> int:
    from .content import content, content_rows
    if args.q is not None:
        out.write(format_fraction(content(args.q, args.b, args.beta)) + "\n")
        return 0
    rows = content_rows(range(args.n_max + 1), args.b, args.beta)
    emit_table(rows, args.format, out, {"cmd": "content", "b": args.b, "beta": args.beta, "n_max": args.n_max})
    return 0


def cmd_carry(args, out) -> int:
    from .baserep import carry_word, reed, render_word
    from .content import carry_content_identity
    w = carry_word(args.m, args.n, args.b)
    doc = {"b": args.b, "m": format_fraction(args.m), "n": format_fraction(args.n), "carries": render_word(w)}
    if args.beta is not None:
        lhs, rhs = carry_content_identity(args.m, args.n, args.b, args.beta)
        doc.update({"beta": args.beta, "reed": format_fraction(reed(w, args.beta)),
                    "lhs": format_fraction(lhs), "rhs": format_fraction(rhs)})
        if lhs != rhs:
            _emit_doc(doc, out)
            return _fail("carry identity", doc)
    _emit_doc(doc, out)
    return 0


def _audit_one(job):
    from .content import FractionTriple
    from .witness import witness_report
    b, d, D, dr, gr, k_max = job
    r = witness_report(FractionTriple(b, d, D), dr, gr, k_max)
    return {"b": b, "d": d, "D": D, "hypotheses_met": r.hypotheses_met, "passed": r.passed,
            "discreteness": r.discreteness.passed, "growth": r.growth.passed, "base": r.base.passed,
            "step_sufficient": r.step_sufficient.passed,
            "step_bound_route": r.step_sufficient.detail["bound_route"],
            "step_direct": None if r.step_direct is None else r.step_direct.passed}


def cmd_witness(args, out) -> int:
    from .content import FractionTriple, all_triples
    from .witness import witness_report
    k_max = None if args.k_max < 0 else args.k_max
    if args.audit:
        jobs = [(t.b, t.d, t.D, args.discreteness_range, args.growth_range, k_max)
                for t in all_triples(args.b_max) if args.all or t.hypotheses_met()]
        if args.jobs > 1:
            with ProcessPoolExecutor(args.jobs) as pool:
                rows = list(pool.map(_audit_one, jobs, chunksize=4))
        else:
            rows = [_audit_one(j) for j in jobs]
        emit_table(rows, args.format, out, {"cmd": "witness-audit", "b_max": args.b_max, "all": args.all,
                                            "discreteness_range": args.discreteness_range,
                                            "growth_range": args.growth_range, "k_max": args.k_max})
        bad = [r for r in rows if r["hypotheses_met"] and not r["passed"]]
        return _fail("witness audit", bad[0]) if bad else 0
    if args.b is None or args.d is None or args.D is None:
        raise SystemExit("witness needs --b, --d and --D (or --audit)")
    t = FractionTriple(args.b, args.d, args.D)
    rep = witness_report(t, args.discreteness_range, args.growth_range, k_max, args.n_budget)
    _emit_doc(rep.to_dict(), out)
    if not rep.passed:
        failed = next(v for v in rep.verdicts() if not v.passed)
        return _fail(f"{failed.name} property for {t}", failed.counterexamples[:1] or failed.detail)
    return 0


def _load_operator(args):
    from .recop import example_gallery, operator_from_config
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            return operator_from_config(json.load(fh))
    try:
        return example_gallery(args.gallery)
    except KeyError as exc:
        raise SystemExit(str(exc))


def _default_triple(T, b=None, d=None, D=None):
    from .content import FractionTriple
    p = T.ring.modulus
    if p is None or not T.ring.is_prime_field:
        return None
    d = d or T.order
    D = D or T.shape.empty_middle_D
    if b is None:
        b = p
        while b < d:
            b *= p
    try:
        return FractionTriple(b, d, D)
    except ValueError:
        return None


def cmd_nilpotence(args, out) -> int:
    from .witness import WitnessFn
    T = _load_operator(args)
    t = _default_triple(T, args.b, args.d, args.D)
    indices = T.nilpotence_indices(args.n_max)
    c = WitnessFn(t) if t else None
    rows = []
    bad = None
    for n, k in enumerate(indices):
        img = T.image_of_basis(n)
        row = {"n": n, "deg": img.degree, "N_T": k, "c_n": c(n) if c else None}
        rows.append(row)
        if args.check and c and k > c(n) and bad is None:
            bad = {"n": n, "N_T": k, "c_n": format_fraction(c(n))}
    params = {"cmd": "nilpotence", "operator": T.name, "ring": str(T.ring), "n_max": args.n_max}
    if t:
        params.update({"b": t.b, "d": t.d, "D": t.D})
    emit_table(rows, args.format, out, params, ["n", "deg", "N_T", "c_n"])
    return _fail("N_T(y^n) <= c(n)", bad) if bad else 0


def cmd_alpha_scan(args, out) -> int:
    from .recop import alpha_estimate
    from .witness import WitnessFn
    T = _load_operator(args)
    t = _default_triple(T, args.b, args.d, args.D)
    samples, running, alpha_hat = alpha_estimate(T, args.n_max)
    c = WitnessFn(t) if t else None
    rows = []
    for n, k in samples:
        cn = c(n) if c else None
        ratio = float(k / cn) if cn else None
        rows.append({"n": n, "NT": k, "c_n": cn, "NT_over_bound_approx": ratio,
                     "running_alpha_approx": running[n]})
    params = {"cmd": "alpha-scan", "operator": T.name, "n_max": args.n_max,
              "alpha_hat_approx": round(alpha_hat, 6)}
    emit_table(rows, args.format, out, params, ["n", "NT", "c_n", "NT_over_bound_approx", "running_alpha_approx"])
    return 0


def cmd_cofactor(args, out) -> int:
    from .recop import CompanionPoly, bivariate_str, empty_middle_cofactor, shape_info
    if args.companion:
        if args.modulus is None:
            raise SystemExit("--companion needs --modulus")
        P = CompanionPoly.parse(args.companion, CoeffRing.integers_mod(args.modulus))
    else:
        P = _load_operator(args).companion
    cf = empty_middle_cofactor(P)
    info = shape_info(cf.product)
    doc = {"P": P.to_str(), "ring": str(P.ring), "S": bivariate_str(cf.S), "e": cf.e, "q": cf.q, "m": cf.m,
           "product": cf.product.to_str(), "product_empty_middle_D": info.empty_middle_D}
    _emit_doc(doc, out)
    if info.empty_middle_D < 1:
        return _fail("product is not empty-middle", doc)
    return 0


def cmd_hecke_verify(args, out) -> int:
    from .hecke import hecke_recursion_operator, oracle_images, verify_hecke_recursion
    op = hecke_recursion_operator(args.p, args.ell, args.variant)
    T = op.as_recursion
    v = verify_hecke_recursion(args.p, args.ell, args.n_max, T.companion, op.modified)
    oracle = oracle_images(args.p, args.ell, args.n_max, modified=op.modified)
    mismatch = [n for n in range(args.n_max + 1) if oracle[n] != T.image_of_basis(n)]
    doc = {"p": args.p, "ell": args.ell, "variant": args.variant, "modified": op.modified,
           "companion": T.companion.to_str(), "order": T.order, "n_max": args.n_max,
           "recursion_failures": v.failures, "first_valid_n": v.first_valid_n,
           "operator_vs_oracle_mismatches": mismatch}
    _emit_doc(doc, out)
    if v.failures or mismatch:
        n = (v.failures or mismatch)[0]
        return _fail("Hecke recursion", {"n": n, "oracle": oracle[n].to_str(), "recursion": T.image_of_basis(n).to_str()})
    return 0


def cmd_hecke_scan(args, out) -> int:
    from .hecke import hilbert_samuel_summary, joint_nilpotence
    table = joint_nilpotence(args.p, args.n_max)
    rows = [dict(r, meets_k=(r["N"] >= args.k) if args.k is not None else None) for r in table]
    emit_table(rows, args.format, out, {"cmd": "hecke-scan", "p": args.p, "n_max": args.n_max, "k": args.k},
               ["n", "N_T", "N_S", "N", "meets_k"])
    if args.summary:
        summary = hilbert_samuel_summary(args.p, args.n_max)
        summary = {k: v for k, v in summary.items() if not k.startswith("diagnostic")} | {
            "diagnostic": {"slope_ge_approx": summary["diagnostic_slope_ge"],
                           "slope_lt_approx": summary["diagnostic_slope_lt"]}}
        with open(args.summary, "w", encoding="utf-8") as fh:
            _emit_doc(summary, fh)
    return 0


def cmd_gallery(args, out) -> int:
    from .recop import GALLERY_NAMES, operator_config
    if not args.name:
        for name in GALLERY_NAMES:
            out.write(name + "\n")
        return 0
    args.gallery = args.name
    T = _load_operator(args)
    doc = operator_config(T)
    doc["shape"] = {"filtered": T.shape.filtered, "yd_coeff": str(T.shape.yd_coeff),
                    "empty_middle_D": T.shape.empty_middle_D, "degree_lowering": T.degree_lowering}
    _emit_doc(doc, out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nilgrowth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(p, fmt="csv"):
        p.add_argument("--format", choices=("csv", "ndjson", "json"), default=fmt)
        p.add_argument("--output", help="write to this path instead of stdout")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)

    def operator_args(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--gallery", default="fib-q")
        g.add_argument("--config", help="JSON operator definition")
        p.add_argument("--b", type=int)
        p.add_argument("--d", type=int)
        p.add_argument("--D", type=int)

    p = sub.add_parser("content", help="(b, beta)-content of a rational or a table")
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--beta", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--q", type=parse_fraction)
    g.add_argument("--n-max", type=int)
    common(p)
    p.set_defaults(func=cmd_content)

    p = sub.add_parser("carry", help="carry word of m + n base b")
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--m", type=parse_fraction, required=True)
    p.add_argument("--n", type=parse_fraction, required=True)
    p.add_argument("--beta", type=int)
    common(p, "json")
    p.set_defaults(func=cmd_carry)

    p = sub.add_parser("witness", help="witness report for (b, d, D) or an audit")
    p.add_argument("--b", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--D", type=int)
    p.add_argument("--discreteness-range", type=int, default=1000)
    p.add_argument("--growth-range", type=int, default=10_000)
    p.add_argument("--k-max", type=int, default=1, help="direct step check depth (-1 to skip)")
    p.add_argument("--n-budget", type=int)
    p.add_argument("--audit", action="store_true")
    p.add_argument("--b-max", type=int, default=16)
    p.add_argument("--all", action="store_true", help="audit triples outside the hypotheses too")
    common(p, "json")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("nilpotence", help="N_T(y^n) table")
    operator_args(p)
    p.add_argument("--n-max", type=int, default=100)
    p.add_argument("--check", action="store_true", help="require N_T(y^n) <= c(n)")
    common(p)
    p.set_defaults(func=cmd_nilpotence)

    p = sub.add_parser("alpha-scan", help="growth exponent scan")
    operator_args(p)
    p.add_argument("--n-max", type=int, default=500)
    common(p)
    p.set_defaults(func=cmd_alpha_scan)

    p = sub.add_parser("cofactor", help="empty-middle cofactor")
    operator_args(p)
    p.add_argument("--companion", help="polynomial in X and y, e.g. 'X^2 + X*y + y^2'")
    p.add_argument("--modulus", type=int)
    common(p, "json")
    p.set_defaults(func=cmd_cofactor)

    p = sub.add_parser("hecke-verify", help="recursion vs q-expansion oracle")
    p.add_argument("--p", type=int, required=True, choices=(2, 3))
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--variant", default="", choices=("", "prime", "order8"))
    p.add_argument("--n-max", type=int, default=200)
    common(p, "json")
    p.set_defaults(func=cmd_hecke_verify)

    p = sub.add_parser("hecke-scan", help="joint nilpotence table")
    p.add_argument("--p", type=int, required=True, choices=(2, 3))
    p.add_argument("--n-max", type=int, default=1000)
    p.add_argument("--k", type=int)
    p.add_argument("--summary", help="path for the JSON count summary")
    common(p)
    p.set_defaults(func=cmd_hecke_scan)

    p = sub.add_parser("gallery", help="list or describe gallery operators")
    p.add_argument("name", nargs="?")
    common(p, "json")
    p.set_defaults(func=cmd_gallery)
    return parser


def main(argv: Optional[Iterable[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(None if argv is None else list(argv))
    if args.cmd == "hecke-verify" and (args.p, args.ell) not in {(2, 3), (2, 5), (3, 2), (3, 7)}:
        parser.error(f"unsupported pair (p, ell) = ({args.p}, {args.ell})")
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                return args.func(args, fh)
        return args.func(args, sys.stdout)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            parser.error(exc.code)
        raise
    except (ValueError, KeyError) as exc:
        parser.error(str(exc))
    except OSError as exc:
        sys.stderr.write(f"I/O error on {exc.filename}: {exc.strerror}\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
