"""Command line: ``bldgzeta {poincare,cone,zeta,lefschetz,thin,cusp} ...``.

Exit codes: 0 success, 1 invalid input (JSON error object on stdout),
2 internal invariant violation (error object on stdout, reproduction data on
stderr). Output JSON has sorted keys and exact rational strings.
"""

import argparse
import json
import os
import sys
import traceback
from importlib import resources

from . import _kernels
from .errors import BldgZetaError, InvariantViolation, MalformedDocument, UsageError
from .poly import format_fraction, series_expand


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, usage=self.format_usage().strip())


def _nonneg(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a value >= 0, got {v}")
    return v


def _positive(text):
    v = _nonneg(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a value >= 1, got {v}")
    return v


def build_parser():
    p = _Parser(prog="bldgzeta", description="Exact zeta functions for finite quotients of affine buildings.")
    p.add_argument("--format", choices=("json", "table"), default="json")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("poincare", help="Poincare series of a Coxeter system")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--type", dest="type_tag", help="type tag such as A~1, A~2, C~2, G~2, A2")
    g.add_argument("--matrix", help='Coxeter matrix as JSON ({"m": [[...]]} or [[...]]) or a file')
    s.add_argument("--degree", type=_nonneg, default=10)
    s.add_argument("--rational", action="store_true", help="closed rational form")
    s.add_argument("--subset", help="comma-separated generator labels I")
    s.add_argument("--cosets", action="store_true", help="sum over minimal coset representatives")
    s.add_argument("--alternating", action="store_true",
                   help="check that the alternating sum over all I vanishes")

    s = sub.add_parser("cone", help="lattice points of a sharp rational cone")
    s.add_argument("--alphas", required=True, help='functionals as rows, e.g. "1 0; 1 2"')
    s.add_argument("--lattice", help="lattice basis rows (default: standard)")
    s.add_argument("--verify-radius", type=_nonneg, default=0)

    s = sub.add_parser("zeta", help="zeta function of a finite quotient")
    s.add_argument("kind", choices=("graph", "thin"))
    s.add_argument("path", help="JSON document, or - for stdin")
    s.add_argument("--series", type=_nonneg, default=10, help="truncation degree")

    s = sub.add_parser("lefschetz", help="spectral traces against geodesic counts")
    s.add_argument("path")
    s.add_argument("--depth", type=_nonneg, default=5)
    s.add_argument("--allow-tails", action="store_true", help="negative control")
    s.add_argument("--s-probe", action="store_true", help="compare both S(u) normalizations")

    s = sub.add_parser("thin", help="translation operators of a thin quotient")
    s.add_argument("path")
    s.add_argument("--k", default=None, help="position, e.g. 1,1")
    s.add_argument("--product-law", type=_nonneg, default=None, metavar="MAX",
                   help="check T_k T_l = T_{k+l} for entries up to MAX")
    s.add_argument("--triplets", action="store_true", help="export the operator")

    s = sub.add_parser("cusp", help="truncated traces of a cuspidal quotient")
    s.add_argument("path")
    s.add_argument("--coeffs", type=_positive, default=20)
    s.add_argument("--pade", type=_nonneg, nargs=2, metavar=("P", "Q"))
    return p


# ----------------------------------------------------------------------------
# input helpers

def _read_document(path):
    if path == "-":
        text = sys.stdin.read()
    elif os.path.exists(path):
        with open(path) as fh:
            text = fh.read()
    else:
        # fall back to the bundled sample documents
        try:
            text = resources.files("bldgzeta").joinpath("data", os.path.basename(path)).read_text()
        except (FileNotFoundError, OSError):
            raise MalformedDocument(f"no such file: {path}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON in {path}: {exc}") from None


def _parse_rows(text, what):
    try:
        rows = [[int(x) if "/" not in x else x for x in r.replace(",", " ").split()]
                for r in text.split(";") if r.strip()]
    except ValueError:
        raise UsageError(f"{what} must be rows of numbers separated by ';'") from None
    from fractions import Fraction

    return [[Fraction(x) for x in r] for r in rows]


def _enc(v):
    from fractions import Fraction

    f = Fraction(v)
    return int(f) if f.denominator == 1 else format_fraction(f)


def _coeff_list(poly, n):
    return [format_fraction(c) for c in poly.coeffs(n + 1)]


# ----------------------------------------------------------------------------
# commands

def cmd_poincare(args):
    from .coxeter import (alternating_coset_sum, build_system, poincare_rational,
                          poincare_truncated, series_is_zero)

    if args.type_tag:
        system = build_system(args.type_tag)
    else:
        doc = _read_document(args.matrix) if not args.matrix.lstrip().startswith(("{", "[")) \
            else json.loads(args.matrix)
        m = doc["m"] if isinstance(doc, dict) else doc
        system = build_system(matrix=m)
    n = args.degree
    if args.rational:
        f = poincare_rational(system)
        out = f.to_json()
        out["series"] = _coeff_list(series_expand(f, n), n)
        return out
    subset = [s.strip() for s in args.subset.split(",")] if args.subset else None
    poly = poincare_truncated(system, n, subset, cosets=args.cosets)
    out = {"type": system.type_tag, "labels": list(system.labels), "degree": n,
           "coefficients": _coeff_list(poly, n)}
    if subset is not None:
        out["subset"] = subset
        out["cosets"] = args.cosets
    if args.alternating:
        out["alternating_sum_vanishes"] = series_is_zero(alternating_coset_sum(system, n))
    return out


def cmd_cone(args):
    from .cones import RationalLattice, SharpCone, decompose, verify_bijection

    alphas = _parse_rows(args.alphas, "--alphas")
    basis = _parse_rows(args.lattice, "--lattice") if args.lattice else None
    lat = RationalLattice(basis) if basis else RationalLattice.standard(len(alphas))
    dec = decompose(lat, SharpCone(alphas))
    out = dec.to_json()
    out["verified"] = None
    if args.verify_radius:
        rep = verify_bijection(dec, args.verify_radius)
        out["verified"] = rep.ok
        out["report"] = rep.to_json()
    return out


def _load_quotient(kind, path):
    from .complex import load_quotient_graph, load_thin_quotient

    doc = _read_document(path)
    return load_quotient_graph(doc) if kind == "graph" else load_thin_quotient(doc)


def cmd_zeta(args):
    from .zeta import direct_trace_series, zeta_closed_form_details

    q = _load_quotient(args.kind, args.path)
    n = args.series
    closed = zeta_closed_form_details(q)
    direct = direct_trace_series(q, n)
    expanded = series_expand(closed.function, n)
    if args.kind == "graph":
        series = {str(k): format_fraction(direct.coeff((k,))) for k in range(1, n + 1)}
    else:
        series = {key: val for key, val in direct.to_json().items()}
    return {"kind": args.kind, "degree": n, "series": series,
            "closed_form": closed.to_json(), "closed_form_matches_series": expanded == direct}


def cmd_lefschetz(args):
    from .complex import load_quotient_graph
    from .zeta import lefschetz_check, s_function_probe

    g = load_quotient_graph(_read_document(args.path))
    out = lefschetz_check(g, args.depth, allow_tails=args.allow_tails)
    if args.s_probe:
        out["s_probe"] = s_function_probe(g, args.depth)
    return out


def cmd_thin(args):
    from .complex import (load_thin_quotient, thin_translation_operator, valid_positions,
                          verify_product_law)

    t = load_thin_quotient(_read_document(args.path))
    out = t.to_json()
    out["position_lattice"] = [[_enc(x) for x in row] for row in t.position_lattice()]
    if args.k is not None:
        try:
            k = tuple(int(x) for x in args.k.replace(" ", "").split(","))
        except ValueError:
            raise UsageError("--k must be comma-separated integers") from None
        op = thin_translation_operator(t, k)
        out["k"] = list(k)
        out["trace"] = op.trace()
        out["permutation"] = op.is_permutation()
        if args.triplets:
            out["operator"] = op.to_triplets()
    if args.product_law is not None:
        ks = valid_positions(t, args.product_law)
        out["product_law"] = verify_product_law(lambda k: thin_translation_operator(t, k), ks)
    return out


def cmd_cusp(args):
    from .cusp import build_cuspidal, growth_report, pade_fit, pade_search, stationarity_report, zeta_series

    cq = build_cuspidal(_read_document(args.path))
    coeffs = zeta_series(cq, args.coeffs)
    full = [0] + coeffs
    if args.pade:
        fit = pade_fit(full, *args.pade)
    else:
        fit = pade_search(full)
    return {"coeffs": coeffs, "fit": None if fit is None else fit.to_json(),
            "clean": bool(fit is not None and fit.clean),
            "stationary": stationarity_report(cq, min(args.coeffs, 10))["ok"],
            "growth": growth_report(coeffs, cq.max_q())}


COMMANDS = {"poincare": cmd_poincare, "cone": cmd_cone, "zeta": cmd_zeta,
            "lefschetz": cmd_lefschetz, "thin": cmd_thin, "cusp": cmd_cusp}


# ----------------------------------------------------------------------------
# output

def _table(result):
    lines = []
    series = result.get("series") or result.get("coefficients") or result.get("coeffs")
    if isinstance(series, dict):
        for k, v in series.items():
            lines.append(f"{k:>10}  {v}")
    elif isinstance(series, list):
        for k, v in enumerate(series, start=0 if "coefficients" in result else 1):
            lines.append(f"{k:>10}  {v}")
    for row in result.get("rows", []):
        lines.append("  ".join(f"{key}={row[key]}" for key in sorted(row)))
    if not lines:
        return json.dumps(result, sort_keys=True, indent=1)
    return "\n".join(lines)


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        _kernels.set_threads()
        args = build_parser().parse_args(argv)
        result = COMMANDS[args.command](args)
    except InvariantViolation as exc:
        print(json.dumps(exc.to_dict(), sort_keys=True, default=str), file=stdout)
        print(json.dumps({"argv": argv, "traceback": traceback.format_exc()}, sort_keys=True),
              file=stderr)
        return 2
    except BldgZetaError as exc:
        print(json.dumps(exc.to_dict(), sort_keys=True, default=str), file=stdout)
        return 1
    except Exception as exc:  # any other failure is a bug
        err = {"error": "InternalError", "message": str(exc), "details": {"type": type(exc).__name__}}
        print(json.dumps(err, sort_keys=True), file=stdout)
        print(json.dumps({"argv": argv, "traceback": traceback.format_exc()}, sort_keys=True),
              file=stderr)
        return 2
    if args.format == "table":
        print(_table(result), file=stdout)
    else:
        print(json.dumps(result, sort_keys=True), file=stdout)
    return 0


def main(argv=None):
    return run(argv)
