"""Command line front end.

Every verb reads a presentation file, runs one composition of library
operations and prints a JSON report.  Exit status is 0 when every check
passes, 1 when a check fails and 2 on usage or parse errors.

Truncation bounds have no defaults: verbs that slice a complex require
``--window`` and at least one of ``--max-polydeg`` / ``--max-weight``.
Reports are written with sorted keys and no whitespace so that identical
inputs give identical bytes; set ``DSHIFT_PRETTY=1`` to indent them.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import re
import sys
from fractions import Fraction
from pathlib import Path

from .cohom import SliceSpec, cohomology
from .cotangent import check_connectivity, cotangent_complex, is_finitely_presented_criterion
from .darboux import darboux_pipeline, symmetric_complex
from .derham import DeRham
from .dgmod import dual, parse_module, tor_amplitude
from .gca import PresentationError, check_presentation, localize
from .shifted import TwistData, shifted_cotangent, sym_twisted, verify_symplectic
from .textio import ParseError, format_poly, format_presentation, parse_form, parse_poly, parse_presentation
from .witt import surgery_to_lagrangian

SCHEMA = "dshift.report/1"
PRETTY_ENV = "DSHIFT_PRETTY"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# input helpers


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _presentation(path: str):
    A = parse_presentation(_read(path), name=Path(path).stem)
    rep = check_presentation(A)
    if not rep.ok:
        raise PresentationError("invalid presentation: " + "; ".join(rep.violations))
    return A


def _window(text: str) -> tuple:
    m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"window must look like I..J, got {text!r}")
    lo, hi = int(m[1]), int(m[2])
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty window {text}")
    return lo, hi


def _spec(args) -> SliceSpec:
    if args.max_polydeg is None and args.max_weight is None:
        raise UsageError("truncation needs --max-polydeg or --max-weight")
    return SliceSpec(args.window, max_polydeg=args.max_polydeg, max_weight=args.max_weight)


def parse_witness(text: str) -> list:
    """Generator names spanning a Lagrangian sub-triangle.

    Grammar: ``witness over NAME { basis z; basis w; homotopy { } }``.  The
    homotopy block is accepted for coordinate witnesses only and must be
    empty.
    """
    m = re.match(r"\s*witness\s+over\s+(\S+)\s*\{(.*)\}\s*$", text, re.S)
    if not m:
        raise ParseError("expected 'witness over NAME { ... }'", 1, 1)
    body = m.group(2)
    h = re.search(r"homotopy\s*\{([^}]*)\}", body)
    if h:
        if h.group(1).strip():
            raise ParseError("only coordinate witnesses are supported: homotopy must be empty")
        body = body[:h.start()] + body[h.end():]
    names = []
    for st in (s.strip() for s in body.split(";")):
        if not st:
            continue
        b = re.fullmatch(r"basis\s+([A-Za-z_][\w']*)(?:\s*:\s*-?\d+)?", st)
        if not b:
            raise ParseError(f"unknown witness statement {st!r}")
        names.append(b[1])
    return names


def _assignments(text: str, ring) -> dict:
    """``NAME = EXPR; ...`` into a dict of polys."""
    out = {}
    for st in (s.strip() for s in text.split(";")):
        if not st:
            continue
        name, sep, expr = st.partition("=")
        if not sep:
            raise ParseError(f"expected NAME = EXPR, got {st!r}")
        out[name.strip()] = parse_poly(expr, ring)
    return out


# ---------------------------------------------------------------------------
# verbs; each returns (ok, payload)


def cmd_check(args):
    A = parse_presentation(_read(args.file), name=Path(args.file).stem)
    rep = check_presentation(A)
    fp = is_finitely_presented_criterion(A) if rep.ok else None
    return rep.ok, {"presentation": rep.to_dict(), "canonical": format_presentation(A),
                    "finitely_presented": fp.to_dict() if fp else None}


def cmd_cotangent(args):
    A = _presentation(args.file)
    L = cotangent_complex(A).module
    out = {"basis": [[b.name, b.degree] for b in L.basis],
           "differential": {L.basis[i].name: {L.basis[j].name: format_poly(v) for j, v in row.items()}
                            for i, row in enumerate(L.diff) if row}}
    ok = True
    if args.over:
        if args.d is None:
            raise UsageError("--over needs --d")
        B = _presentation(args.over)
        rep = check_connectivity(B, A, args.d, _spec(args))
        out["connectivity"] = rep.to_dict()
        ok = rep.agree and rep.moreover is not False
    return ok, out


def cmd_cohomology(args):
    A = _presentation(args.file)
    X = parse_module(_read(args.module), A) if args.module else A
    rep = cohomology(X, _spec(args), reps=True)
    slices = []
    for s in rep.slices:
        if not s.dim:
            continue
        out = s.to_dict()
        if args.module:
            # module elements are {basis index: coefficient}
            out["representatives"] = [{X.basis[i].name: format_poly(v) for i, v in sorted(r.items())}
                                      for r in s.representatives]
        slices.append(out)
    return True, {"exact": rep.exact, "slices": slices}


def cmd_derham(args):
    A = _presentation(args.file)
    dr = DeRham(A)
    w = parse_form(args.form, dr.ring)
    comps = dr.components(w)
    clipped = any(k > args.max_wedge for k, v in comps.items() if v.terms)
    out = {"components": {str(k): format_poly(v) for k, v in sorted(comps.items()) if v.terms},
           "d": format_poly(dr.d(w)), "D": format_poly(dr.D(w)), "total": format_poly(dr.total(w)),
           "closed": not dr.total(w).terms, "clipped": clipped}
    return not clipped, out


def _cotangent_payload(T):
    fmt = format_poly
    return {"presentation": format_presentation(T.algebra), "liouville": fmt(T.liouville),
            "omega": fmt(T.omega)}


def cmd_shifted_cotangent(args):
    B = _presentation(args.file)
    T = shifted_cotangent(B, args.d, args.twist_potential)
    rep = verify_symplectic(T.algebra, T.omega, args.d, dr=T.derham)
    return rep.ok, {**_cotangent_payload(T), "verification": rep.to_dict()}


def cmd_twist(args):
    B = _presentation(args.file)
    M = parse_module(_read(args.module), B)
    xi = _assignments(args.xi, B.ring) if args.xi else {}
    t = TwistData(B, M, xi)
    rep = t.check()
    if not rep.ok:
        return False, {"twist": rep.to_dict()}
    A = sym_twisted(t, name=f"Sym({B.name})")
    ok = check_presentation(A)
    return ok.ok, {"twist": rep.to_dict(), "presentation": format_presentation(A),
                   "check": ok.to_dict()}


def _form_input(A, args):
    dr = DeRham(A)
    text = _read(args.omega[1:]) if args.omega.startswith("@") else args.omega
    return dr, parse_form(text.strip(), dr.ring)


def cmd_verify_symplectic(args):
    A = _presentation(args.file)
    dr, w = _form_input(A, args)
    rep = verify_symplectic(A, w, args.d, _spec(args), dr=dr)
    return rep.ok, rep.to_dict()


def cmd_surgery(args):
    A = _presentation(args.file)
    dr, w = _form_input(A, args)
    names = parse_witness(_read(args.witness))
    sym = symmetric_complex(A, w, args.d, dr)
    lag = surgery_to_lagrangian(sym, [f"d({n})" for n in names], _spec(args))
    return lag.report.ok, {"lagrangian": lag.names, "swaps": [list(s) for s in lag.swaps],
                           "report": lag.report.to_dict()}


def cmd_tor_amplitude(args):
    A = _presentation(args.file)
    M = parse_module(_read(args.module), A)
    rng = random.Random(args.seed)
    t = tor_amplitude(M, rng)
    td = tor_amplitude(dual(M), random.Random(args.seed))
    if t.interval is None:
        ok = td.interval is None
    else:
        ok = td.interval == (-t.interval[1], -t.interval[0])
    return ok, {"module": t.to_dict(), "dual": td.to_dict(), "duality_holds": ok}


def cmd_darboux(args):
    A = _presentation(args.file)
    dr, w = _form_input(A, args)
    comps = dr.components(w)
    if any(k > args.max_wedge for k, v in comps.items() if v.terms):
        raise UsageError(f"omega has components above --max-wedge {args.max_wedge}")
    names = parse_witness(_read(args.witness))
    res = darboux_pipeline(A, w, args.d, names, _spec(args), max_polydeg=args.max_polydeg)
    return res.report.ok, res.to_dict()


def cmd_localize(args):
    A = _presentation(args.file)
    f = parse_poly(args.element, A.ring)
    Af = localize(A, f)
    return True, {"presentation": format_presentation(Af)}


# ---------------------------------------------------------------------------
# argument parsing


def _truncation(p, window=True):
    p.add_argument("--window", type=_window, required=window, metavar="I..J",
                   help="cohomological degrees to slice")
    p.add_argument("--max-polydeg", type=int, help="polynomial degree bound")
    p.add_argument("--max-weight", type=int, help="weight bound")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dshift", description=__doc__.split("\n")[0])
    ap.add_argument("--output", "-o", help="write the report here instead of stdout")
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("check", help="validate a presentation")
    p.add_argument("file")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("cotangent", help="cotangent complex; connectivity with --over")
    p.add_argument("file")
    p.add_argument("--over", help="prefix presentation B for the relative criterion")
    p.add_argument("--d", type=int)
    _truncation(p, window=False)
    p.set_defaults(run=cmd_cotangent)

    p = sub.add_parser("cohomology", help="truncated cohomology of an algebra or module")
    p.add_argument("file")
    p.add_argument("--module")
    _truncation(p)
    p.set_defaults(run=cmd_cohomology)

    p = sub.add_parser("derham", help="apply d, D and d + D to a form")
    p.add_argument("file")
    p.add_argument("--form", required=True)
    p.add_argument("--max-wedge", type=int, required=True)
    p.set_defaults(run=cmd_derham)

    p = sub.add_parser("shifted-cotangent", help="build and verify T*[d]")
    p.add_argument("file")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--twist-potential")
    p.set_defaults(run=cmd_shifted_cotangent)

    p = sub.add_parser("twist", help="Sym of a module twisted by a cocycle")
    p.add_argument("file")
    p.add_argument("--module", required=True)
    p.add_argument("--xi", help="NAME = EXPR; ... images of basis elements")
    p.set_defaults(run=cmd_twist)

    for verb, fn, helptext in (("verify-symplectic", cmd_verify_symplectic, "check a 2-form"),
                               ("surgery", cmd_surgery, "push a Lagrangian into the window"),
                               ("darboux", cmd_darboux, "compute the Darboux normal form")):
        p = sub.add_parser(verb, help=helptext)
        p.add_argument("file")
        p.add_argument("--omega", required=True, help="form expression, or @FILE")
        p.add_argument("--d", type=int, required=True)
        if verb != "verify-symplectic":
            p.add_argument("--witness", required=True)
        if verb == "darboux":
            p.add_argument("--max-wedge", type=int, required=True)
        _truncation(p)
        p.set_defaults(run=fn)

    p = sub.add_parser("tor-amplitude", help="Tor amplitude of a module and of its dual")
    p.add_argument("file")
    p.add_argument("--module", required=True)
    p.add_argument("--seed", type=int, required=True, help="seed for probe points")
    p.set_defaults(run=cmd_tor_amplitude)

    p = sub.add_parser("localize", help="Zariski open embedding inverting an element")
    p.add_argument("file")
    p.add_argument("--element", required=True)
    p.set_defaults(run=cmd_localize)
    return ap


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (set, frozenset)):
        return sorted(o, key=str)
    return str(o)


def dumps(report: dict) -> str:
    pretty = os.environ.get(PRETTY_ENV, "") not in ("", "0")
    if pretty:
        return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False, default=_default)
    return json.dumps(report, sort_keys=True, separators=(",", ":"), ensure_ascii=False,
                      default=_default)


def main(argv=None) -> int:
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # windows such as -2..1 look like options to argparse
    for i in range(len(argv) - 1):
        if argv[i] == "--window":
            argv[i:i + 2] = [f"--window={argv[i + 1]}", ""]
    argv = [a for a in argv if a != ""]
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    report = {"schema": SCHEMA, "verb": args.verb}
    try:
        ok, payload = args.run(args)
        report.update(ok=ok, result=payload)
        code = 0 if ok else 1
    except ParseError as e:
        report.update(ok=False, error={"kind": "parse", "message": str(e),
                                       "line": e.line, "column": e.col})
        code = 2
    except PresentationError as e:
        report.update(ok=False, error={"kind": "check", "message": str(e)})
        code = 1
    except (UsageError, ValueError) as e:
        report.update(ok=False, error={"kind": "usage", "message": str(e)})
        code = 2
    text = dumps(report) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
