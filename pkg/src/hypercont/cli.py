"""Command-line interface: ``hypercont {eval,expansion,constant,partial-sum,verify}``.

Output is one JSON object by default (``--output csv`` or ``text`` for the
alternatives).  Exit codes: 0 success, 1 numeric or domain error, 2 usage
error, 3 verification failure.
"""

import argparse
import csv
import io
import json
import math
import re
import shlex
import sys

import numpy as np

from . import continuation as ct
from . import gamma as gm
from . import partial_sums as ps
from . import verify as vf
from .errors import DomainError, HypercontError, ParseError
from .series import DEFAULT_MAX_TERMS, DEFAULT_TOL, ParameterSet

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2, 3

METHOD_CHOICES = ("auto", "direct", "continuation", "zero-balanced")
REP_CHOICES = ct.B_REPRESENTATIONS + ("all",)


class UsageError(Exception):
    def __init__(self, message, flag=None, position=None):
        super().__init__(message)
        self.flag = flag
        self.position = position


# ---------------------------------------------------------------------------
# parsing


def parse_list(text, flag):
    """Comma-separated reals.  ParseError carries the 1-based token index."""
    if text is None or not text.strip():
        raise ParseError(f"{flag}: empty parameter list", 1)
    out = []
    for i, tok in enumerate(text.split(","), start=1):
        try:
            v = float(tok)
        except ValueError:
            raise ParseError(f"{flag}: token {i} ({tok.strip()!r}) is not a number", i) from None
        if not math.isfinite(v):
            raise ParseError(f"{flag}: token {i} is not finite", i)
        out.append(v)
    return out


def build_parameters(a_text, b_text):
    a = parse_list(a_text, "--a")
    b = parse_list(b_text, "--b")
    for i, y in enumerate(b, start=1):
        if gm.is_pole(y):
            raise ParseError(f"--b: b_{i}={y!r} is a nonpositive integer", i)
    if len(a) != len(b) + 1:
        p = len(a) - 1
        pos = min(len(a), len(b)) + 1
        raise ParseError(
            f"length mismatch: {len(a)} numerator parameters need p={p} "
            f"denominators, got {len(b)}", pos)
    try:
        return ParameterSet(a, b)
    except DomainError as exc:
        raise ParseError(str(exc), None) from None


def parse_parameters(spec):
    """ParameterSet from a string such as ``"--a 0.5,0.5,0.5 --b 0.75,0.75"``."""
    toks = shlex.split(spec)
    vals = {}
    i = 0
    while i < len(toks):
        t = toks[i]
        if t in ("--a", "--b"):
            if i + 1 >= len(toks):
                raise ParseError(f"{t} needs a value", i + 1)
            vals[t] = toks[i + 1]
            i += 2
        elif t.startswith("--a=") or t.startswith("--b="):
            vals[t[:3]] = t[4:]
            i += 1
        else:
            raise ParseError(f"unexpected token {t!r}", i + 1)
    if "--a" not in vals or "--b" not in vals:
        raise ParseError("both --a and --b are required", None)
    return build_parameters(vals["--a"], vals["--b"])


def _sweep(text, flag, geometric=False):
    m = re.fullmatch(r"\s*([^:]+):([^:]+):([^:]+)\s*", text or "")
    if not m:
        raise UsageError(f"{flag} expects start:stop:count", flag)
    try:
        start, stop, count = float(m.group(1)), float(m.group(2)), int(m.group(3))
    except ValueError:
        raise UsageError(f"{flag} expects start:stop:count", flag) from None
    if count < 1:
        raise UsageError(f"{flag}: count must be positive", flag)
    if geometric:
        if start <= 0 or stop <= 0:
            raise UsageError(f"{flag}: geometric sweep needs positive bounds", flag)
        pts = np.geomspace(start, stop, count)
        return sorted(set(int(round(x)) for x in pts))
    return [float(x) for x in np.linspace(start, stop, count)]


# ---------------------------------------------------------------------------
# commands; each returns (report dict or list of row dicts, exit status)


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, np.floating):
        return _clean(float(x))
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def _eval_point(params, z, args):
    method = args.method.replace("-", "_")
    res, warnings = ct.evaluate(params, z, method, args.tol, args.max_terms)
    return {
        "z": z,
        "value": float(res.value),
        "abs_err_estimate": float(res.abs_err_estimate),
        "terms_used": int(res.terms_used),
        "method": res.method,
        "s": params.s,
        "warnings": warnings,
    }


def cmd_eval(params, args):
    if args.z_sweep:
        return [_eval_point(params, z, args) for z in _sweep(args.z_sweep, "--z-sweep")]
    if args.z is None:
        raise UsageError("eval requires --z (or --z-sweep)", "--z")
    return _eval_point(params, args.z, args)


def cmd_expansion(params, args):
    N = ct.DEFAULT_N if args.n_max is None else args.n_max
    if N < 0:
        raise UsageError("--n-max must be nonnegative", "--n-max")
    info_s = params.s
    if abs(info_s - round(info_s)) < 1e-8 and round(info_s) == 0:
        exp = ct.build_zero_balanced(params, N, args.tol)
        out = exp.to_dict()
        out["method"] = "zero_balanced"
    else:
        exp = ct.build_expansion(params, N, args.tol)
        out = exp.to_dict()
        out["method"] = "continuation"
    out["warnings"] = []
    return out


def cmd_constant(params, args):
    rep = args.rep or "recurrence"
    if rep == "all":
        res = ct.constant_L_all(params, args.tol)
        return {
            "value": res.value,
            "values": res.values,
            "max_deviation": res.max_deviation,
            "rep": "all",
            "s": params.s,
            "warnings": [],
        }
    return {
        "value": ct.constant_L(params, rep, args.tol),
        "B": ct.constant_B(params, rep, args.tol),
        "rep": rep,
        "s": params.s,
        "warnings": [],
    }


def _partial_point(params, m, L):
    r = ps.asymptotic_partial_sum(params, m, L)
    return {"m": r.m, "sum": r.sum, "asymptotic": r.asymptotic, "defect": r.defect,
            "value": r.sum, "s": params.s, "warnings": []}


def cmd_partial_sum(params, args):
    ms = _sweep(args.m_sweep, "--m-sweep", geometric=True) if args.m_sweep else None
    if ms is None:
        if args.m is None:
            raise UsageError("partial-sum requires --m (or --m-sweep)", "--m")
        ms = [args.m]
    if any(m < 1 for m in ms):
        raise UsageError("--m must be a positive integer", "--m")
    L = ct.constant_L(params, args.rep if args.rep and args.rep != "all" else "recurrence",
                      args.tol)
    rows = [_partial_point(params, m, L) for m in ms]
    return rows if args.m_sweep else rows[0]


def cmd_verify(args):
    results = vf.run_suite(args.suite, args.seed)
    ok = all(r.passed for r in results)
    report = {
        "suite": args.suite,
        "seed": args.seed,
        "passed": ok,
        "checks": [r.to_dict() for r in results],
        "warnings": [],
    }
    return report, (EXIT_OK if ok else EXIT_VERIFY)


# ---------------------------------------------------------------------------
# output


def _text(report):
    if isinstance(report, list):
        return "\n\n".join(_text(r) for r in report)
    if "checks" in report:
        lines = [f"{'check':<48} {'result':<6} {'worst':>10} {'tol':>8} {'draws':>6}"]
        for c in report["checks"]:
            worst = "-" if c["worst"] is None else f"{c['worst']:.2e}"
            lines.append(f"{c['name']:<48} {'pass' if c['passed'] else 'FAIL':<6} "
                         f"{worst:>10} {c['tolerance']:>8.0e} {c['draws']:>6}")
            if c["detail"]:
                lines.append(f"    {c['detail']}")
        return "\n".join(lines)
    width = max(len(k) for k in report)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in report.items())


def _csv(report):
    rows = report if isinstance(report, list) else report.get("checks", [report])
    buf = io.StringIO()
    keys = list(rows[0].keys()) if rows else []
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(keys)
    for r in rows:
        w.writerow([";".join(map(str, v)) if isinstance(v, list) else
                    json.dumps(v) if isinstance(v, dict) else v for v in (r.get(k) for k in keys)])
    return buf.getvalue().rstrip("\n")


def render(report, fmt):
    report = _clean(report)
    if fmt == "json":
        if isinstance(report, list):
            report = {"points": report}
        return json.dumps(report)
    if fmt == "csv":
        return _csv(report)
    return _text(report)


# ---------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        m = re.search(r"(--[a-z-]+)", message)
        raise UsageError(message, m.group(1) if m else None)


def _add_common(sp, needs_params=True):
    if needs_params:
        sp.add_argument("--a", required=True, help="numerator parameters, comma separated")
        sp.add_argument("--b", required=True, help="denominator parameters, comma separated")
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sp.add_argument("--output", choices=("json", "csv", "text"), default="json")


def make_parser():
    parser = _Parser(prog="hypercont", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    sp = sub.add_parser("eval", help="evaluate p+1Fp at real z")
    _add_common(sp)
    sp.add_argument("--z", type=float)
    sp.add_argument("--z-sweep", help="start:stop:count, linear")
    sp.add_argument("--method", choices=METHOD_CHOICES, default="auto")
    sp.add_argument("--max-terms", type=int, default=DEFAULT_MAX_TERMS)

    sp = sub.add_parser("expansion", help="coefficients of the expansion about z=1")
    _add_common(sp)
    sp.add_argument("--n-max", type=int)

    sp = sub.add_parser("constant", help="the constant L of a zero-balanced series")
    _add_common(sp)
    sp.add_argument("--rep", choices=REP_CHOICES, default="recurrence")

    sp = sub.add_parser("partial-sum", help="partial sums at z=1 and their log asymptotics")
    _add_common(sp)
    sp.add_argument("--m", type=int)
    sp.add_argument("--m-sweep", help="start:stop:count, geometric")
    sp.add_argument("--rep", choices=REP_CHOICES, default="recurrence")

    sp = sub.add_parser("verify", help="run the self-verification suite")
    _add_common(sp, needs_params=False)
    sp.add_argument("--suite", choices=vf.suite_names(), default="all")
    sp.add_argument("--seed", type=int, default=vf.DEFAULT_SEED)
    return parser


def run(argv):
    """Execute one command.  Returns (exit status, rendered output)."""
    fmt = "json"
    if "--output" in argv:
        i = argv.index("--output")
        if i + 1 < len(argv) and argv[i + 1] in ("json", "csv", "text"):
            fmt = argv[i + 1]
    try:
        args = make_parser().parse_args(argv)
        fmt = args.output
        if args.command == "verify":
            report, status = cmd_verify(args)
            return status, render(report, fmt)
        params = build_parameters(args.a, args.b)
        handler = {
            "eval": cmd_eval,
            "expansion": cmd_expansion,
            "constant": cmd_constant,
            "partial-sum": cmd_partial_sum,
        }[args.command]
        return EXIT_OK, render(handler(params, args), fmt)
    except UsageError as exc:
        return EXIT_USAGE, render({"error": "UsageError", "message": str(exc),
                                   "flag": exc.flag, "warnings": []}, fmt)
    except ParseError as exc:
        return EXIT_USAGE, render({"error": "ParseError", "message": str(exc),
                                   "position": exc.position, "warnings": []}, fmt)
    except HypercontError as exc:
        return EXIT_NUMERIC, render({"error": type(exc).__name__, "message": str(exc),
                                     "warnings": []}, fmt)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    status, text = run(argv)
    print(text)
    if status in (EXIT_NUMERIC, EXIT_USAGE):
        print(f"hypercont: exit {status}, see the error field above", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
