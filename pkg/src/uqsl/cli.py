"""Command-line front end.

Three subcommands: check-finite runs the q-difference relation suites,
check-affine runs the loop-algebra suites, apply evaluates one generator
word on one flag monomial.  Reports are UTF-8 JSON with stable ordering;
exit status is 0 when everything passed, 1 on any relation failure, 2 on
configuration or parse errors.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .affine import (
    AffineContext,
    affine_config,
    check_eq6,
    check_eq7,
    check_eq8,
    check_eq9,
    check_eq10,
    check_eq11,
    check_eq12,
    check_eq13,
    check_eq14,
    check_eq15,
)
from .finite import (
    SABOTAGE_IDS,
    FiniteRealization,
    check_chevalley,
    check_intermediate,
    check_remarks,
)
from .grassmann import SuperPoly
from .oscillators import enumerate_basis
from .report import RelationResult, SuiteReport
from .ring import LinForm, RingError, affine_symbols, verify_bracket_identity

F_NAMES = ("f11", "f12", "f13", "f21", "f22", "f23", "f24")
BRACKET_NMAX = 4

_FINITE_TASKS = ("chevalley", "intermediate", "remarks", "bracket")
_AFFINE_TASKS = ("eq6", "eq7", "eq8", "eq9", "eq10", "eq11", "eq12", "eq13",
                 "eq14", "eq15")


def parse_scalar(table, text: str):
    """Monomial override expressions: '*'-joined factors, each an integer,
    a rational, a symbol, or symbol^int."""
    out = table.one()
    for raw in text.split("*"):
        factor = raw.strip()
        if not factor:
            raise ValueError(f"empty factor in {text!r}")
        base, _, pow_s = factor.partition("^")
        base = base.strip()
        exp = int(pow_s.strip()) if pow_s else 1
        try:
            coeff = Fraction(base)
        except ValueError:
            coeff = None
        if coeff is not None:
            out = out * table.rational(coeff ** exp)
        elif base == "q":
            out = out * table.qpow(LinForm(exp))
        elif base in table.symbols:
            out = out * table.monomial({base: exp})
        else:
            raise ValueError(f"unknown symbol {base!r} in {text!r}")
    return out


def _parse_overrides(pairs) -> dict:
    spec = {}
    for item in pairs or ():
        name, eq, text = item.partition("=")
        if not eq or name not in F_NAMES:
            raise ValueError(f"override must be fXY=<expr>, got {item!r}")
        spec[name] = text
    return spec


def _override_elems(table, spec: dict) -> dict:
    return {name: parse_scalar(table, text) for name, text in spec.items()}


def bracket_results(nmax: int = BRACKET_NMAX) -> list:
    """The exponent-splitting bracket identity as relation reports."""
    out = []
    for n in range(1, nmax + 1):
        ok = verify_bracket_identity(n)
        out.append(RelationResult(
            f"bracket.eq32.n={n}", "pass" if ok else "fail", 1, {"n": n},
            None if ok else {"element": "formal exponents",
                             "reason": "sum of shifted brackets != joint bracket"},
        ))
    return out


def _finite_task(args) -> list:
    name, M, N, variant, D, seed, sabotage = args
    if name == "chevalley":
        return check_chevalley(M, N, variant, D, seed, sabotage)
    if name == "intermediate":
        return check_intermediate(M, N, D, seed, sabotage)
    if name == "remarks":
        return check_remarks(M, N, D, seed)
    return bracket_results()


def _affine_eq_results(ctx, basis, eq, window, psi_nmax) -> list:
    if eq == "eq6":
        return check_eq6(ctx, window)
    if eq == "eq14":
        return check_eq14(ctx)
    if eq == "eq15":
        return check_eq15(ctx, basis, psi_nmax)
    fn = {"eq7": check_eq7, "eq8": check_eq8, "eq9": check_eq9,
          "eq10": check_eq10, "eq11": check_eq11, "eq12": check_eq12,
          "eq13": check_eq13}[eq]
    return fn(ctx, basis, window)


def _affine_task(args) -> list:
    eq, E_cut, window, k, radius, norm, psi_nmax, seed, spec = args
    overrides = _override_elems(affine_symbols(k), spec) or None
    ctx = AffineContext(k=k, f_overrides=overrides, seed=seed)
    basis = enumerate_basis(E_cut, radius, norm)
    return _affine_eq_results(ctx, basis, eq, window, psi_nmax)


def _run_tasks(task_fn, argslist, jobs: int, labels, want_timings: bool):
    """Run tasks in a fixed order; results and timings merge deterministically."""
    results = []
    timings = {} if want_timings else None
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            t0 = time.monotonic()
            for label, chunk in zip(labels, pool.map(task_fn, argslist)):
                results.extend(chunk)
            if want_timings:
                timings["total_seconds"] = round(time.monotonic() - t0, 3)
        return results, timings
    for label, args in zip(labels, argslist):
        t0 = time.monotonic()
        results.extend(task_fn(args))
        if want_timings:
            timings[label] = round(time.monotonic() - t0, 3)
    if want_timings:
        timings["total_seconds"] = round(sum(timings.values()), 3)
    return results, timings


def _emit(report: SuiteReport, path) -> int:
    if path:
        report.write(path)
        s = report.summary()
        print(f"{report.suite}: {s['pass']} pass, {s['fail']} fail, "
              f"{s['not-applicable']} not-applicable -> {path}")
    else:
        print(json.dumps(report.to_json(), indent=2, sort_keys=True,
                         ensure_ascii=False))
    return 1 if report.failed else 0


def _cmd_check_finite(args) -> int:
    cfg = {
        "M": args.M, "N": args.N, "variant": args.variant,
        "max_degree": args.max_degree, "sabotage": args.sabotage,
        "bracket_nmax": BRACKET_NMAX,
    }
    if args.M + args.N < 2:
        raise ValueError("need M + N >= 2")
    if args.sabotage is not None and args.sabotage not in SABOTAGE_IDS:
        raise ValueError(f"unknown sabotage id {args.sabotage!r}")
    argslist = [
        (name, args.M, args.N, args.variant, args.max_degree, args.seed,
         args.sabotage)
        for name in _FINITE_TASKS
    ]
    results, timings = _run_tasks(
        _finite_task, argslist, args.jobs, _FINITE_TASKS, args.timings)
    report = SuiteReport("finite", cfg, args.seed, results, timings)
    return _emit(report, args.report)


def _cmd_check_affine(args) -> int:
    spec = _parse_overrides(args.override)
    table = affine_symbols(args.k)
    overrides = _override_elems(table, spec) or None  # validates the grammar
    cfg = affine_config(args.energy_cut, args.mode_window, args.k,
                        args.momentum_radius, args.momentum_norm,
                        args.psi_nmax, spec)
    if args.jobs > 1:
        argslist = [
            (eq, args.energy_cut, args.mode_window, args.k,
             args.momentum_radius, args.momentum_norm, args.psi_nmax,
             args.seed, spec)
            for eq in _AFFINE_TASKS
        ]
        results, timings = _run_tasks(
            _affine_task, argslist, args.jobs, _AFFINE_TASKS, args.timings)
    else:
        ctx = AffineContext(k=args.k, f_overrides=overrides, seed=args.seed)
        basis = enumerate_basis(args.energy_cut, args.momentum_radius,
                                args.momentum_norm)
        results = []
        timings = {} if args.timings else None
        for eq in _AFFINE_TASKS:
            t0 = time.monotonic()
            results.extend(_affine_eq_results(
                ctx, basis, eq, args.mode_window, args.psi_nmax))
            if args.timings:
                timings[eq] = round(time.monotonic() - t0, 3)
        if args.timings:
            timings["total_seconds"] = round(sum(timings.values()), 3)
    report = SuiteReport("affine", cfg, args.seed, results, timings)
    return _emit(report, args.report)


_TOKEN = re.compile(r"^([etf])(\d+)(\^-1)?$")


def _word_map(real: FiniteRealization, variant: str, tok: str):
    m = _TOKEN.match(tok)
    if m is None or (m.group(3) and m.group(1) != "t"):
        raise ValueError(f"bad generator token {tok!r}")
    kind, idx = m.group(1), int(m.group(2))
    if not 1 <= idx <= real.root.rank:
        raise ValueError(f"index out of range in {tok!r}")
    if kind == "e":
        return real.build_e(idx, variant)
    if kind == "f":
        return real.build_f(idx, variant)
    return real.build_t(idx, -1 if m.group(3) else 1)


def _parse_words(expr: str) -> list:
    """Split 'e1 f1 - f1 e1' into (sign, tokens) words."""
    words, cur, sign = [], [], 1
    for tok in expr.split():
        if tok in ("+", "-"):
            if cur:
                words.append((sign, cur))
                cur = []
            elif words:
                raise ValueError(f"empty word in expression {expr!r}")
            sign = 1 if tok == "+" else -1
        else:
            cur.append(tok)
    if not cur:
        raise ValueError(f"expression {expr!r} ends without a word")
    words.append((sign, cur))
    return words


def _cmd_apply(args) -> int:
    real = FiniteRealization(args.M, args.N)
    target = real.space.parse_monomial(args.on)
    start = SuperPoly(real.space, {target: real.table.one()})
    total = SuperPoly(real.space, {})
    for sign, tokens in _parse_words(args.expr):
        vec = start
        for tok in reversed(tokens):
            vec = _word_map(real, args.variant, tok).apply(vec)
        total = total + vec.scale(sign)
    print(total)
    return 0


def _k_value(text: str):
    if text == "formal":
        return None
    return int(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uqsl",
        description="Exact verification of the q-difference and free-boson "
                    "realizations of the rank-(M|N) quantum superalgebras.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fin = sub.add_parser("check-finite", help="flag-coordinate relation suites")
    fin.add_argument("--M", type=int, required=True)
    fin.add_argument("--N", type=int, required=True)
    fin.add_argument("--variant", choices=("i", "ii"), default="i")
    fin.add_argument("--max-degree", type=int, default=4)
    fin.add_argument("--sabotage", default=None, metavar="ATOM",
                     help=f"corrupt one atom family, one of {SABOTAGE_IDS}")
    fin.add_argument("--report", default=None, help="write the JSON report here")
    fin.add_argument("--seed", type=int, default=0)
    fin.add_argument("--jobs", type=int, default=1)
    fin.add_argument("--timings", action="store_true")
    fin.set_defaults(func=_cmd_check_finite)

    aff = sub.add_parser("check-affine", help="loop-algebra relation suites")
    aff.add_argument("--energy-cut", type=int, default=2)
    aff.add_argument("--mode-window", type=int, default=2)
    aff.add_argument("--k", type=_k_value, default=None,
                     help="integer level, or 'formal' (default)")
    aff.add_argument("--override", action="append", metavar="fXY=EXPR",
                     help="replace one F-current constant, e.g. f13=1")
    aff.add_argument("--momentum-radius", type=int, default=0)
    aff.add_argument("--momentum-norm", choices=("l1", "box"), default="l1")
    aff.add_argument("--psi-nmax", type=int, default=4)
    aff.add_argument("--report", default=None, help="write the JSON report here")
    aff.add_argument("--seed", type=int, default=0)
    aff.add_argument("--jobs", type=int, default=1)
    aff.add_argument("--timings", action="store_true")
    aff.set_defaults(func=_cmd_check_affine)

    app = sub.add_parser("apply", help="apply a generator word to a monomial")
    app.add_argument("--expr", required=True,
                     help="words in e<i> f<i> t<i> t<i>^-1 joined by + or -")
    app.add_argument("--on", required=True, help="flag monomial, e.g. x12^2*x13")
    app.add_argument("--M", type=int, default=2)
    app.add_argument("--N", type=int, default=1)
    app.add_argument("--variant", choices=("i", "ii"), default="i")
    app.add_argument("--jobs", type=int, default=1)
    app.set_defaults(func=_cmd_apply)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (RingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
