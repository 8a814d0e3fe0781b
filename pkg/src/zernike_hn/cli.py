"""Command-line entry point: zernike-hn <subcommand> [options]."""

from __future__ import annotations

import argparse
import json
import re
import sys
import warnings
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import coalgebra, dynamics, geometry, racah, tables
from .zernike import DEFAULT_MAX_ORDER, ModelSpec, verification_checks

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_REAL = re.compile(rf"^(?P<re>[+-]?{_NUM})$")
_IMAG = re.compile(rf"^(?P<sign>[+-]?)(?P<mag>{_NUM})?i$")
_BOTH = re.compile(rf"^(?P<re>[+-]?{_NUM})(?P<sign>[+-])(?P<mag>{_NUM})?i$")


def parse_complex(text: str) -> complex:
    """Grammar: ``a``, ``bi``, ``a+bi`` / ``a-bi``; a bare ``i`` means 1i."""
    s = text.strip().replace(" ", "")
    m = _REAL.match(s)
    if m:
        return complex(float(m["re"]), 0.0)
    m = _IMAG.match(s)
    if m:
        mag = float(m["mag"]) if m["mag"] else 1.0
        return complex(0.0, -mag if m["sign"] == "-" else mag)
    m = _BOTH.match(s)
    if m:
        mag = float(m["mag"]) if m["mag"] else 1.0
        return complex(float(m["re"]), -mag if m["sign"] == "-" else mag)
    raise argparse.ArgumentTypeError(f"not a complex literal: {text!r}")


def parse_vector(text: str) -> List[complex]:
    parts = [p for p in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated values, got {text!r}")
    return [parse_complex(p) for p in parts]


def parse_gamma(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected n=value, got {text!r}")
    n, v = text.split("=", 1)
    try:
        index = int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"gamma index must be an integer, got {n!r}") from None
    if index < 1:
        raise argparse.ArgumentTypeError("gamma index must be >= 1")
    return index, parse_complex(v)


def parse_tspan(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected t0,t1, got {text!r}")
    return float(parts[0]), float(parts[1])


def _fmt_complex(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}i"


def _json_value(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    if isinstance(v, Path):
        return str(v)
    return v


class Reporter:
    """Collects text lines and a result payload; emits one of them at the end."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.lines: List[str] = []
        self.result: Dict[str, object] = {}
        self.started = datetime.now(timezone.utc)

    def line(self, text: str = ""):
        self.lines.append(text)

    def emit(self, passed: bool) -> int:
        if self.args.report == "json":
            config = {k: v for k, v in vars(self.args).items() if k not in ("func",)}
            doc = {
                "schema": SCHEMA,
                "command": self.args.command,
                "started": self.started.isoformat(),
                "finished": datetime.now(timezone.utc).isoformat(),
                "config": _json_value(config),
                "passed": passed,
                "result": _json_value(self.result),
            }
            sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        else:
            sys.stdout.write("".join(line + "\n" for line in self.lines))
        return EXIT_OK if passed else EXIT_FAIL


def _fail(message: str):
    print(f"error: {message}", file=sys.stderr)


def _check_order(parser: argparse.ArgumentParser, order: int, cap: Optional[int]):
    limit = cap if cap is not None else DEFAULT_MAX_ORDER
    if order < 1:
        parser.error("--order must be >= 1")
    if order > limit:
        parser.error(f"--order {order} exceeds the configured maximum {limit} (raise it with --max-order)")


def cmd_verify(args, parser) -> int:
    n = args.max_order if args.max_order is not None else 8
    if n < 1:
        parser.error("--max-order must be >= 1 for verify")
    rep = Reporter(args)
    checks = verification_checks(n, seed=args.seed)
    for c in checks:
        rep.line(c.line())
    passed = all(c.passed for c in checks)
    rep.line(f"verified {len(checks)} identities for 1 <= N <= {n}: {'PASS' if passed else 'FAIL'}")
    rep.result = {"max_order": n, "checks": [{"identity": c.name, "passed": c.passed, "detail": c.detail}
                                             for c in checks]}
    if not passed:
        _fail(f"identity failed: {next(c.name for c in checks if not c.passed)}")
    return rep.emit(passed)


def cmd_tables(args, parser) -> int:
    _check_order(parser, args.order, args.max_order)
    n, which = args.order, args.which
    rep = Reporter(args)
    diffs: List[str] = []
    compared: Dict[str, bool] = {}

    def compare(kind: str, text: str, part: Optional[str], limit: int):
        label = f"table{kind}" + (f"[{part}]" if part else "")
        golden = tables.load_golden(kind, n) if n <= limit else None
        if golden is None:
            print(f"warning: no golden {label} for N={n} (published tables stop at N={limit}); "
                  "generated without comparison", file=sys.stderr)
            return
        if part:
            golden = tables.section(golden, part)
        compared[label] = golden == text
        if golden != text:
            diffs.extend(tables.diff(golden, text, tables.golden_name(kind, n)))

    if which in ("q", "all"):
        text = tables.render_table1(n)
        rep.lines += text.splitlines()
        compare("1", text, None, tables.TABLE1_MAX)
    if which in ("integrals", "racah", "all"):
        full = tables.render_integrals(n)
        if which == "all":
            rep.lines += full.splitlines()
            compare("2", full, None, tables.TABLE2_MAX)
        elif which == "integrals":
            part = tables.section(full, "I") + tables.section(full, "relation")
            rep.lines += part.splitlines()
            for name in ("I", "relation"):
                compare("2", tables.section(full, name), name, tables.TABLE2_MAX)
        else:
            part = tables.section(full, "racah")
            rep.lines += part.splitlines()
            compare("2", part, "racah", tables.TABLE2_MAX)
    for line in diffs:
        print(line, file=sys.stderr)
    rep.result = {"order": n, "which": which, "lines": list(rep.lines), "golden_match": compared}
    passed = all(compared.values())
    if not passed:
        _fail("computed tables differ from the bundled goldens")
    return rep.emit(passed)


def cmd_racah(args, parser) -> int:
    _check_order(parser, args.order, args.max_order)
    spec = ModelSpec(args.order, max_order=max(args.order, DEFAULT_MAX_ORDER))
    rep = Reporter(args)
    try:
        dec = racah.decompose(spec)
    except racah.DecompositionFailed as exc:
        _fail(str(exc))
        rep.result = {"order": args.order, "decomposed": False}
        return rep.emit(False)
    rep.line(f"{{L2, L3}} for N={args.order}:")
    rep.lines += dec.lines()
    l13 = racah.l1_l3_residual(spec).is_zero()
    rep.line(f"{{L1, L3}} = -L2 : {'PASS' if l13 else 'FAIL'}")
    nonzero = [k for k, c in enumerate(dec.coefficients) if not c.is_zero()]
    degree = 2 * nonzero[-1] + 1 if nonzero else 0
    # checked for this N only; no general claim is made
    rep.line(f"highest power of L1 : {degree} (2N-1 = {2 * args.order - 1}, this N only)")
    published = None
    if args.order <= tables.TABLE2_MAX:
        published = dec.table_coefficients() == racah.table2_reference(args.order)
        rep.line(f"matches published coefficients : {'PASS' if published else 'FAIL'}")
    rep.result = {
        "order": args.order,
        "lines": dec.lines(),
        "residual_zero": dec.residual.is_zero(),
        "l1_l3": l13,
        "l1_degree": degree,
        "matches_published": published,
        "unknowns": dec.unknowns,
        "free_unknowns": dec.free_unknowns,
    }
    return rep.emit(dec.residual.is_zero() and l13 and published is not False)


def cmd_coalgebra(args, parser) -> int:
    n = args.max_order if args.max_order is not None else 8
    if n < 1:
        parser.error("--max-order must be >= 1")
    rep = Reporter(args)
    checks = coalgebra.coalgebra_checks(n)
    for c in checks:
        rep.line(c.line())
    passed = all(c.passed for c in checks)
    rep.result = {"max_order": n, "checks": [{"identity": c.name, "passed": c.passed} for c in checks]}
    return rep.emit(passed)


def cmd_transform(args, parser) -> int:
    _check_order(parser, args.order, args.max_order)
    if args.samples < 1:
        parser.error("--samples must be >= 1")
    rep = Reporter(args)
    try:
        rows = geometry.transform_check(args.kappa, args.order, args.samples, args.seed)
    except ValueError as exc:
        parser.error(str(exc))
    width = max(len(r.name) for r in rows)
    rep.line(f"kappa={args.kappa:g} N={args.order} samples={args.samples} seed={args.seed}")
    for r in rows:
        rep.line(f"{r.name:<{width}}  max_dev={r.max_deviation:.3e}  tol={r.tolerance:.0e}  "
                 f"{'PASS' if r.passed else 'FAIL'}")
    worst = max(r.max_deviation for r in rows)
    rep.line(f"max deviation: {worst:.3e}")
    rep.result = {"rows": [{"check": r.name, "max_deviation": r.max_deviation, "tolerance": r.tolerance,
                            "passed": r.passed} for r in rows], "max_deviation": worst}
    return rep.emit(all(r.passed for r in rows))


def cmd_simulate(args, parser) -> int:
    _check_order(parser, args.order, args.max_order)
    extra = dict(args.gamma or [])
    bad = [k for k in extra if k > args.order]
    if bad:
        parser.error(f"--gamma index {bad[0]} exceeds --order {args.order}")
    try:
        spec = dynamics.zernike_spec(args.omega, args.kappa, args.order, extra,
                                     max_order=args.max_order or DEFAULT_MAX_ORDER)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            for n, v in sorted(spec.bound.items()):
                dynamics.check_parity(n, v, args.allow_nonreal)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except dynamics.RealityViolation as exc:
        _fail(f"{exc} (pass --allow-nonreal to proceed)")
        return EXIT_USAGE

    q0 = args.q0 or [0.5, 0.1]
    p0 = args.p0 or [0.1, 0.6]
    g1 = complex(spec.bound.get(1, 0))
    if args.cartesian_p0:
        state = (*q0, *p0)
    else:
        if any(complex(v).imag for v in (*q0, *p0)):
            parser.error("real-slice initial data must be real; use --cartesian-p0 for complex states")
        try:
            state = dynamics.real_slice_state([v.real for v in q0], [v.real for v in p0], g1, args.kappa)
        except ValueError as exc:
            parser.error(str(exc))
    try:
        problem = dynamics.FlowProblem(spec, state, args.tspan, args.samples)
    except ValueError as exc:
        parser.error(str(exc))
    rep = Reporter(args)
    try:
        record = dynamics.integrate(problem, args.rtol, args.atol)
    except dynamics.StepSizeUnderflow as exc:
        _fail(f"{exc}; last good state at t={exc.t:.6g}: {[_fmt_complex(z) for z in exc.state]}")
        rep.result = {"underflow_t": exc.t, "last_state": list(exc.state)}
        return rep.emit(False)

    period, gap = dynamics.estimate_period(record)
    rep.line(f"N={args.order} " + " ".join(f"g{n}={_fmt_complex(complex(v))}" for n, v in sorted(spec.bound.items())))
    rep.line("initial state: " + " ".join(_fmt_complex(z) for z in problem.initial_state))
    rep.line(f"t in [{problem.time_span[0]:g}, {problem.time_span[1]:g}], {problem.sample_count} samples, "
             f"{record.nfev} field evaluations")
    for name in dynamics.CONSERVED:
        rep.line(f"drift {name}: {record.drift[name]:.3e}")
    rep.line(f"estimated period: {period:.10g}  closure gap: {gap:.3e}")
    written = []
    for out in args.out or []:
        path = Path(out)
        suffix = path.suffix.lower()
        try:
            if suffix in (".csv", ".svg"):
                dynamics.export_trajectory(record, suffix[1:], path)
            elif suffix in (".png", ".pdf"):
                from .figures import render_trajectory
                render_trajectory(record, path, title=f"N={args.order}")
            else:
                parser.error(f"unsupported output {out!r}; use .csv, .svg, .png or .pdf")
        except OSError as exc:
            _fail(f"cannot write {out}: {exc}")
            return EXIT_FAIL
        written.append(str(path))
        rep.line(f"wrote {path}")
    rep.result = {
        "order": args.order,
        "gamma": {n: complex(v) for n, v in sorted(spec.bound.items())},
        "initial_state": list(problem.initial_state),
        "drift": record.drift,
        "period": period,
        "closure_gap": gap,
        "nfev": record.nfev,
        "outputs": written,
    }
    return rep.emit(True)


def _add_globals(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0), help="seed for random test points (default 0)")
    p.add_argument("--report", choices=("text", "json"), default=d("text"), help="report format")
    p.add_argument("--max-order", type=int, default=d(None),
                   help="verify/coalgebra-check: highest N checked (default 8); "
                        f"other commands: cap on --order (default {DEFAULT_MAX_ORDER})")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zernike-hn", description="Superintegrable Zernike-type Hamiltonians H_N.")
    _add_globals(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_, description=help_)
        _add_globals(p, suppress=True)
        p.set_defaults(func=func)
        return p

    add("verify", cmd_verify, "certify the exact identities for 1 <= N <= --max-order")
    p = add("tables", cmd_tables, "print the Q / integral / Racah tables and diff against goldens")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--which", choices=("q", "integrals", "racah", "all"), default="all")
    p = add("racah", cmd_racah, "solve for {L2, L3} as a polynomial in L1")
    p.add_argument("--order", type=int, required=True)
    add("coalgebra-check", cmd_coalgebra, "sl(2) coalgebra identities")
    p = add("transform-check", cmd_transform, "cross-chart consistency and isometry algebra")
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--samples", type=int, default=100)
    p = add("simulate", cmd_simulate, "integrate the complexified flow of H_N")
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--gamma", type=parse_gamma, action="append", metavar="N=VALUE",
                   help="bind gamma_N (complex literal such as 0.05i); repeatable")
    p.add_argument("--omega", type=float, default=1.0, help="gamma1 = 2 i omega")
    p.add_argument("--kappa", type=float, default=1.0, help="gamma2 = -kappa")
    p.add_argument("--q0", type=parse_vector, help="initial position q1,q2 (default 0.5,0.1)")
    p.add_argument("--p0", type=parse_vector, help="initial momentum p1,p2 (default 0.1,0.6)")
    p.add_argument("--cartesian-p0", action="store_true",
                   help="use --q0/--p0 as the Cartesian state as-is instead of real-slice data")
    p.add_argument("--allow-nonreal", action="store_true",
                   help="downgrade gamma reality-rule violations to warnings")
    p.add_argument("--tspan", type=parse_tspan, default=dynamics.DEFAULT_TSPAN, metavar="T0,T1")
    p.add_argument("--samples", type=int, default=dynamics.DEFAULT_SAMPLES)
    p.add_argument("--rtol", type=float, default=dynamics.DEFAULT_RTOL)
    p.add_argument("--atol", type=float, default=dynamics.DEFAULT_ATOL)
    p.add_argument("--out", action="append", metavar="FILE",
                   help="write .csv, .svg (single polyline) or .png/.pdf figure; repeatable")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())
