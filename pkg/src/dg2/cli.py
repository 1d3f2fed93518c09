"""Command-line interface.

Subcommands: verify (identity suites as a JSON report), nearly-parallel
(exact locus), moduli (solution-set JSON for one parameter point), functional
(grid CSV, numeric critical points, or a Hessian report), and scan (branch
radii CSV over a range of u = t^2).  Exit codes: 0 success, 1 check failure,
2 usage error.  Exact rationals are printed as strings like "3/20".
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import functional as fn
from . import instanton as inst
from . import models, verify
from .scalars import rational_str


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write(text: str, output: str | None):
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _json_dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _parse_fraction(raw: str) -> Fraction:
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {raw!r}") from None


def _parse_epsilon(raw: str) -> int:
    value = raw.replace("+", "")
    if value not in ("1", "-1"):
        raise argparse.ArgumentTypeError("epsilon must be +1 or -1")
    return int(value)


def _parse_q(values: list[str] | None, q_file: str | None):
    if values is None and q_file is None:
        return None
    if q_file is not None:
        values = Path(q_file).read_text().split()
    if len(values) != 9:
        raise argparse.ArgumentTypeError("Q needs nine rationals in row-major order")
    nums = [_parse_fraction(v) for v in values]
    return [nums[0:3], nums[3:6], nums[6:9]]


def _parse_grid(raw: str) -> fn.GridSpec:
    parts = raw.split(":")
    if len(parts) != 5:
        raise argparse.ArgumentTypeError("grid must be xmin:xmax:ymin:ymax:n")
    try:
        return fn.GridSpec(
            float(parts[0]), float(parts[1]), float(parts[2]), float(parts[3]),
            int(parts[4]),
        )
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _parse_range(raw: str) -> list[float]:
    parts = raw.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("range must be a:b:n")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed range {raw!r}") from None
    if n < 2 or a <= 0 or b < a:
        raise argparse.ArgumentTypeError("range needs 0 < a <= b and n >= 2")
    return [a + i * (b - a) / (n - 1) for i in range(n)]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dg2",
        description=(
            "Exact and numeric computations for invariant (deformed) "
            "G2-instantons on 3-Sasakian 7-manifolds."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run the exact identity suites")
    group = p_verify.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", choices=verify.PRESET_NAMES)
    group.add_argument("--all", action="store_true")
    p_verify.add_argument("--q", nargs=9, metavar="R", help="hypersymplectic Q entries")
    p_verify.add_argument("--q-file", help="file with nine whitespace-separated rationals")
    p_verify.add_argument("--pairs", type=int, default=200)
    p_verify.add_argument("--triples", type=int, default=500)
    p_verify.add_argument("--output", default="-")

    p_np = sub.add_parser("nearly-parallel", help="exact nearly parallel locus")
    p_np.add_argument("--epsilon", type=_parse_epsilon, default=None)
    p_np.add_argument("--output", default="-")

    p_mod = sub.add_parser("moduli", help="solution set for one (epsilon, u, k)")
    p_mod.add_argument("--epsilon", type=_parse_epsilon, required=True)
    p_mod.add_argument("--u", type=_parse_fraction, required=True)
    p_mod.add_argument("--k", type=int, default=0)
    p_mod.add_argument("--equation", choices=("g2", "deformed"), default="deformed")
    p_mod.add_argument("--samples", type=int, default=20)
    p_mod.add_argument("--output", default="-")

    p_fun = sub.add_parser("functional", help="grid CSV, critical points, or Hessian")
    p_fun.add_argument("--epsilon", type=_parse_epsilon, required=True)
    p_fun.add_argument("--t", type=float, required=True)
    mode = p_fun.add_mutually_exclusive_group(required=True)
    mode.add_argument("--grid", type=_parse_grid, metavar="XMIN:XMAX:YMIN:YMAX:N")
    mode.add_argument("--critical", action="store_true")
    mode.add_argument("--hessian", nargs=2, type=float, metavar=("X", "Y"))
    p_fun.add_argument("--seeds", type=int, default=200)
    p_fun.add_argument("--rng", type=int, default=0)
    p_fun.add_argument("--volume", type=float, default=1.0)
    p_fun.add_argument("--output", default="-")

    p_scan = sub.add_parser("scan", help="branch radii over a range of u = t^2")
    p_scan.add_argument("--epsilon", type=_parse_epsilon, required=True)
    p_scan.add_argument("--k", type=int, default=0)
    p_scan.add_argument("--u-range", type=_parse_range, required=True, metavar="A:B:N")
    p_scan.add_argument("--output", default="-")
    return parser


def _cmd_verify(args) -> int:
    try:
        q = _parse_q(args.q, args.q_file)
    except argparse.ArgumentTypeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.all:
        report = verify.run_all(q, pairs=args.pairs, triples=args.triples)
    else:
        report = verify.run_suite(args.preset, q, pairs=args.pairs, triples=args.triples)
    _write(_json_dump(report.as_dict()), args.output)
    return 0 if report.ok else 1


def _cmd_nearly_parallel(args) -> int:
    eps_values = (args.epsilon,) if args.epsilon else (1, -1)
    out = []
    for eps in eps_values:
        for sol in models.solve_nearly_parallel(eps):
            out.append(
                {
                    "epsilon": sol.epsilon,
                    "u": rational_str(sol.u),
                    "t": str(sol.t),
                    "lambda": str(sol.lam),
                    "t_float": float(sol.t),
                    "lambda_float": float(sol.lam),
                }
            )
    _write(_json_dump(out), args.output)
    return 0


def _cmd_moduli(args) -> int:
    if args.u <= 0:
        print("error: u must be positive", file=sys.stderr)
        return 2
    if args.equation == "g2":
        if args.k != 0:
            print("error: the plain-instanton classifier is for k = 0", file=sys.stderr)
            return 2
        sset = inst.classify_g2(args.epsilon, args.u)
    else:
        sset = inst.classify_deformed(args.epsilon, args.u, args.k)
    report = inst.verify_solution_set(sset, samples=args.samples)
    payload = sset.as_dict()
    payload["equation"] = sset.equation
    payload["verified"] = report.ok
    _write(_json_dump(payload), args.output)
    return 0 if report.ok else 1


def _cmd_functional(args) -> int:
    if args.t <= 0:
        print("error: t must be positive", file=sys.stderr)
        return 2
    if args.volume <= 0:
        print("error: volume must be positive", file=sys.stderr)
        return 2
    if args.grid is not None:
        rows = fn.grid_export(args.epsilon, args.t, args.grid, volume=args.volume)
        lines = ["x,y,F"]
        lines += [f"{_fmt(x)},{_fmt(y)},{_fmt(v)}" for x, y, v in rows]
        _write("\n".join(lines) + "\n", args.output)
        return 0
    if args.critical:
        search = fn.critical_points_numeric(
            args.epsilon, args.t, seeds=args.seeds, rng_seed=args.rng
        )
        payload = []
        for p in search.points:
            d = p.as_dict()
            d["value"] *= args.volume
            d["branch"] = p.matched_branch
            payload.append(d)
        _write(_json_dump(payload), args.output)
        return 0
    x, y = args.hessian
    cp = fn.hessian_at(fn.closed_form(args.epsilon), x, y, args.t * args.t)
    payload = {
        "x": cp.x,
        "y": cp.y,
        "value": float(cp.value) * args.volume,
        "class": cp.kind,
        "hessian": [[v * args.volume for v in row] for row in
                    [[float(cp.hessian[0][0]), float(cp.hessian[0][1])],
                     [float(cp.hessian[1][0]), float(cp.hessian[1][1])]]],
        "eigenvalues": [float(e) * args.volume for e in cp.eigenvalues],
        "degenerate": cp.kind == "degenerate",
        "tolerance_based": cp.tolerance_based,
    }
    _write(_json_dump(payload), args.output)
    return 0


def _cmd_scan(args) -> int:
    rows = fn.moduli_scan(args.epsilon, args.k, args.u_range)
    lines = ["t,branch,r"]
    lines += [f"{_fmt(t)},{branch},{_fmt(r)}" for t, branch, r in rows]
    _write("\n".join(lines) + "\n", args.output)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "verify": _cmd_verify,
        "nearly-parallel": _cmd_nearly_parallel,
        "moduli": _cmd_moduli,
        "functional": _cmd_functional,
        "scan": _cmd_scan,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
