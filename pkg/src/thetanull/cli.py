"""Command line interface.

Exit codes: 0 the command ran and the verdict is positive (rank <= 3 null,
or the boundary point lies in the stratum); 1 the command ran with a negative
verdict; 2 input error; 3 numerical failure.
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from pathlib import Path

import numpy as np

from .characteristics import Characteristic
from .errors import InputError, NumericalError, ParseError
from .fileio import complex_json, dumps, parse_period_matrix, report_document, report_text
from .schottky import Tolerances, Verdict, genus5_verdict, scan_nulls, stratum
from .theta import DEFAULT_TARGET_DERIV, DEFAULT_TARGET_VALUE, eval_theta, eval_theta_jet

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3


def parse_z(text: str, g: int) -> np.ndarray:
    """Comma separated complex entries such as ``"0.5+0.25i,0"``; one entry broadcasts."""
    parts = [p for p in re.sub(r"\s+", "", text).split(",")]
    try:
        vals = [complex(p.replace("i", "j")) for p in parts]
    except ValueError:
        raise ParseError(f"cannot parse --z {text!r}") from None
    if len(vals) == 1:
        vals = vals * g
    if len(vals) != g:
        raise ParseError(f"--z has {len(vals)} entries, genus is {g}")
    return np.array(vals, dtype=complex)


def _load(args):
    try:
        text = Path(args.input).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {args.input}: {exc}") from None
    doc = parse_period_matrix(text)
    return doc, doc.period_matrix()


def _tolerances(args) -> Tolerances:
    value = args.target_error if args.target_error is not None else DEFAULT_TARGET_VALUE
    deriv = args.target_error if args.target_error is not None else DEFAULT_TARGET_DERIV
    return Tolerances(args.tol_vanish, args.tol_rank, value, deriv)


def _emit(args, payload: dict, text: str) -> None:
    print(dumps(payload) if args.format == "json" else text)


def cmd_check(args) -> int:
    doc, tau = _load(args)
    tol = _tolerances(args)
    start = time.perf_counter()
    if tau.g == 5:
        report = genus5_verdict(tau, tol)
    else:
        report = stratum(tau, tol)[1]
    elapsed = time.perf_counter() - start if args.timing else None
    _emit(args, report_document(report, doc.label, elapsed), report_text(report, doc.label))
    return EXIT_OK if report.verdict is Verdict.IN_THETA_NULL_RANK_LE_3 else EXIT_NEGATIVE


def cmd_nulls(args) -> int:
    doc, tau = _load(args)
    tol = _tolerances(args)
    constants, scale, found = scan_nulls(tau, tol)
    payload = {
        "label": doc.label,
        "g": tau.g,
        "theta_scale": scale,
        "tol_vanish": tol.tol_vanish,
        "vanishing": [
            {"characteristic": str(m), "abs_theta": abs(constants[m].value),
             "relative": abs(constants[m].value) / scale}
            for m in found
        ],
    }
    text = "\n".join(str(m) for m in found) if found else "no even theta constant vanishes"
    _emit(args, payload, text)
    return EXIT_OK


def _char_and_z(args, g):
    if args.char is None:
        m = Characteristic.zero(g)
    else:
        m = Characteristic.parse(args.char)
    if m.g != g:
        raise ParseError(f"characteristic {m} has genus {m.g}, input has genus {g}")
    z = parse_z(args.z, g) if args.z is not None else np.zeros(g, dtype=complex)
    return m, z


def cmd_theta(args) -> int:
    _, tau = _load(args)
    m, z = _char_and_z(args, tau.g)
    target = args.target_error if args.target_error is not None else DEFAULT_TARGET_VALUE
    ev = eval_theta(m, z, tau, target)
    payload = {
        "characteristic": str(m),
        "z": complex_json(z),
        "value": complex_json(ev.value),
        "error_bound": ev.error_bound,
        "terms_used": ev.terms_used,
        "radius": ev.radius,
    }
    text = f"theta[{m}] = {complex(ev.value)!r} +- {ev.error_bound:.2e} ({ev.terms_used} terms)"
    _emit(args, payload, text)
    return EXIT_OK


def cmd_hessian(args) -> int:
    _, tau = _load(args)
    m, z = _char_and_z(args, tau.g)
    jet = eval_theta_jet(m, z, tau, args.target_error)
    payload = {
        "characteristic": str(m),
        "z": complex_json(z),
        "value": complex_json(jet.value),
        "gradient": complex_json(jet.gradient),
        "hessian": complex_json(jet.hessian),
        "errors": [jet.value_error, jet.gradient_error, jet.hessian_error],
        "terms_used": jet.terms_used,
        "radius": jet.radius,
    }
    lines = [f"theta[{m}] = {complex(jet.value)!r}", "gradient"]
    lines += ["  " + repr(complex(x)) for x in jet.gradient]
    lines.append("Hessian matrix")
    lines += ["  " + "  ".join(repr(complex(x)) for x in row) for row in jet.hessian]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_gauss(args) -> int:
    from .boundary import bordered_gauss, find_divisor_point

    _, tau = _load(args)
    tol = _tolerances(args)
    if args.z is not None:
        z = parse_z(args.z, tau.g)
    else:
        z = find_divisor_point(tau, np.random.default_rng(args.seed))
    d = bordered_gauss(tau, z, tol)
    inside = d.numerical_rank <= args.h
    payload = {
        "z": complex_json(z),
        "residual": abs(d.theta_value),
        "local_scale": d.local_scale,
        "matrix": complex_json(d.matrix),
        "singular_values": d.singular_values.tolist(),
        "rank": d.numerical_rank,
        "h": args.h,
        "in_stratum": inside,
    }
    text = (
        f"rank D = {d.numerical_rank} (singular values "
        + " ".join(f"{s:.3e}" for s in d.singular_values)
        + f"); (2z', tau') {'lies' if inside else 'does not lie'} in the closure of theta^{args.h}_null"
    )
    _emit(args, payload, text)
    return EXIT_OK if inside else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thetanull", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", required=True, help="period matrix JSON file")
        p.add_argument("--tol-vanish", type=float, default=1e-4)
        p.add_argument("--tol-rank", type=float, default=1e-3)
        p.add_argument("--target-error", type=float, default=None)
        p.add_argument("--format", choices=["json", "text"], default="json")
        return p

    p = common(sub.add_parser("check", help="vanishing theta nulls, Hessian ranks and verdict"))
    p.add_argument("--timing", action="store_true", help="include wall time in the report")
    p.set_defaults(func=cmd_check)

    p = common(sub.add_parser("nulls", help="list vanishing even theta constants"))
    p.set_defaults(func=cmd_nulls)

    for name, func, help_ in (
        ("theta", cmd_theta, "evaluate theta[m](z, tau)"),
        ("hessian", cmd_hessian, "value, gradient and Hessian of theta[m] at z"),
    ):
        p = common(sub.add_parser(name, help=help_))
        p.add_argument("--char", default=None, help="characteristic eps/delta, e.g. 10010/10110")
        p.add_argument("--z", default=None, help="point, e.g. '0.5+0.1i,0'")
        p.set_defaults(func=func)

    p = common(sub.add_parser("gauss", help="boundary stratum test rk D <= h at a divisor point"))
    p.add_argument("--z", default=None, help="divisor point; sampled with --seed if omitted")
    p.add_argument("--h", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gauss)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"thetanull: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"thetanull: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
