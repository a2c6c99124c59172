"""Command-line interface: ``bergman-sf <command> ...``.

Single results are printed as JSON with sorted keys, tables as CSV with a
header row.  Floats carry 17 significant digits.  Exit codes: 0 success,
1 invalid input, 2 numerical non-convergence, 3 failed verification.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError, InsufficientDataError, InvariantFailure, NonConvergenceError

EXIT_OK, EXIT_INPUT, EXIT_NONCONV, EXIT_VERIFY = 0, 1, 2, 3


class _InputError(Exception):
    pass


@dataclass
class CommandResult:
    command: str
    params: dict
    outputs: dict = field(default_factory=dict)
    status: str = "ok"
    table: tuple | None = None  # (header, rows) for CSV output

    def to_json(self) -> str:
        doc = {"command": self.command, "params": self.params, "status": self.status}
        doc.update(self.outputs)
        return dumps(doc)

    def to_csv(self) -> str:
        header, rows = self.table
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt_cell(x) for x in r])
        return buf.getvalue()


def _fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _fmt_cell(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return _fmt_float(x) if math.isfinite(x) else ""
    return str(x)


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        # non-finite numbers are not JSON; callers flag them in status
        return _fmt_float(v) if math.isfinite(v) else "null"
    if isinstance(v, str):
        return _json_str(v)
    if isinstance(v, dict):
        items = sorted(v.items())
        return "{" + ", ".join(f"{_json_str(str(k))}: {_json_value(x)}" for k, x in items) + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _json_str(s: str) -> str:
    return json.dumps(s)


def dumps(doc) -> str:
    """Deterministic JSON: sorted keys, 17-digit floats, no NaN or Inf."""
    return _json_value(doc)


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def _params(args):
    from .interaction import SpaceParams

    return SpaceParams(args.N, args.alpha)


def read_angles(path: str) -> list:
    """One decimal radian per line; '#' starts a comment."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise _InputError(f"cannot read {path}: {exc}") from exc
    out = []
    for no, raw in enumerate(lines, 1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            x = float(text)
        except ValueError as exc:
            raise _InputError(f"{path}:{no}: not a decimal radian value: {text!r}") from exc
        if not math.isfinite(x):
            raise _InputError(f"{path}:{no}: angle must be finite")
        out.append(x)
    if not out:
        raise _InputError(f"{path}: no angles")
    return out


def _int_list(text: str) -> list:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_phi(args) -> CommandResult:
    from .interaction import build_series, phi_closed_n2a3, phi_quadrature

    p = _params(args)
    params = {"N": p.N, "alpha": p.alpha, "method": args.method, "tol": args.tol}
    if args.method == "closed" and not (p.N == 2 and p.alpha == 3.0):
        raise DomainError("the closed log form is available for N=2, alpha=3 only")

    series = build_series(p, args.tol) if args.method == "series" else None

    def one(t):
        if args.method == "series":
            v, e = series.evaluate(np.array([t]))
            return float(v[0]), float(e[0])
        if args.method == "quadrature":
            r = phi_quadrature(p, t)
            return r.value, r.err
        return phi_closed_n2a3(t), 1e-9

    if args.table is not None:
        if args.table < 2:
            raise DomainError("--table needs at least 2 samples")
        params["samples"] = args.table
        ts = np.linspace(0.0, math.pi, args.table)
        if args.method == "series":
            vals, errs = series.evaluate(ts)
            rows = [(t, v, e) for t, v, e in zip(ts, vals, errs)]
        else:
            rows = [(t, *one(t)) for t in ts]
        return CommandResult("phi", params, table=(("theta", "value", "err"), rows))
    params["theta"] = args.theta
    v, e = one(args.theta)
    return CommandResult("phi", params, {"value": v, "err": e})


def cmd_minimize(args) -> CommandResult:
    from .optimize import npoint_minimize

    p = _params(args)
    r = npoint_minimize(p, args.n, starts=args.starts, seed=args.seed)
    params = {"N": p.N, "alpha": p.alpha, "n": args.n, "starts": args.starts, "seed": args.seed}
    return CommandResult("minimize", params, {
        "value": r.energy,
        "err": r.energy_err,
        "angles": list(r.config.angles),
        "norm_sq": r.norm_sq,
        "equi_energy": r.equi_energy,
        "below_equidistribution": r.below_equidistribution,
        "iterations": r.iterations,
        "n_starts": r.n_starts,
    })


def cmd_norm(args) -> CommandResult:
    from .interaction import cached_series
    from .norms import (
        CircleConfig,
        config_energy_interaction,
        config_norm_sq_powersum,
        psi_norm_sq,
    )

    p = _params(args)
    params = {"N": p.N, "alpha": p.alpha, "kind": args.kind}
    if args.kind == "psi":
        if args.n is None:
            raise _InputError("norm psi needs --n")
        params["n"] = args.n
        primary = psi_norm_sq(p, args.n)
        cfg = CircleConfig.equidistributed(args.n)
    else:
        if args.angles_file is None:
            raise _InputError("norm config needs --angles-file")
        params["angles_file"] = args.angles_file
        cfg = CircleConfig.from_angles(read_angles(args.angles_file))
        primary = config_norm_sq_powersum(p, cfg)
    phi0, e0 = cached_series(p).evaluate(np.array([0.0]))
    inter = config_energy_interaction(p, cfg)
    second = cfg.n * float(phi0[0]) + inter.value
    second_err = cfg.n * float(e0[0]) + inter.err
    return CommandResult("norm", params, {
        "value": primary.value,
        "err": primary.err,
        "pair_energy_value": second,
        "pair_energy_err": second_err,
        "discrepancy": primary.value - second,
    })


def cmd_asymptotics(args) -> CommandResult:
    from .norms import asymptotic_limit_constant, scaled_norm_sequence

    p = _params(args)
    lim = asymptotic_limit_constant(p)
    if any(n < 1 for n in args.n_list):
        raise DomainError("n must be positive")
    rows = [(n, v, lim, v / lim) for n, v in scaled_norm_sequence(p, args.n_list)]
    params = {"N": p.N, "alpha": p.alpha, "n_list": args.n_list}
    return CommandResult("asymptotics", params, table=(("n", "scaled_value", "limit", "ratio"), rows))


def cmd_verify(args) -> CommandResult:
    from .checks import run_suite

    checks = run_suite(args.suite)
    rows = [(c.name, c.relation, c.expected, c.got, c.tol, "pass" if c.passed else "fail")
            for c in checks]
    ok = all(c.passed for c in checks)
    return CommandResult("verify", {"suite": args.suite}, status="pass" if ok else "fail",
                         table=(("check", "relation", "expected", "got", "tol", "status"), rows))


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _space_args(sp):
    sp.add_argument("--N", type=int, default=2, help="pole order (default 2)")
    sp.add_argument("--alpha", type=float, default=3.0, help="weight exponent (default 3)")


def build_parser() -> argparse.ArgumentParser:
    from .checks import SUITES

    ap = _Parser(prog="bergman-sf", description=__doc__.splitlines()[0])
    ap.add_argument("--backend", choices=_kernels.BACKENDS,
                    help="kernel implementation (default: numba when importable)")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("phi", help="interaction function")
    _space_args(sp)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--theta", type=float, help="angle in radians")
    g.add_argument("--table", type=int, metavar="SAMPLES", help="CSV over [0, pi]")
    sp.add_argument("--method", choices=("series", "quadrature", "closed"), default="series")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.set_defaults(func=cmd_phi)

    sp = sub.add_parser("minimize", help="minimise the pair energy of n poles")
    _space_args(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--starts", type=int, default=64)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_minimize)

    sp = sub.add_parser("norm", help="squared norm by two formulas")
    sp.add_argument("kind", choices=("psi", "config"))
    _space_args(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--angles-file")
    sp.set_defaults(func=cmd_norm)

    sp = sub.add_parser("asymptotics", help="scaled norms of the equidistributed sum")
    _space_args(sp)
    sp.add_argument("--n-list", type=_int_list, required=True)
    sp.set_defaults(func=cmd_asymptotics)

    sp = sub.add_parser("verify", help="run a suite of numeric checks")
    sp.add_argument("--suite", choices=sorted(SUITES), default="paper")
    sp.set_defaults(func=cmd_verify)
    return ap


def _error_doc(command, message, status):
    return dumps({"command": command, "params": {}, "status": status, "error": message})


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:  # usage errors (exit 1) and --help (exit 0)
        return int(exc.code or 0)
    if args.backend:
        _kernels.set_backend(args.backend)
    try:
        res = args.func(args)
    except (DomainError, InsufficientDataError, _InputError, ValueError) as exc:
        print(_error_doc(args.command, str(exc), "error"))
        return EXIT_INPUT
    except NonConvergenceError as exc:
        print(_error_doc(args.command, str(exc), "nonconvergence"))
        return EXIT_NONCONV
    except InvariantFailure as exc:
        print(_error_doc(args.command, str(exc), "fail"))
        return EXIT_VERIFY
    sys.stdout.write(res.to_csv() if res.table is not None else res.to_json() + "\n")
    if res.status == "fail":
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
