"""Command-line front end.

Exit codes: 0 on success, 1 on invalid input (an error object
``{"error": {"code": ..., "message": ...}}`` is printed to stderr), 2 when a
``--verify`` check exceeds its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from .boundary import RadialDivergenceError, norm_sweep
from .charfunc import (
    CharFunctionHandle,
    NumericalCheckError,
    RootFindingError,
    rational_theta0,
    theta_gamma,
)
from .clark import (
    ClarkFamilyHandle,
    ConditioningError,
    clark_measure_report,
    clark_operator,
    rigidity_check,
    v_alpha_report,
)
from .identities import identity_suite
from .instances import SMOOTH_DENSITIES, smooth_density
from .measure import CircleMeasure, MeasureError, load_measure
from .model_space import QuadratureResolutionError

#: alpha within this distance of the circle is renormalized with a warning
ALPHA_RENORMALIZE = 1e-6
#: operator bound of the norm sweep
SWEEP_BOUND = 4.0


class CLIError(Exception):
    def __init__(self, code: str, message: str, exit_code: int = 1):
        super().__init__(message)
        self.code = code
        self.message = message
        self.exit_code = exit_code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError("usage", message)


# ---------------------------------------------------------------------------
# parsing and formatting


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` (also ``i``, ``-0.5i``, ``1``)."""
    s = text.strip().replace(" ", "")
    if not s or "j" in s:
        raise CLIError("invalid_value", "cannot parse complex number %r" % text)
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise CLIError("invalid_value", "cannot parse complex number %r" % text) from None


def format_complex(z: complex) -> str:
    re, im = float(z.real) + 0.0, float(z.imag) + 0.0  # drop negative zeros
    return "%.15g%+.15gi" % (re, im)


def _pair(z) -> list:
    return [float(np.real(z)) + 0.0, float(np.imag(z)) + 0.0]


def _gamma(text: str) -> complex:
    g = parse_complex(text)
    if not abs(g) < 1:
        raise CLIError("invalid_value", "|gamma| must be < 1")
    return g


def _alpha(text: str) -> complex:
    a = parse_complex(text)
    dev = abs(abs(a) - 1)
    if dev > ALPHA_RENORMALIZE:
        raise CLIError("invalid_value", "|alpha| must be 1 (got %r)" % abs(a))
    if dev > 0:
        print("warning: alpha renormalized to the unit circle (|alpha| - 1 = %.3g)" % (abs(a) - 1), file=sys.stderr)
        a = a / abs(a)
    return a


def load_measure_arg(source: str, grid: Optional[int] = None) -> CircleMeasure:
    """A measure JSON path, or ``builtin:NAME`` for a named measure.

    Builtin names: ``lebesgue``, ``dirac``, ``two_atoms`` and the smooth
    densities ``cos``, ``trig``, ``von_mises`` (sampled on ``grid`` points).
    """
    if source.startswith("builtin:"):
        name = source.split(":", 1)[1]
        n = grid or 4096
        if name == "lebesgue":
            return CircleMeasure.lebesgue(n)
        if name == "dirac":
            return CircleMeasure.dirac(0.0)
        if name == "two_atoms":
            return CircleMeasure([0.0, np.pi], [0.5, 0.5])
        if name in SMOOTH_DENSITIES:
            return smooth_density(name, n)
        raise CLIError("invalid_value", "unknown builtin measure %r" % name)
    path = Path(source)
    if not path.is_file():
        raise CLIError("io", "measure file not found: %s" % source)
    return load_measure(path)


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv(header: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def _verify(report: dict, keys, tol: float) -> dict:
    bad = {k: report[k] for k in keys if not report[k] <= tol}
    return {"tolerance": tol, "passed": not bad, "failed": sorted(bad)}


def _tolerance_failure(what: str) -> CLIError:
    return CLIError("tolerance_exceeded", what, 2)


# ---------------------------------------------------------------------------
# subcommands


def cmd_theta(args) -> int:
    mu = load_measure_arg(args.measure, args.grid)
    g = _gamma(args.gamma)
    if args.rational:
        if not mu.is_atomic:
            raise CLIError("invalid_value", "--rational needs a purely atomic measure")
        th = rational_theta0(mu.sorted()).mobius(g)
        _emit(_json(th.to_dict()), args.output)
        return 0
    if args.at is None:
        raise CLIError("usage", "either --at or --rational is required")
    z = parse_complex(args.at)
    if abs(z) < 1 - 1e-8:
        val = theta_gamma(mu, g, z)
    elif abs(abs(z) - 1) <= 1e-12:
        val = complex(np.asarray(CharFunctionHandle(mu, g).boundary(z)).reshape(-1)[0])
    else:
        raise CLIError("invalid_value", "--at must lie in the open disc or on the circle")
    _emit(format_complex(val) + "\n", args.output)
    return 0


def cmd_clark_measures(args) -> int:
    mu = load_measure_arg(args.measure)
    k = args.alphas
    if k < 1:
        raise CLIError("invalid_value", "--alphas must be positive")
    fam = ClarkFamilyHandle(mu)
    out = []
    for j in range(k):
        a = complex(np.exp(2j * np.pi * j / k)) if j else 1.0 + 0j
        rep = clark_measure_report(fam.theta0, a)
        d = rep.measure.to_dict()
        d["alpha"] = _pair(a)
        d["system_residual"] = rep.system_residual
        d["derivative_discrepancy"] = rep.derivative_discrepancy
        out.append(d)
    _emit(_json(out), args.output)
    return 0


def cmd_clark_operator(args) -> int:
    mu = load_measure_arg(args.measure)
    g = _gamma(args.gamma)
    op = clark_operator(mu, g, args.quad_size)
    rep = op.verify()
    rep["quad_size"] = op.model.quad_size
    rep["dimension"] = op.model.dim
    if args.matrix_out:
        Path(args.matrix_out).write_text(_json({
            "source_basis_id": op.matrix.source_basis_id,
            "target_basis_id": op.matrix.target_basis_id,
            "entries": [[_pair(x) for x in row] for row in op.matrix.entries],
        }))
    code = 0
    if args.verify:
        keys = ("unitarity_residual", "intertwining_residual", "normalization_residual")
        rep["verify"] = _verify(rep, keys, args.tol)
        code = 0 if rep["verify"]["passed"] else 2
    _emit(_json(rep), args.output)
    if code:
        raise _tolerance_failure("clark-operator residuals above %g: %s" % (args.tol, rep["verify"]["failed"]))
    return 0


def _flow_row(fam: ClarkFamilyHandle, angle: float) -> list:
    m = fam.measure(np.exp(1j * angle)).sorted()
    return [angle] + [float(a) for a in m.angles] + [float(x) for x in m.masses]


def cmd_spectral_flow(args) -> int:
    mu = load_measure_arg(args.measure)
    fam = ClarkFamilyHandle(mu)
    n = fam.mu.n_atoms
    angles = [2 * np.pi * j / args.steps for j in range(args.steps)]
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as ex:
        rows = list(ex.map(lambda t: _flow_row(fam, t), angles))
    header = ["alpha_angle"] + ["eigenvalue_angle_%d" % (i + 1) for i in range(n)]
    header += ["mass_%d" % (i + 1) for i in range(n)]
    _emit(_csv(header, rows), args.output)
    return 0


def cmd_valpha(args) -> int:
    mu = load_measure_arg(args.measure)
    a = _alpha(args.alpha)
    rep = v_alpha_report(mu, a)
    if args.verify:
        rep["verify"] = _verify(rep, ("unitarity_residual", "intertwining_residual", "normalization_residual"), args.tol)
    _emit(_json(rep), args.output)
    if args.verify and not rep["verify"]["passed"]:
        raise _tolerance_failure("V_alpha residuals above %g: %s" % (args.tol, rep["verify"]["failed"]))
    return 0


def cmd_rigidity(args) -> int:
    mu = load_measure_arg(args.measure)
    nu = load_measure_arg(args.nu)
    a = _alpha(args.alpha)
    rep = rigidity_check(mu, nu, a).to_dict()
    _emit(_json(rep), args.output)
    if args.verify and not rep["passed"]:
        raise _tolerance_failure("rigidity check failed: %s" % rep["message"])
    return 0


def _sweep_radii(args) -> list:
    if args.r_values:
        r = [float(x) for x in args.r_values.split(",")]
    else:
        k = int(round((args.r_max - args.r_min) / args.r_step))
        r = [round(args.r_min + i * args.r_step, 12) for i in range(k + 1)]
    r = [x for x in r if abs(x - 1) > 1e-9]
    if not r or min(r) < 0:
        raise CLIError("invalid_value", "radii must be nonnegative and not all equal to 1")
    return r


def cmd_norm_sweep(args) -> int:
    mu = load_measure_arg(args.measure, args.grid)
    g = _gamma(args.gamma)
    radii = _sweep_radii(args)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as ex:
        parts = list(ex.map(lambda r: norm_sweep(mu, g, [r], args.target_n)[0], radii))
    rows = [[p.r, p.norm, p.source_id, p.target_id] for p in parts]
    _emit(_csv(["r", "norm", "source_id", "target_id"], rows), args.output)
    worst = max(p.norm for p in parts)
    if args.verify and worst > SWEEP_BOUND + args.tol:
        raise _tolerance_failure("max ||T_r|| = %.6g exceeds %g" % (worst, SWEEP_BOUND))
    return 0


def cmd_identity_suite(args) -> int:
    mu = load_measure_arg(args.measure, args.grid)
    g = _gamma(args.gamma)
    grid = args.grid if not args.measure.startswith("builtin:") else None
    rows = identity_suite(mu, g, grid_n=grid, tol=args.tol)
    rep = {"gamma": _pair(g), "grid": mu.grid_size, "identities": [r.to_dict() for r in rows]}
    rep["passed"] = all(r.passed for r in rows)
    _emit(_json(rep), args.output)
    if args.verify and not rep["passed"]:
        raise _tolerance_failure("identities above tolerance: %s" % [r.name for r in rows if not r.passed])
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="clarkmodel", description="Clark measures and Clark operators.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, measure=True):
        if measure:
            sp.add_argument("--measure", required=True, help="measure JSON path or builtin:NAME")
        sp.add_argument("--output", help="write the result here instead of stdout")

    s = sub.add_parser("theta", help="evaluate theta_gamma or print its rational form")
    common(s)
    s.add_argument("--gamma", default="0")
    s.add_argument("--at", help="evaluation point a+bi")
    s.add_argument("--rational", action="store_true")
    s.add_argument("--grid", type=int, help="sample count for builtin densities")
    s.set_defaults(func=cmd_theta)

    s = sub.add_parser("clark-measures", help="Clark measures at k equispaced alphas")
    common(s)
    s.add_argument("--alphas", type=int, required=True)
    s.set_defaults(func=cmd_clark_measures)

    s = sub.add_parser("clark-operator", help="build and check Phi*_gamma")
    common(s)
    s.add_argument("--gamma", default="0")
    s.add_argument("--quad-size", type=int)
    s.add_argument("--matrix-out")
    s.add_argument("--verify", action="store_true")
    s.add_argument("--tol", type=float, default=1e-8)
    s.set_defaults(func=cmd_clark_operator)

    s = sub.add_parser("spectral-flow", help="eigenvalues and masses of U_alpha along the circle")
    common(s)
    s.add_argument("--steps", type=int, default=64)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_spectral_flow)

    s = sub.add_parser("valpha", help="check V_alpha")
    common(s)
    s.add_argument("--alpha", required=True)
    s.add_argument("--verify", action="store_true")
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_valpha)

    s = sub.add_parser("rigidity", help="rigidity check of V_alpha into L^2(nu)")
    common(s)
    s.add_argument("--nu", required=True)
    s.add_argument("--alpha", required=True)
    s.add_argument("--verify", action="store_true")
    s.set_defaults(func=cmd_rigidity)

    s = sub.add_parser("norm-sweep", help="||T_r|| into L^2(v_gamma) over r")
    common(s)
    s.add_argument("--gamma", default="0")
    s.add_argument("--r-min", type=float, default=0.5)
    s.add_argument("--r-max", type=float, default=2.0)
    s.add_argument("--r-step", type=float, default=0.1)
    s.add_argument("--r-values", help="comma separated radii (overrides the range)")
    s.add_argument("--target-n", type=int, default=1024)
    s.add_argument("--grid", type=int, help="sample count for builtin densities")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--verify", action="store_true")
    s.add_argument("--tol", type=float, default=1e-6)
    s.set_defaults(func=cmd_norm_sweep)

    s = sub.add_parser("identity-suite", help="boundary identities on the density grid")
    common(s)
    s.add_argument("--gamma", default="0")
    s.add_argument("--grid", type=int)
    s.add_argument("--verify", action="store_true")
    s.add_argument("--tol", type=float, default=1e-6)
    s.set_defaults(func=cmd_identity_suite)
    return p


#: numerical failures; under --verify they count as failed checks
_NUMERICAL = (NumericalCheckError, RootFindingError, QuadratureResolutionError, ConditioningError,
              RadialDivergenceError)


def run(argv=None) -> int:
    args = None
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CLIError as e:
        err = e
    except MeasureError as e:
        err = CLIError("schema", str(e))
    except _NUMERICAL as e:
        verify = getattr(args, "verify", False)
        err = CLIError("numerical", "%s: %s" % (type(e).__name__, e), 2 if verify else 1)
    except OSError as e:
        err = CLIError("io", str(e))
    except ValueError as e:
        err = CLIError("invalid_value", str(e))
    print(json.dumps({"error": {"code": err.code, "message": err.message}}, sort_keys=True), file=sys.stderr)
    return err.exit_code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
