"""Command-line interface.

Every command prints flat records as CSV (default) or JSON. Exit codes:
0 success, 1 usage, 2 identity or criterion failure, 3 quadrature failure,
4 fiber geometry failure.
"""

from __future__ import annotations

import argparse
import math
import os
import subprocess
import sys
from typing import Optional, Sequence

from . import acceptance, asymptotics, constants, fiber, region, spectral, thresholds
from .errors import DomainError, GeometryError, HalfspaceError, NonConvergence
from .numerics import QuadratureSpec
from .report import FORMATS, render
from .testfun import Family, gaussian

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CRITERION = 2
EXIT_QUADRATURE = 3
EXIT_GEOMETRY = 4

TOL_ENV = "HALFSPACE_TOL_REL"
DEFAULT_TOL_ABS = 1e-10
DEFAULT_TOL_REL = 1e-8
DEFAULT_RITZ_SIZE = 10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# argument types


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _finite_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def _float_list(text: str) -> tuple:
    try:
        vals = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    if not vals or not all(v > 0 and math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"values must be positive: {text!r}")
    return vals


def _dim_range(text: str) -> tuple:
    lo, sep, hi = text.partition("..")
    try:
        lo_i, hi_i = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}")
    if not sep or lo_i > hi_i:
        raise argparse.ArgumentTypeError(f"expected LO..HI with LO <= HI, got {text!r}")
    return lo_i, hi_i


def _stepped_range(text: str) -> tuple:
    """'lo:hi:step' -> (lo, hi, number of points)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected lo:hi:step, got {text!r}")
    lo, hi, step = (_finite_float(p) for p in parts)
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"need step > 0 and lo <= hi, got {text!r}")
    n = round((hi - lo) / step)
    if abs(lo + n * step - hi) > 1e-9 * max(1.0, abs(hi)):
        raise argparse.ArgumentTypeError(f"step does not divide the range: {text!r}")
    return lo, hi, n + 1


def _tol_rel_default() -> float:
    env = os.environ.get(TOL_ENV)
    if env is None:
        return DEFAULT_TOL_REL
    try:
        return _positive_float(env)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"{TOL_ENV}: {exc}")


# ---------------------------------------------------------------------------
# commands; each returns (records, columns, exit status)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b else abs(a - b)


def cmd_constants(args, spec: QuadratureSpec):
    N = args.dim
    if not 3 <= N <= constants.N_MAX:
        raise UsageError(f"--dim must lie in [3, {constants.N_MAX}]")
    cols = ["N", "quantity", "value", "alt_value", "rel_delta", "tolerance", "passed"]
    rows = []

    def add(name, value, alt=None, tol=None, delta=None):
        if alt is not None and delta is None:
            delta = _rel(value, alt)
        passed = None if tol is None else bool(delta <= tol)
        rows.append(dict(N=N, quantity=name, value=value, alt_value=alt, rel_delta=delta, tolerance=tol, passed=passed))

    bc = constants.bubble_constants(N, spec)
    add("K1", bc.K1)
    add("K2", bc.K2)
    add("K3", bc.K3)
    add("K1-K2-K3", bc.K1 - bc.K2 - bc.K3, 0.0, 1e-6, abs(bc.identity_residual))
    add("A", bc.A, bc.A_alt, 1e-6)
    tc = constants.trace_constants(N, spec)
    add("A_N", tc.A_N)
    add("B_N", tc.B_N)
    add("S0", tc.S0)
    add("theta(tau=1)", constants.theta_of_tau(N, 1.0, spec))
    if N >= 4:
        ec = constants.expansion_coefficients(N, spec)
        paired = {"C3", "C6", "alpha_hat_N", "d_hat_N", "gamma_hat_N"}
        for name in (
            "C1", "C2", "C3", "C4", "C5", "C6", "C2_lower", "C4_lower", "D1", "D2", "D3", "D4",
            "alpha_N", "beta_N", "gamma_N", "d_N", "alpha_hat_N", "d_hat_N", "gamma_hat_N", "xi_N",
        ):
            v = getattr(ec, name)
            if v is None:
                continue
            alt = getattr(ec, name + "_closed", None) if name in paired else None
            if alt is not None and v is not None:
                add(name, v, alt, 1e-6)
            else:
                add(name, v)
        if N >= 5:
            add("(alpha_hat+xi)/d_hat", (ec.alpha_hat_N + ec.xi_N) / ec.d_hat_N, thresholds.lambda_hat(N), 1e-4)
    ok = all(r["passed"] is not False for r in rows)
    return rows, cols, EXIT_OK if ok else EXIT_CRITERION


def cmd_thresholds(args, spec: QuadratureSpec):
    lo, hi = args.dim_range
    if lo < 3 or hi > constants.N_MAX:
        raise UsageError(f"--dim-range must lie within 3..{constants.N_MAX}")
    cols = ["N", "lambda_bar", "lambda_hat", "lambda_star", "lower_bound", "upper_bound",
            "chain_checks", "failed_checks", "all_satisfied"]
    rows = []
    for N in range(lo, hi + 1):
        rep = thresholds.threshold_report(N, spec)
        failed = ";".join(c.name for c in rep.chain_checks if not c.satisfied)
        rows.append(dict(
            N=N, lambda_bar=rep.lambda_bar, lambda_hat=rep.lambda_hat, lambda_star=rep.lambda_star,
            lower_bound=rep.lower_bound, upper_bound=rep.upper_bound,
            chain_checks=len(rep.chain_checks), failed_checks=failed, all_satisfied=rep.all_satisfied,
        ))
    ok = all(r["all_satisfied"] for r in rows)
    return rows, cols, EXIT_OK if ok else EXIT_CRITERION


def cmd_asymptotics(args, spec: QuadratureSpec):
    N, fam, quantity, q = args.dim, args.family, args.quantity, args.q
    eps = args.eps or asymptotics.DEFAULT_GRID
    cols = ["N", "family", "quantity", "q", "item", "eps", "value", "reference", "rel_dev", "tolerance", "passed"]
    base = dict(N=N, family=fam, quantity=quantity, q=q)
    rows = []
    data = asymptotics.sweep(quantity, fam, N, q, eps, spec)
    for e, v in data:
        rows.append(dict(base, item="data", eps=e, value=v))
    model, key = asymptotics.predicted_model(quantity, fam, N, q, spec)
    f = asymptotics.fit(data, model)
    tol = None if key is None else asymptotics.TOLERANCES[key]
    passed = None if (tol is None or f.rel_dev is None) else bool(f.rel_dev <= tol)
    rows.append(dict(base, item=f"fit:{model.kind.value}", value=f.fitted, reference=f.predicted,
                     rel_dev=f.rel_dev, tolerance=tol, passed=passed))
    if N == 3 and Family(fam) is Family.v_eps:
        rep = asymptotics.verify_envelope_bounds(eps, spec)
        for e, E, up, up_ok, P, low, low_ok in rep.rows:
            rows.append(dict(base, item="E<upper_bound", eps=e, value=E, reference=up, passed=up_ok))
            rows.append(dict(base, item="P>=lower_bound", eps=e, value=P, reference=low, passed=low_ok))
        rows.append(dict(base, item="d1", value=rep.d1, passed=rep.d1 > 0))
        rows.append(dict(base, item="d2", value=rep.d2, passed=rep.d2 > 0))
    ok = all(r.get("passed") is not False for r in rows)
    return rows, cols, EXIT_OK if ok else EXIT_CRITERION


def cmd_fiber(args, spec: QuadratureSpec):
    eps = args.eps or fiber.DEFAULT_CONDITION_EPS
    check = fiber.check_condition_a1 if args.a == 1 else fiber.check_condition_a0
    rep = check(args.dim, args.lam, args.mu, args.q, eps, spec, threads=args.threads)
    cols = ["N", "a", "q", "lambda", "mu", "family", "form", "kind", "eps", "level", "target",
            "margin", "margin_over_eps2", "passes"]
    base = dict(N=rep.N, a=rep.a, q=rep.q, family=rep.family, form=rep.form)
    base["lambda"], base["mu"] = rep.lam, rep.mu
    rows = [
        dict(base, kind="eps", eps=r.eps, level=r.level, target=r.target, margin=r.margin,
             margin_over_eps2=m, passes=r.passes)
        for r, m in zip(rep.rows, rep.normalized_margins)
    ]
    rows.append(dict(base, kind="trend", passes=rep.met))
    # a failing condition is a finding, not an error
    return rows, cols, EXIT_OK


def cmd_eigen(args, spec: QuadratureSpec):
    N = args.dim
    cols = ["N", "kind", "size", "value", "reference", "passed"]
    rq = spectral.rayleigh_volume(gaussian(N), spec)
    rows = [dict(N=N, kind="lambda1", size=None, value=rq, reference=N / 2, passed=_rel(rq, N / 2) <= 1e-8)]
    est = spectral.estimate_mu1(N, args.basis_size, spec)
    prev = math.inf
    for size, mu in est.history:
        rows.append(dict(N=N, kind="mu1_upper", size=size, value=mu, passed=mu <= prev))
        prev = mu
    ok = all(r["passed"] for r in rows)
    return rows, cols, EXIT_OK if ok else EXIT_CRITERION


def cmd_region(args, spec: QuadratureSpec):
    N, a, q = args.dim, args.a, args.q
    template = region.ProblemParams(N, a, q)
    upper = args.mu1_upper
    if upper is None:
        upper = spectral.estimate_mu1(N, DEFAULT_RITZ_SIZE).value
    mu1 = region.Mu1Bracket(args.mu1_lower, upper)
    L = thresholds.lambda_bar(N, spec) if a == 1 else thresholds.lambda_hat(N)
    llo, lhi, ln = args.lambda_range
    mlo, mhi, mn = args.mu_range
    grid = region.emit_grid(template, (llo, lhi), (mlo, mhi), (ln, mn), mu1, L, args.threads)
    cols = ["N", "a", "q", "lambda", "mu", "verdict", "clause"]
    return [r.record() for r in grid], cols, EXIT_OK


def _parse_criteria(text: str) -> tuple:
    out = set()
    for part in text.split(","):
        lo, sep, hi = part.partition("-")
        try:
            rng = range(int(lo), int(hi) + 1) if sep else [int(lo)]
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad criterion list {text!r}")
        out.update(rng)
    if not out or not out <= set(range(1, 11)):
        raise argparse.ArgumentTypeError("criteria are numbered 1..10")
    return tuple(sorted(out))


def _rerun_args(args) -> list:
    sub = [c for c in args.criteria if c != 10]
    return [
        sys.executable, "-m", "halfspace", "verify-all", "--threads", "1",
        "--criteria", ",".join(str(c) for c in sub),
        "--tol-abs", repr(args.tol_abs), "--tol-rel", repr(args.tol_rel),
        "--seed", str(args.seed), "--format", args.format,
    ]


def cmd_verify_all(args, spec: QuadratureSpec):
    cols = ["criterion", "title", "check", "passed", "value", "bound", "note"]
    rows = []
    summary = []
    for k in args.criteria:
        if k == 10:
            continue
        res = acceptance.run_criterion(k, spec, args.seed, args.threads)
        for c in res.checks:
            rows.append(dict(criterion=k, title=res.title, check=c.label, passed=c.passed,
                             value=c.value, bound=c.bound, note=c.note))
        summary.append((k, res.title, res.passed))
    if 10 in args.criteria:
        outs = [subprocess.run(_rerun_args(args), capture_output=True, check=False) for _ in range(2)]
        same = outs[0].stdout == outs[1].stdout and outs[0].returncode == outs[1].returncode
        ok = same and bool(outs[0].stdout)
        rows.append(dict(criterion=10, title="determinism", check="two reruns byte-identical", passed=ok,
                         value=float(len(outs[0].stdout)), note="bytes"))
        summary.append((10, "determinism", ok))
    for k, title, ok in summary:
        rows.append(dict(criterion=k, title=title, check="(all)", passed=ok))
        print(f"criterion {k:2d} {'PASS' if ok else 'FAIL'}  {title}", file=sys.stderr)
    return rows, cols, EXIT_OK if all(ok for _, _, ok in summary) else EXIT_CRITERION


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--tol-abs", type=_positive_float, default=DEFAULT_TOL_ABS, help="absolute quadrature tolerance")
    g.add_argument("--tol-rel", type=_positive_float, default=None,
                   help=f"relative quadrature tolerance (default ${TOL_ENV} or {DEFAULT_TOL_REL:g})")
    g.add_argument("--threads", type=_positive_int, default=1, help="worker threads (1 = bit-reproducible)")
    g.add_argument("--format", choices=FORMATS, default="csv")
    g.add_argument("--out", default=None, help="output file (default: standard output)")
    g.add_argument("--seed", type=int, default=0, help="seed for randomized suites")

    p = _Parser(prog="halfspace", description="Numerics for a critical Neumann problem in the half-space.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("constants", parents=[common], help="bubble, trace and expansion constants")
    s.add_argument("--dim", type=int, required=True)
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("thresholds", parents=[common], help="existence thresholds and bound chains")
    s.add_argument("--dim-range", type=_dim_range, required=True, metavar="LO..HI")
    s.set_defaults(func=cmd_thresholds)

    s = sub.add_parser("asymptotics", parents=[common], help="ε-sweeps and expansion fits")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--family", choices=[f.value for f in (Family.u_eps, Family.v_eps, Family.uhat_eps, Family.vhat_eps)],
                   required=True)
    s.add_argument("--quantity", choices=[q.value for q in asymptotics.Quantity], required=True)
    s.add_argument("--q", type=_finite_float, default=2.0)
    s.add_argument("--eps", type=_float_list, default=None, metavar="LIST")
    s.set_defaults(func=cmd_asymptotics)

    s = sub.add_parser("fiber", parents=[common], help="mountain-pass level condition checks")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--a", type=int, choices=(0, 1), required=True)
    s.add_argument("--lambda", dest="lam", type=_finite_float, required=True)
    s.add_argument("--mu", type=_finite_float, default=0.0)
    s.add_argument("--q", type=_finite_float, default=2.0)
    s.add_argument("--eps", type=_float_list, default=None, metavar="LIST")
    s.set_defaults(func=cmd_fiber)

    s = sub.add_parser("eigen", parents=[common], help="λ1 check and Ritz bounds for μ1")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--basis-size", type=_positive_int, default=8)
    s.set_defaults(func=cmd_eigen)

    s = sub.add_parser("region", parents=[common], help="(λ, μ) classification grid")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--a", type=int, choices=(0, 1), required=True)
    s.add_argument("--q", type=_finite_float, required=True)
    s.add_argument("--lambda-range", type=_stepped_range, required=True, metavar="LO:HI:STEP")
    s.add_argument("--mu-range", type=_stepped_range, required=True, metavar="LO:HI:STEP")
    s.add_argument("--mu1-lower", type=_finite_float, default=0.0)
    s.add_argument("--mu1-upper", type=_finite_float, default=None,
                   help=f"default: Ritz bound with {DEFAULT_RITZ_SIZE} basis functions")
    s.set_defaults(func=cmd_region)

    s = sub.add_parser("verify-all", parents=[common], help="run the acceptance suite")
    s.add_argument("--criteria", type=_parse_criteria, default=tuple(range(1, 11)), metavar="LIST",
                   help="e.g. 1-9 or 1,4,7 (default 1-10)")
    s.set_defaults(func=cmd_verify_all)
    return p


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


_RANGE_FLAGS = ("--lambda-range", "--mu-range")


def _glue_ranges(argv: Sequence[str]) -> list:
    # argparse takes "-1:1:0.1" for an option; bind it to its flag first
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _RANGE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_glue_ranges(sys.argv[1:] if argv is None else argv))
    try:
        if args.tol_rel is None:
            args.tol_rel = _tol_rel_default()
        spec = QuadratureSpec(abs_tol=args.tol_abs, rel_tol=args.tol_rel)
        rows, cols, status = args.func(args, spec)
    except (UsageError, DomainError) as exc:
        print(f"halfspace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergence as exc:
        print(f"halfspace: quadrature failure: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE
    except GeometryError as exc:
        print(f"halfspace: geometry failure: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except HalfspaceError as exc:
        print(f"halfspace: check failed: {exc}", file=sys.stderr)
        return EXIT_CRITERION
    _emit(render(rows, args.format, cols), args.out)
    return status


if __name__ == "__main__":
    sys.exit(main())
