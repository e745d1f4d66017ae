"""Command-line interface.

Subcommands: expand-root, expand-pole, integrate, find-roots, lam3,
residual, symmetry, verify, bounds, reproduce-appendix.  Flags may also be
given in a key=value config file (--config PATH); explicit flags override
file values.  P3_LOG in {error, info, debug} controls diagnostics on
standard error.  Exit codes: 0 success, 1 computation failure, 2 invalid
flags, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import acceptance, io
from .bounds import convergence_bounds
from .equation import DomainError, EquationParams, InvalidParametersError, RootAnchor, SignSwitch, third_derivative
from .ode import IntegrationError, RootInfo, find_roots, integrate, lam3_at_root, residual_scan, symmetry_check
from .poles import root_to_pole
from .series import assemble_lambda, run_scheme, series_eval

log = logging.getLogger("p3prime")

_COMMANDS = (
    "expand-root",
    "expand-pole",
    "integrate",
    "find-roots",
    "lam3",
    "residual",
    "symmetry",
    "verify",
    "bounds",
    "reproduce-appendix",
)


@dataclass
class RunConfig:
    """Validated inputs of one CLI invocation."""

    command: str
    params: EquationParams | None
    anchor: RootAnchor | None
    cauchy: tuple | None
    lam3_given: bool
    order: int
    span: tuple | None
    rel_tol: float
    abs_tol: float
    alpha: float
    seed: int
    out: str
    fmt: str


class UsageError(Exception):
    pass


def _setup_logging() -> None:
    level = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("P3_LOG", "error"), logging.ERROR
    )
    logging.basicConfig(stream=sys.stderr, level=level, format="p3prime: %(message)s")


def _parse_span(text: str) -> tuple:
    try:
        a, b = text.split(":")
        return (float(a), float(b))
    except ValueError as exc:
        raise UsageError(f"--span expects A:B, got {text!r}") from exc


def _read_config(path: str) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"config line without '=': {line!r}")
            key, val = line.split("=", 1)
            values[key.strip().replace("_", "-")] = val.strip()
    return values


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="p3prime", description=__doc__, add_help=True)
    ap.add_argument("command", choices=_COMMANDS)
    ap.add_argument("--config", default=None, help="key=value file; flags override it")
    ap.add_argument("--chi0", type=float, default=None)
    ap.add_argument("--chiinf", type=float, default=None)
    ap.add_argument("--t0", type=float, default=None)
    ap.add_argument("--sgn", type=str, default=None, help="+1 or -1")
    ap.add_argument("--lam3", type=float, default=None)
    ap.add_argument("--order", type=int, default=None)
    ap.add_argument("--span", type=str, default=None, help="A:B")
    ap.add_argument("--cauchy", type=str, default=None, help="T:LAM:LAMDOT initial data")
    ap.add_argument("--rel-tol", type=float, default=None)
    ap.add_argument("--abs-tol", type=float, default=None)
    ap.add_argument("--alpha", type=float, default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--out", type=str, default=None)
    ap.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
    return ap


_HARD_DEFAULTS = {
    "order": 5,
    "rel_tol": 1e-10,
    "abs_tol": 1e-12,
    "alpha": 0.5,
    "seed": acceptance.DEFAULT_SEED,
    "out": "p3prime_out",
    "fmt": "json",
}


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset flags (all default to None) from the config file, then
    apply the hard defaults; explicit flags therefore always win."""
    if args.config is not None:
        file_vals = _read_config(args.config)
        typed = {
            "chi0": float, "chiinf": float, "t0": float, "sgn": str, "lam3": float,
            "order": int, "span": str, "cauchy": str, "rel-tol": float, "abs-tol": float,
            "alpha": float, "seed": int, "out": str, "format": str,
        }
        for key, raw in file_vals.items():
            if key not in typed:
                raise UsageError(f"unknown config key {key!r}")
            attr = {"rel-tol": "rel_tol", "abs-tol": "abs_tol", "format": "fmt"}.get(
                key, key.replace("-", "_")
            )
            if getattr(args, attr) is None:
                setattr(args, attr, typed[key](raw))
    for attr, value in _HARD_DEFAULTS.items():
        if getattr(args, attr) is None:
            setattr(args, attr, value)
    return args


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    params = None
    if args.chi0 is not None or args.chiinf is not None:
        if args.chi0 is None or args.chiinf is None:
            raise UsageError("--chi0 and --chiinf must be given together")
        params = EquationParams(args.chi0, args.chiinf)
    anchor = None
    if args.t0 is not None or args.sgn is not None or args.lam3 is not None:
        if args.t0 is None or args.sgn is None:
            raise UsageError("--t0 and --sgn must be given together")
        if args.t0 == 0:
            raise UsageError("--t0 must be nonzero")
        try:
            sgn = int(args.sgn)
        except ValueError as exc:
            raise UsageError(f"--sgn must be +1 or -1, got {args.sgn!r}") from exc
        if sgn not in (-1, 1):
            raise UsageError(f"--sgn must be +1 or -1, got {sgn}")
        anchor = RootAnchor(args.t0, SignSwitch(sgn), args.lam3 if args.lam3 is not None else 0.0)
    cauchy = None
    if args.cauchy is not None:
        parts = args.cauchy.split(":")
        if len(parts) != 3:
            raise UsageError("--cauchy expects T:LAM:LAMDOT")
        cauchy = tuple(float(x) for x in parts)
    span = _parse_span(args.span) if args.span is not None else None
    if args.order < 0:
        raise UsageError("--order must be >= 0")
    return RunConfig(
        command=args.command,
        params=params,
        anchor=anchor,
        cauchy=cauchy,
        lam3_given=args.lam3 is not None,
        order=args.order,
        span=span,
        rel_tol=args.rel_tol,
        abs_tol=args.abs_tol,
        alpha=args.alpha,
        seed=args.seed,
        out=args.out,
        fmt=args.fmt,
    )


def _need(cfg: RunConfig, params=False, anchor=False, span=False, initial=False) -> None:
    if params and cfg.params is None:
        raise UsageError(f"{cfg.command} requires --chi0 and --chiinf")
    if anchor and cfg.anchor is None:
        raise UsageError(f"{cfg.command} requires --t0, --sgn and --lam3")
    if span and cfg.span is None:
        raise UsageError(f"{cfg.command} requires --span A:B")
    if initial and cfg.cauchy is None and cfg.anchor is None:
        raise UsageError(f"{cfg.command} requires --cauchy T:LAM:LAMDOT (or an anchor)")


def _integrate_from_cfg(cfg: RunConfig):
    if cfg.cauchy is not None:
        t_i, lam_i, lamdot_i = cfg.cauchy
    else:
        # launch just off the anchored root using the local expansion
        a = cfg.anchor
        lam3s, _ = run_scheme(a, cfg.params, max(cfg.order, 3))
        lam = assemble_lambda(a, lam3s, cfg.params)
        dt = 0.01 * abs(a.t0)
        t_i = a.t0 + dt
        lam_i = series_eval(lam, dt)
        from .series import series_eval_derivative

        lamdot_i = series_eval_derivative(lam, dt)
    return integrate(cfg.params, t_i, lam_i, lamdot_i, cfg.span, cfg.rel_tol, cfg.abs_tol)


def cmd_expand(cfg: RunConfig) -> int:
    """expand-root / expand-pole: write series (or Laurent) JSON + curve CSV."""
    _need(cfg, params=True, anchor=True)
    if not cfg.lam3_given:
        raise UsageError(f"{cfg.command} requires --lam3")
    a, p = cfg.anchor, cfg.params
    base = cfg.out
    if cfg.command == "expand-root":
        lam3s, _ = run_scheme(a, p, cfg.order)
        lam = assemble_lambda(a, lam3s, p)
        with open(base + ".json", "w", encoding="utf-8") as fh:
            fh.write(io.series_to_json(lam3s, p))
        dts = np.linspace(-0.3 * abs(a.t0), 0.3 * abs(a.t0), 601)
        io.write_csv(
            base + ".csv",
            ["t", "lambda"],
            ((a.t0 + dt, series_eval(lam, dt)) for dt in dts),
        )
    else:
        le = root_to_pole(a, p, cfg.order)
        with open(base + ".json", "w", encoding="utf-8") as fh:
            fh.write(io.laurent_to_json(le, p, a.s, a.lam3))
        mags = np.linspace(0.02 * abs(a.t0), 0.3 * abs(a.t0), 300)
        dts = np.concatenate([-mags[::-1], mags])
        io.write_csv(
            base + ".csv",
            ["t", "lambda"],
            ((a.t0 + dt, le.eval(dt)) for dt in dts),
        )
    log.info("wrote %s.json and %s.csv", base, base)
    return 0


def cmd_analyze(cfg: RunConfig) -> int:
    """integrate / find-roots / lam3 / residual / symmetry."""
    _need(cfg, params=True, span=True, initial=True)
    sol = _integrate_from_cfg(cfg)
    base = cfg.out
    if cfg.command == "integrate":
        grid = np.linspace(sol.t_min, sol.t_max, 2001)
        io.dense_solution_to_csv(sol, grid, base + ".csv")
        log.info("wrote %s.csv", base)
        return 0
    roots = find_roots(sol)
    if cfg.command in ("find-roots", "lam3"):
        if cfg.command == "lam3":
            roots = [RootInfo(r.t0, r.sgn, lam3_at_root(sol, r, cfg.params)) for r in roots]
        if cfg.fmt == "csv":
            io.write_csv(
                base + ".csv",
                ["t0", "sgn", "lam3"],
                ((r.t0, r.sgn, float("nan") if r.lam3 is None else r.lam3) for r in roots),
            )
        else:
            with open(base + ".json", "w", encoding="utf-8") as fh:
                fh.write(io.roots_to_json(roots))
        print(io.roots_to_json(roots), end="")
        return 0
    if cfg.command == "residual":
        lo = sol.t_min + 0.02 * (sol.t_max - sol.t_min)
        hi = sol.t_max - 0.02 * (sol.t_max - sol.t_min)
        grid = [
            t
            for t in np.linspace(lo, hi, 401)
            if all(abs(t - r.t0) > 0.02 * (hi - lo) for r in roots)
        ]
        rows = residual_scan(sol, grid, fd_step=0.005)
        io.write_csv(base + ".csv", ["t", "residual"], rows)
        print(f"max |residual| = {max(abs(r) for _, r in rows):.3e}")
        return 0
    if cfg.command == "symmetry":
        lo, hi = sol.t_min, sol.t_max
        pad = 0.05 * (hi - lo)
        grid = [
            t
            for t in np.linspace(lo + pad, hi - pad, 41)
            if all(abs(t - r.t0) > 0.05 * (hi - lo) for r in roots)
        ]
        dev = symmetry_check(sol, cfg.params, grid)
        print(f"max |t/lambda - lambda_swapped| = {dev:.3e}")
        return 0
    raise UsageError(f"unhandled command {cfg.command}")


def cmd_verify(cfg: RunConfig) -> int:
    """verify / bounds / reproduce-appendix."""
    if cfg.command == "bounds":
        _need(cfg, params=True, anchor=True)
        bs = convergence_bounds(cfg.anchor, cfg.params, cfg.alpha)
        obj = {k: getattr(bs, k) for k in (
            "M_lambda", "M_mu", "B_mu_lambda", "B_mu_mu", "B_xi_lambda", "B_xi_mu",
            "Q1", "Q2", "beta", "alpha", "alpha_tilde",
        )}
        print(json.dumps(obj, indent=2))
        return 0
    if cfg.command == "verify":
        results = acceptance.run_all(cfg.seed)
        for r in results:
            print(r.line())
        failures = [r for r in results if not r.passed]
        for r in failures:
            print(f"FAILED: {r.name}: {r.detail}", file=sys.stderr)
        return 3 if failures else 0
    if cfg.command == "reproduce-appendix":
        return _reproduce_appendix(cfg)
    raise UsageError(f"unhandled command {cfg.command}")


def _reproduce_appendix(cfg: RunConfig) -> int:
    """Regenerate the worked example: solution curve, residual scan, third
    derivative curve, overlap curves, and the root/lam3 table."""
    outdir = cfg.out
    os.makedirs(outdir, exist_ok=True)
    p = acceptance.REF_PARAMS
    t_c, lam_c, lamdot_c = acceptance.REF_CAUCHY
    sol = integrate(p, t_c, lam_c, lamdot_c, acceptance.REF_SPAN, cfg.rel_tol, cfg.abs_tol)
    roots = find_roots(sol)
    filled = [RootInfo(r.t0, r.sgn, lam3_at_root(sol, r, p)) for r in roots]

    grid = np.linspace(sol.t_min, sol.t_max, 4001)
    io.write_csv(
        os.path.join(outdir, "fig1.csv"), ["t", "lambda"], ((t, sol.lam(float(t))) for t in grid)
    )

    lo, hi = 0.02, 1.99
    rgrid = [
        t
        for t in np.linspace(lo, hi, 801)
        if all(abs(t - r.t0) > 0.01 for r in roots)
    ]
    rows = residual_scan(sol, rgrid, fd_step=0.002)
    io.write_csv(os.path.join(outdir, "fig2.csv"), ["t", "residual"], rows)

    tgrid = [t for t in np.linspace(0.3, 1.9, 801) if abs(sol.lam(float(t))) > 1e-3]
    io.write_csv(
        os.path.join(outdir, "fig3.csv"),
        ["t", "lambda_dddot"],
        ((t, third_derivative(float(t), *sol.state(float(t)), p)) for t in tgrid),
    )

    a1 = RootAnchor(filled[4].t0, SignSwitch(filled[4].sgn), filled[4].lam3)
    a2 = RootAnchor(filled[5].t0, SignSwitch(filled[5].sgn), filled[5].lam3)
    s1 = assemble_lambda(a1, run_scheme(a1, p, 5)[0], p)
    s2 = assemble_lambda(a2, run_scheme(a2, p, 5)[0], p)
    ogrid = np.linspace(0.4, 1.6, 1201)
    io.write_csv(
        os.path.join(outdir, "fig4.csv"),
        ["t", "series_at_root5", "series_at_root6", "solution"],
        (
            (t, series_eval(s1, t - a1.t0), series_eval(s2, t - a2.t0), sol.lam(float(t)))
            for t in ogrid
        ),
    )
    with open(os.path.join(outdir, "roots.json"), "w", encoding="utf-8") as fh:
        fh.write(io.roots_to_json(filled))
    print(f"wrote fig1.csv fig2.csv fig3.csv fig4.csv roots.json in {outdir}")
    return 0


def main(argv=None) -> int:
    _setup_logging()
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        args = _merge_config(args)
        cfg = _config_from_args(args)
        if cfg.command in ("expand-root", "expand-pole"):
            return cmd_expand(cfg)
        if cfg.command in ("integrate", "find-roots", "lam3", "residual", "symmetry"):
            return cmd_analyze(cfg)
        return cmd_verify(cfg)
    except (UsageError, InvalidParametersError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, IntegrationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
