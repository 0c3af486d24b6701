"""Command-line front end.

Subcommands: simulate, periodicity, compare, convergence, background, sweep.
Exit codes: 0 success, 2 config error, 3 validation error, 4 solver error,
5 failed check (compare tolerance or ``--self-test``).
"""
import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, analysis, kernels
from .config import RunConfig
from .errors import ConfigError, EulerError, WindowTooShort
from .field import write_field_csv, write_table
from .fv import fv_run
from .march import march

EXIT_CHECK_FAILED = 5
ROUNDOFF_FLOOR = 1e-13


# ------------------------------------------------------------------- runners
def run_march(cfg: RunConfig, problem, nt_per_period=None, estimate=None):
    grid = cfg.march_grid(problem, nt_per_period)
    est = cfg["march.error_estimate"] if estimate is None else estimate
    return march(problem.params, problem.forcing, problem.boundary, grid,
                 cfg["march.scheme_order"], cfg.backend("march"), est)


def run_fv(cfg: RunConfig, problem, nx=None, estimate=None):
    grid = cfg.fv_grid(problem, nx)
    est = cfg["fv.error_estimate"] if estimate is None else estimate
    return fv_run(problem.params, problem.forcing, problem.boundary, grid,
                  cfg["fv.flux"], cfg["fv.scheme_order"], cfg.backend("fv"), est)


def enabled_solvers(cfg):
    return [s for s in ("march", "fv") if cfg[f"{s}.enabled"]]


def _run(cfg, problem, solver, **kw):
    return (run_march if solver == "march" else run_fv)(cfg, problem, **kw)


class Output:
    """Output directory plus the provenance header shared by every CSV."""

    def __init__(self, directory, cfg, command):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.header = [
            f"periodic-euler {__version__} {command}",
            f"config source: {cfg.source}",
            f"kernel backend: {kernels.DEFAULT_BACKEND}",
        ] + cfg.header_lines()
        self.files = []

    def table(self, name, columns, data):
        path = self.dir / name
        write_table(path, columns, data, self.header)
        self.files.append(path)
        return path

    def field(self, name, f, stride_t, stride_x):
        path = self.dir / name
        write_field_csv(f, path, self.header, stride_t, stride_x)
        self.files.append(path)
        return path

    def text(self, name, lines):
        path = self.dir / name
        path.write_text("\n".join(lines) + "\n")
        self.files.append(path)
        return path


def _periodicity(cfg, f):
    return analysis.periodicity_residual(f, tol=cfg["periodicity.tol"] or None)


def _probe_points(cfg, f):
    pts = [tuple(p) for p in cfg["energy.points"]]
    if pts:
        return pts
    T0 = f.meta.get("T0") or analysis.report_lambda0(f)[1]
    return [(T0 + f.params.P + 0.2, float(f.x[-1]))]


def diagnostics(cfg, out, problem, f, name):
    """Write the configured diagnostics for one field; return summary lines."""
    wanted = cfg["outputs.diagnostics"]
    per = prof = dev = None
    notes = []
    if "deviation" in wanted:
        dev = analysis.deviation_c1(f, problem.background)
    if "periodicity" in wanted:
        try:
            per = _periodicity(cfg, f)
            out.table(f"periodicity_{name}.csv", ("t", "R_sup", "R_l2"), (per.t, per.R_sup, per.R_l2))
        except WindowTooShort as exc:
            notes.append(f"periodicity skipped: {exc}")
    if "h2_profile" in wanted:
        try:
            prof = analysis.h2_profile(f, problem.background)
            out.table(f"h2_profile_{name}.csv", ("x", "h2_norm"), (prof.x, prof.norms))
        except WindowTooShort as exc:
            notes.append(f"h2_profile skipped: {exc}")
    if "energy" in wanted or "characteristics" in wanted:
        for k, pt in enumerate(_probe_points(cfg, f)):
            try:
                e = analysis.energy_functional(f, pt)
            except WindowTooShort as exc:
                notes.append(f"energy at {pt} skipped: {exc}")
                continue
            if "energy" in wanted:
                out.table(f"energy_{name}_{k}.csv", ("x", "I"), (e.x, e.I))
                notes.append(f"max I(x) at (t'={pt[0]:.6g}, x'={pt[1]:.6g}): {e.I.max():.6e}")
            if "characteristics" in wanted:
                for c in e.curves:
                    out.table(f"char_{name}_{k}_family{c.family}.csv", ("x", "t"), (c.x, c.t))
    lines = [f"[{name}]"] + analysis.summary_lines(f, problem.background, per, prof, dev) + notes
    return lines


# ------------------------------------------------------------------ commands
def cmd_simulate(cfg, out_dir):
    problem = cfg.problem()
    out = Output(out_dir, cfg, "simulate")
    lines = []
    for solver in enabled_solvers(cfg):
        f = _run(cfg, problem, solver)
        out.field(f"{solver}_field.csv", f, cfg["outputs.stride_t"], cfg["outputs.stride_x"])
        lines += diagnostics(cfg, out, problem, f, solver)
    if not lines:
        lines.append("no solver enabled")
    out.text("summary.txt", lines)
    print("\n".join(lines))
    return 0


def cmd_periodicity(cfg, out_dir):
    problem = cfg.problem()
    reports = []
    for solver in enabled_solvers(cfg):
        f = _run(cfg, problem, solver, estimate=True)
        reports.append((solver, f, _periodicity(cfg, f)))
    # every report is complete before anything is written
    out = Output(out_dir, cfg, "periodicity")
    lines = []
    for solver, f, rep in reports:
        out.table(f"periodicity_{solver}.csv", ("t", "R_sup", "R_l2"), (rep.t, rep.R_sup, rep.R_l2))
        lines += [f"[{solver}]"] + analysis.summary_lines(f, problem.background, rep)
    out.text("summary.txt", lines)
    print("\n".join(lines))
    return 0


def compare_fields(fm, ff, P=None):
    """Cross-solver difference on [T0 + P, T0 + 2P] and its tolerance."""
    P = P or fm.params.P
    T0 = fm.meta.get("T0") or analysis.report_lambda0(fm)[1]
    lo, hi = T0 + P, T0 + 2 * P
    rep = analysis.cross_difference(fm, ff, lo, hi)
    tol = 3.0 * (analysis.error_estimate(fm, lo, hi) + analysis.error_estimate(ff, lo, hi))
    # exact runs have zero estimates; allow for roundoff in the interpolation
    return rep, max(tol, ROUNDOFF_FLOOR)


def cmd_compare(cfg, out_dir):
    if not (cfg["march.enabled"] and cfg["fv.enabled"]):
        raise ConfigError("compare needs both march.enabled and fv.enabled")
    problem = cfg.problem()
    fm = run_march(cfg, problem, estimate=True)
    ff = run_fv(cfg, problem, estimate=True)
    rep, tol = compare_fields(fm, ff)
    ok = rep.linf <= tol
    out = Output(out_dir, cfg, "compare")
    out.table("compare.csv", ("t_lo", "t_hi", "linf", "l2", "tol_cross", "pass"),
              ([rep.window[0]], [rep.window[1]], [rep.linf], [rep.l2], [tol], [float(ok)]))
    lines = [
        f"window          [{rep.window[0]:.6g}, {rep.window[1]:.6g}]",
        f"linf            {rep.linf:.6e}",
        f"l2              {rep.l2:.6e}",
        f"tol_cross       {tol:.6e}",
        f"result          {'PASS' if ok else 'FAIL'}",
    ]
    out.text("summary.txt", lines)
    print("\n".join(lines))
    return 0 if ok else EXIT_CHECK_FAILED


def _is_background(problem):
    t = np.linspace(0.0, problem.params.P, 257)
    w = problem.background.primitive(t)
    b = problem.boundary
    return np.allclose(b.rho_l(t), w.rho, rtol=0, atol=1e-14) and np.allclose(b.u_l(t), w.u, rtol=0, atol=1e-14)


def cmd_convergence(cfg, out_dir):
    problem = cfg.problem()
    solver = cfg["convergence.solver"]
    if solver not in ("march", "fv"):
        raise ConfigError(f"convergence.solver must be 'march' or 'fv', not {solver!r}")
    res = sorted(cfg["convergence.resolutions"])
    kw = "nt_per_period" if solver == "march" else "nx"
    run = lambda n: _run(cfg, problem, solver, estimate=False, **{kw: n})  # noqa: E731
    if _is_background(problem):
        reference, label = problem.background, "exact background"
    else:
        reference, label = run(2 * res[-1]), f"fine grid {kw}={2 * res[-1]}"
    if len(res) < 3:
        raise ConfigError("convergence.resolutions needs at least 3 entries")
    table = analysis.convergence_study(run, res, reference)
    out = Output(out_dir, cfg, "convergence")
    out.table("convergence.csv", ("h", "error", "observed_order"), (table.h, table.error, table.local_order))
    lines = [f"solver          {solver}", f"reference       {label}"]
    lines += [f"h={h:.6e}  error={e:.6e}  order={o:.4f}" for h, e, o in table.rows]
    lines.append(f"fitted order    {table.fitted_order:.4f}")
    out.text("summary.txt", lines)
    print("\n".join(lines))
    return 0


def cmd_background(cfg, out_dir):
    problem = cfg.problem()
    P = problem.params.P
    n = cfg["background.samples_per_period"] * cfg["background.periods"]
    t = np.arange(n + 1) * (P / cfg["background.samples_per_period"])
    w = problem.background.primitive(t)
    q = problem.background.riemann(t)
    A = problem.forcing.cumulative(t)
    out = Output(out_dir, cfg, "background")
    path = out.table("background.csv", ("t", "rho", "u", "r_alpha", "s_alpha", "A"),
                     (t, np.broadcast_to(w.rho, t.shape), w.u, q.r, q.s, A))
    print(f"wrote {path}")
    return 0


def _sweep_one(args):
    path, overrides, out_dir = args
    cfg = RunConfig.load(path, overrides)
    try:
        return path, run_command(cmd_simulate, cfg, out_dir)
    except Exception as exc:  # report and keep the pool alive
        _report(exc)
        return path, getattr(exc, "exit_code", 4)


def cmd_sweep(configs, overrides, out_dir, workers):
    base = Path(out_dir)
    jobs = [(str(p), overrides, str(base / Path(p).stem)) for p in configs]
    if len({j[2] for j in jobs}) != len(jobs):
        raise ConfigError("sweep configs must have distinct file names")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_sweep_one, jobs))
    for path, code in results:
        print(f"{path}: exit {code}")
    return max((code for _, code in results), default=0)


# ---------------------------------------------------------------- plumbing
def _report(exc):
    code = getattr(exc, "exit_code", 4)
    payload = {"error": type(exc).__name__, "exit_code": code, "message": str(exc)}
    diag = getattr(exc, "diagnostics", None)
    if diag:
        payload["diagnostics"] = {k: (float(v) if isinstance(v, (np.floating, float)) else v) for k, v in diag.items()}
    print(json.dumps(payload, sort_keys=True, default=str), file=sys.stderr)
    return code


def run_command(fn, cfg, out_dir):
    return fn(cfg, out_dir or cfg["outputs.directory"])


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML configuration file (defaults: baseline)")
    common.add_argument("--out", help="output directory (overrides outputs.directory)")
    common.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                        help="replace one dotted config key; repeatable")

    ap = argparse.ArgumentParser(prog="periodic-euler", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--self-test", action="store_true", help="run the acceptance suite and exit")
    sub = ap.add_subparsers(dest="command")
    sub.add_parser("simulate", parents=[common], help="run the enabled solvers and write fields")
    sub.add_parser("periodicity", parents=[common], help="period-difference residual and onset")
    sub.add_parser("compare", parents=[common], help="space-marching vs finite-volume difference")
    sub.add_parser("convergence", parents=[common], help="observed order over a list of resolutions")
    sub.add_parser("background", parents=[common], help="tabulate the exact background solution")
    sw = sub.add_parser("sweep", parents=[common], help="simulate several configs on a worker pool")
    sw.add_argument("configs", nargs="+", type=Path)
    sw.add_argument("--workers", type=int, default=None)
    return ap


COMMANDS = {
    "simulate": cmd_simulate,
    "periodicity": cmd_periodicity,
    "compare": cmd_compare,
    "convergence": cmd_convergence,
    "background": cmd_background,
}


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.self_test:
            from .acceptance import run_all
            results = run_all(verbose=True)
            return 0 if all(r.passed for r in results) else EXIT_CHECK_FAILED
        if args.command is None:
            ap.print_help()
            return 2
        if args.command == "sweep":
            return cmd_sweep(args.configs, args.override, args.out or "out", args.workers)
        cfg = RunConfig.load(args.config, args.override)
        return run_command(COMMANDS[args.command], cfg, args.out)
    except EulerError as exc:
        return _report(exc)
    except ValueError as exc:  # domain errors from the state algebra
        return _report(exc)


if __name__ == "__main__":
    sys.exit(main())
