"""Acceptance suite: ten numbered checks on the baseline scenario.

Each ``criterion_N`` returns a :class:`CriterionResult`; :func:`run_all`
prints one PASS/FAIL line per criterion. Heavy runs are shared through a
:class:`Suite` cache.
"""
import contextlib
import filecmp
import io
import math
import tempfile
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from . import analysis
from .boundary import deviation_h2, perturbation_h2
from .cli import compare_fields, cmd_simulate, run_fv, run_march
from .config import RunConfig
from .forcing import background_ode_residual
from .gasdyn import GasParams, PrimitiveState, eigenvalues, from_riemann, sound_speed, to_riemann

# Regression constants measured once on the baseline (march, order 2, 256 per period).
C0_OBS = 8.410368546261471e-3  # sup|m| / eps with eps the inflow perturbation H^2 norm
C_REG = 1.0770060444429739  # C_fit of the baseline H^2 profile
REGRESSION_SLACK = 1.5

ONSET_WINDOW = (0.8, 1.1)
SEED = 20240601


@dataclass
class Check:
    label: str
    passed: bool
    detail: str


@dataclass
class CriterionResult:
    number: int
    name: str
    checks: list = field(default_factory=list)
    info: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, label, passed, detail):
        self.checks.append(Check(label, bool(passed), detail))

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number:2d}: {self.name}"

    def report(self):
        out = [self.line()]
        out += [f"    {'ok  ' if c.passed else 'FAIL'} {c.label}: {c.detail}" for c in self.checks]
        out += [f"    info {s}" for s in self.info]
        return "\n".join(out)


class Suite:
    """Lazily computed runs shared between criteria."""

    def __init__(self, cfg=None):
        self.cfg = cfg or RunConfig.load()

    @cached_property
    def problem(self):
        return self.cfg.problem()

    @cached_property
    def march(self):
        return run_march(self.cfg, self.problem, estimate=True)

    @cached_property
    def fv(self):
        return run_fv(self.cfg, self.problem, estimate=True)

    @cached_property
    def background_cfg(self):
        return self.cfg.replace(boundary__u__delta=0.0, boundary__rho__delta=0.0)

    @cached_property
    def background_problem(self):
        return self.background_cfg.problem()

    @cached_property
    def background_march(self):
        return run_march(self.background_cfg, self.background_problem, estimate=True)

    @cached_property
    def T0(self):
        return self.march.meta["T0"]

    def delta_run(self, delta):
        if delta == self.cfg["boundary.u.delta"]:
            return self.problem, self.march
        c = self.cfg.replace(boundary__u__delta=delta)
        p = c.problem()
        return p, run_march(c, p, estimate=False)


# ------------------------------------------------------------------ criteria
def criterion_1(suite=None, n=100_000):
    res = CriterionResult(1, "Riemann/primitive round trip and eigenvalue gap")
    rng = np.random.default_rng(SEED)
    for params in (GasParams(), GasParams(a=1.0, gamma=1.4, u_ref=2.0)):
        rho = rng.uniform(0.1, 10.0, n)
        c = sound_speed(rho, params)
        u = c + rng.uniform(0.0, 5.0, n) * (1 - 1e-12) + 1e-12
        w = from_riemann(to_riemann(PrimitiveState(rho, u), params), params)
        err = max(np.max(np.abs(w.rho - rho) / rho), np.max(np.abs(w.u - u) / np.abs(u)))
        lam1, lam2 = eigenvalues(to_riemann(PrimitiveState(rho, u), params), params)
        gap = np.max(np.abs((lam2 - lam1) - 2 * c) / c)
        res.add(f"round trip gamma={params.gamma}", err <= 1e-12, f"max rel error {err:.3e} <= 1e-12")
        res.add(f"lambda2-lambda1=2c gamma={params.gamma}", gap <= 1e-12, f"max rel error {gap:.3e} <= 1e-12")
    return res


def criterion_2(suite=None):
    res = CriterionResult(2, "zero forcing holds the constant state")
    cfg = RunConfig.load(overrides=["forcing.kind='zero'", "boundary.u.delta=0.0"])
    cfg = cfg.replace(march__nt_per_period=64, fv__nx=256)
    p = cfg.problem()
    ref = to_riemann(PrimitiveState(p.params.rho_ref, p.params.u_ref), p.params)
    for order in (1, 2):
        c = cfg.replace(march__scheme_order=order, fv__scheme_order=order)
        for name, f in (("march", run_march(c, p, estimate=False)), ("fv", run_fv(c, p, estimate=False))):
            g = f.restrict(0.0, 5.0)
            dev = max(np.abs(g.r - ref.r).max(), np.abs(g.s - ref.s).max())
            res.add(f"{name} order {order}", dev <= 1e-13, f"sup deviation {dev:.3e} <= 1e-13")
    return res


def criterion_3(suite=None):
    res = CriterionResult(3, "background exactness and convergence order")
    cfg = RunConfig.load(overrides=["boundary.u.delta=0.0"])
    p = cfg.problem()
    bg = p.background
    for order, lo, hi in ((1, 0.8, 1.2), (2, 1.7, 2.3)):
        c = cfg.replace(march__scheme_order=order)
        tab = analysis.convergence_study(
            lambda n, c=c: run_march(c, p, nt_per_period=n, estimate=False), [32, 64, 128, 256], bg)
        res.add(f"march order {order}", lo <= tab.fitted_order <= hi,
                f"fitted order {tab.fitted_order:.4f} in [{lo}, {hi}]; errors "
                + ", ".join(f"{e:.3e}" for e in tab.error))
    c = cfg.replace(fv__scheme_order=1)
    tab = analysis.convergence_study(lambda n: run_fv(c, p, nx=n, estimate=False), [100, 200, 400, 800], bg)
    res.add("fv order 1", 0.8 <= tab.fitted_order <= 1.2,
            f"fitted order {tab.fitted_order:.4f} in [0.8, 1.2]; errors " + ", ".join(f"{e:.3e}" for e in tab.error))
    t = np.random.default_rng(SEED).uniform(0.0, 5.0, 1000)
    rr, rs = background_ode_residual(bg, t, 1e-6)
    worst = max(np.abs(rr).max(), np.abs(rs).max())
    res.add("background ODE residual", worst <= 1e-6, f"max residual {worst:.3e} <= 1e-6 at probe step 1e-6")
    return res


def criterion_4(suite):
    res = CriterionResult(4, "periodicity onset on the baseline")
    f = suite.march
    rep = analysis.periodicity_residual(f)
    T0 = rep.T0_predicted
    pre = float(rep.R_sup[rep.t <= T0 - 0.1].max())
    post = rep.window_max(T0 + 0.1, T0 + f.params.P)
    ratio = pre / post if post > 0 else math.inf
    res.add("post-onset residual >= 100x smaller", ratio >= 100,
            f"max R_sup pre {pre:.3e}, post {post:.3e}, ratio {ratio:.3e} >= 100")
    lo, hi = ONSET_WINDOW
    onset = rep.onset_detected
    ok = onset is not None and lo * T0 <= onset <= hi * T0
    shown = "none" if onset is None else f"{onset:.6g} = {onset / T0:.4f} T0"
    res.add("onset in [0.8, 1.1] T0", ok, f"onset {shown}, T0 {T0:.6g}, tol {rep.tol_used:.3e}")
    front = analysis.influence_front(f)
    res.info.append(f"slow characteristic from (0, 0) reaches x=L at t={front:.6g} = {front / T0:.4f} T0")
    # same perturbation without forcing, where the slow speed does not accelerate
    c = suite.cfg.replace(forcing__kind="zero", fv__enabled=False)
    g = run_march(c, c.problem(), estimate=True)
    r0 = analysis.periodicity_residual(g)
    if r0.onset_detected is not None:
        res.info.append(f"with alpha = 0: onset {r0.onset_detected:.6g} = "
                        f"{r0.onset_detected / r0.T0_predicted:.4f} T0 (T0 {r0.T0_predicted:.6g})")
    return res


def criterion_5(suite):
    res = CriterionResult(5, "supersonic floor")
    p = suite.problem.params
    floor = 0.5 * (p.u_ref - p.c_ref)
    for name, f in (("march", suite.march), ("fv", suite.fv)):
        lam1 = f.lambdas()[0].min()
        res.add(f"{name} lambda1 >= (u-c)/2", lam1 >= floor, f"min lambda1 {lam1:.6f} >= {floor:.6f}")
    lam1 = suite.march.lambdas()[0].min()
    res.add("march lambda1 >= 0.9 (u-c)", lam1 >= 0.9 * (p.u_ref - p.c_ref),
            f"min lambda1 {lam1:.6f} >= {0.9 * (p.u_ref - p.c_ref):.6f}")
    return res


def criterion_6(suite):
    res = CriterionResult(6, "linear response in the perturbation size")
    deltas = (1e-2, 5e-3, 2.5e-3)
    sups, eps = [], []
    for d in deltas:
        p, f = suite.delta_run(d)
        sups.append(analysis.deviation_c1(f, p.background).sup_m)
        eps.append(perturbation_h2(p.boundary))
    for k in range(2):
        q = sups[k] / sups[k + 1]
        res.add(f"sup|m| ratio delta={deltas[k]:g}/{deltas[k + 1]:g}", 1.6 <= q <= 2.4, f"{q:.4f} in [1.6, 2.4]")
    c0 = sups[0] / eps[0]
    res.add("C0_obs regression", c0 <= REGRESSION_SLACK * C0_OBS,
            f"sup|m|/eps = {c0:.6e} <= 1.5 x {C0_OBS:.6e}")
    return res


def criterion_7(suite):
    res = CriterionResult(7, "energy functional vanishes past the onset")
    f = suite.march
    T0, P = suite.T0, f.params.P
    est = analysis.error_estimate(f, 0.0)
    for pt in ((T0 + P + 0.2, 1.0), (T0 + P + 0.5, 0.5), (T0 + P + 0.8, 0.8)):
        e = analysis.energy_functional(f, pt)
        tol = (10 * est) ** 2 * float((e.t2 - e.t1).max())
        res.add(f"baseline point ({pt[0]:.4f}, {pt[1]:g})", e.I.max() <= tol,
                f"max I {e.I.max():.3e} <= tol_I {tol:.3e}")
    g = suite.background_march
    est_b = analysis.error_estimate(g, 0.0)
    worst = 0.0
    for pt in ((T0 + P + 0.2, 1.0), (T0 + P + 0.5, 0.5), (T0 + P + 0.8, 0.8)):
        worst = max(worst, analysis.energy_functional(g, pt).I.max())
    res.add("background run", worst <= est_b**2, f"max I {worst:.3e} <= (error estimate)^2 {est_b**2:.3e}")
    return res


def criterion_8(suite):
    res = CriterionResult(8, "march vs finite-volume oracle")
    rep, tol = compare_fields(suite.march, suite.fv)
    res.add("baseline difference <= tol_cross", rep.linf <= tol,
            f"linf {rep.linf:.3e} <= tol_cross {tol:.3e} on [{rep.window[0]:.4f}, {rep.window[1]:.4f}]")
    c = suite.cfg
    fine = c.replace(march__nt_per_period=2 * c["march.nt_per_period"], fv__nx=2 * c["fv.nx"])
    fm = run_march(fine, suite.problem, estimate=False)
    ff = run_fv(fine, suite.problem, estimate=False)
    rep2 = analysis.cross_difference(fm, ff, *rep.window)
    order = math.log2(rep.linf / rep2.linf)
    res.add("difference shrinks under joint refinement", order >= 0.8,
            f"linf {rep.linf:.3e} -> {rep2.linf:.3e}, order {order:.3f} >= 0.8")
    return res


def criterion_9(suite):
    res = CriterionResult(9, "H2 growth profile")
    f = suite.march
    prof = analysis.h2_profile(f, suite.problem.background)
    res.add("finite profile and C_fit", np.all(np.isfinite(prof.norms)) and math.isfinite(prof.C_fit),
            f"C_fit {prof.C_fit:.6f}, max norm {prof.norms.max():.6e}")
    res.add("C_fit regression", prof.C_fit <= REGRESSION_SLACK * C_REG,
            f"C_fit {prof.C_fit:.6f} <= 1.5 x {C_REG:.6f}")
    ref = deviation_h2(suite.problem.boundary, prof.t_window)
    d = abs(prof.norms[0] - ref)
    res.add("x=0 matches boundary H2 norm", d <= 1e-6, f"|{prof.norms[0]:.12f} - {ref:.12f}| = {d:.3e} <= 1e-6")
    return res


def criterion_10(suite):
    res = CriterionResult(10, "deterministic CSV output")
    with tempfile.TemporaryDirectory() as tmp:
        dirs = [Path(tmp) / "a", Path(tmp) / "b"]
        for d in dirs:
            with contextlib.redirect_stdout(io.StringIO()):
                cmd_simulate(suite.cfg, d)
        names = sorted(p.name for p in dirs[0].iterdir())
        same = [filecmp.cmp(dirs[0] / n, dirs[1] / n, shallow=False) for n in names]
        res.add("repeated baseline runs", all(same) and len(names) > 0,
                f"{sum(same)}/{len(names)} files bit-identical")
    return res


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def run_all(suite=None, verbose=False):
    suite = suite or Suite()
    results = []
    for crit in CRITERIA:
        r = crit(suite)
        results.append(r)
        if verbose:
            print(r.report(), flush=True)
    if verbose:
        print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return results
