"""Diagnostics on computed fields: periodicity, deviation bounds,
characteristic strips, H^2 profiles and convergence studies."""
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import WindowTooShort
from .field import Field
from .forcing import BackgroundSolution
from .march import report_lambda0
from .norms import h2_norms_columns


def error_estimate(f: Field, t_lo=-np.inf, t_hi=np.inf) -> float:
    """Self-reported error estimate of a field, optionally restricted in t."""
    if "error_series" not in f.meta:
        raise ValueError("field carries no error estimate; run the solver with estimate_error=True")
    t, e = f.meta["error_series"]
    keep = (t >= t_lo - 1e-12) & (t <= t_hi + 1e-12)
    if not np.any(keep):
        raise ValueError(f"no error samples in [{t_lo}, {t_hi}]")
    return float(e[keep].max())


# ---------------------------------------------------------------- periodicity
@dataclass
class PeriodicityReport:
    t: np.ndarray
    R_sup: np.ndarray
    R_l2: np.ndarray
    onset_detected: Optional[float]
    T0_predicted: float
    tol_used: float

    @property
    def residual_series(self):
        return list(zip(self.t, self.R_sup, self.R_l2))

    def window_max(self, t_lo, t_hi):
        keep = (self.t >= t_lo) & (self.t <= t_hi)
        return float(self.R_sup[keep].max())


def period_difference(f: Field, P=None):
    """``V = m(t+P) - m(t)`` as ``(t, Vr, Vs)``; the background cancels."""
    n = f.period_shift(P or f.params.P)
    return f.t[:-n], f.r[n:] - f.r[:-n], f.s[n:] - f.s[:-n]


def onset_time(t, R, tol):
    """Earliest time after which ``R < tol`` at every later sample."""
    above = np.nonzero(R >= tol)[0]
    if above.size == 0:
        return float(t[0])
    if above[-1] == R.size - 1:
        return None
    return float(t[above[-1] + 1])


def periodicity_residual(f: Field, P=None, tol=None, T0=None) -> PeriodicityReport:
    P = P or f.params.P
    if T0 is None:
        _, T0 = report_lambda0(f)
    if f.t[-1] < T0 + 2 * P - 1e-12:
        raise WindowTooShort(f"field ends at t={f.t[-1]:.6g} < T0 + 2P = {T0 + 2 * P:.6g}")
    if tol is None:
        tol = 10.0 * error_estimate(f, 0.0)
    t, Vr, Vs = period_difference(f, P)
    keep = t >= -1e-12
    t, Vr, Vs = t[keep], Vr[keep], Vs[keep]
    R_sup = np.maximum(np.abs(Vr), np.abs(Vs)).max(axis=1)
    R_l2 = np.sqrt(np.trapezoid(Vr**2 + Vs**2, f.x, axis=1))
    return PeriodicityReport(t, R_sup, R_l2, onset_time(t, R_sup, tol), T0, float(tol))


# ------------------------------------------------------------------ deviation
@dataclass
class C1Deviation:
    sup_m: float
    sup_m_t: float
    sup_m_x: float
    sup_rho: float
    sup_rho_t: float
    sup_rho_x: float
    sup_u: float
    sup_u_t: float
    sup_u_x: float

    def as_tuple(self):
        return self.sup_m, self.sup_m_t, self.sup_m_x


def _sup_with_derivatives(a, t, x):
    da_t = np.gradient(a, t, axis=0, edge_order=2)
    da_x = np.gradient(a, x, axis=1, edge_order=2)
    return float(np.abs(a).max()), float(np.abs(da_t).max()), float(np.abs(da_x).max())


def deviation_c1(f: Field, bg: BackgroundSolution) -> C1Deviation:
    """Sup norms of the deviation from the background and of its differences, t >= 0."""
    g = f.restrict(0.0)
    m = g.deviation(bg)
    per = [_sup_with_derivatives(m[..., k], g.t, g.x) for k in range(2)]
    w = g.primitive()
    bw = bg.primitive(g.t)
    drho = _sup_with_derivatives(w.rho - bw.rho[:, None], g.t, g.x)
    du = _sup_with_derivatives(w.u - bw.u[:, None], g.t, g.x)
    return C1Deviation(*(max(a, b) for a, b in zip(*per)), *drho, *du)


# ------------------------------------------------------------ characteristics
@dataclass
class CharCurve:
    family: int
    x: np.ndarray
    t: np.ndarray
    complete: bool = True

    def t_at(self, x):
        order = np.argsort(self.x)
        return np.interp(x, self.x[order], self.t[order])


class _Outside(Exception):
    pass


class _SpeedField:
    def __init__(self, f: Field, family):
        if family not in (1, 2):
            raise ValueError("family must be 1 or 2")
        lam1, lam2 = f.lambdas()
        self.lam = lam1 if family == 1 else lam2
        self.t = f.t
        self.x = f.x
        self.dt = f.t[1] - f.t[0]

    def inside(self, t):
        return self.t[0] <= t <= self.t[-1]

    def clip(self, t):
        if not self.inside(t):
            raise _Outside
        return t

    def slope(self, t, x):
        """``dt/dx = 1 / lambda`` by bilinear interpolation of lambda."""
        tn, xn = self.t, self.x
        j = min(max(int((t - tn[0]) / self.dt), 0), tn.size - 2)
        i = min(max(int(np.searchsorted(xn, x, side="right")) - 1, 0), xn.size - 2)
        wt = (t - tn[j]) / (tn[j + 1] - tn[j])
        wx = (x - xn[i]) / (xn[i + 1] - xn[i])
        L = self.lam
        lam = ((1 - wt) * ((1 - wx) * L[j, i] + wx * L[j, i + 1])
               + wt * ((1 - wx) * L[j + 1, i] + wx * L[j + 1, i + 1]))
        return 1.0 / lam


def _rk4_curve(speed, t0, x0, x1, nsteps):
    h = (x1 - x0) / nsteps
    xs = [x0]
    ts = [t0]
    t, x = t0, x0
    for _ in range(nsteps):
        try:
            k1 = speed.slope(t, x)
            k2 = speed.slope(speed.clip(t + 0.5 * h * k1), x + 0.5 * h)
            k3 = speed.slope(speed.clip(t + 0.5 * h * k2), x + 0.5 * h)
            k4 = speed.slope(speed.clip(t + h * k3), x + h)
        except _Outside:
            return np.array(xs), np.array(ts), False
        t = t + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        x = x + h
        if not speed.inside(t):
            return np.array(xs), np.array(ts), False
        xs.append(x)
        ts.append(t)
    xs[-1] = x1
    return np.array(xs), np.array(ts), True


def trace_characteristic(f: Field, start, family, substeps=4) -> CharCurve:
    """Integrate ``dt/dx = 1/lambda_family`` from ``start=(t', x')`` back to x = 0.

    Classical RK4 with step ``dx / substeps``. A curve leaving the stored
    t-window is returned truncated with ``complete=False``.
    """
    t0, x0 = start
    if not (f.t[0] <= t0 <= f.t[-1] and f.x[0] <= x0 <= f.x[-1]):
        raise ValueError(f"start point {start} lies outside the grid")
    dx = float(f.x[1] - f.x[0])
    nsteps = max(1, math.ceil(x0 / (dx / substeps) - 1e-9))
    xs, ts, ok = _rk4_curve(_SpeedField(f, family), t0, x0, 0.0, nsteps) if x0 > 0 else (
        np.array([0.0]), np.array([t0]), True)
    return CharCurve(family, xs, ts, ok)


def influence_front(f: Field, t0=0.0, family=1, substeps=4) -> float:
    """Arrival time at x = L of the characteristic leaving (t0, 0) forward in x.

    With ``t0 = 0`` and the slow family this bounds the region that still
    remembers the t <= 0 extension; past it the period difference vanishes.
    """
    dx = float(f.x[1] - f.x[0])
    L = float(f.x[-1])
    xs, ts, ok = _rk4_curve(_SpeedField(f, family), t0, 0.0, L, max(1, math.ceil(L / (dx / substeps))))
    if not ok:
        raise WindowTooShort("characteristic leaves the stored t-window")
    return float(ts[-1])


# ---------------------------------------------------------- energy functional
@dataclass
class EnergyProfile:
    x: np.ndarray
    I: np.ndarray
    t1: np.ndarray
    t2: np.ndarray
    curves: tuple


def strip_integral(t_nodes, w, a, b):
    """Trapezoid integral of nodal samples ``w`` over ``[a, b]``, ends interpolated."""
    inner = (t_nodes > a) & (t_nodes < b)
    ts = np.concatenate([[a], t_nodes[inner], [b]])
    ws = np.concatenate([[np.interp(a, t_nodes, w)], w[inner], [np.interp(b, t_nodes, w)]])
    return float(np.trapezoid(ws, ts))


def energy_functional(f: Field, point, P=None) -> EnergyProfile:
    """``I(x) = 1/2 int_{t1(x)}^{t2(x)} |V(t, x)|^2 dt`` on every column x <= x'.

    ``t1`` and ``t2`` are the slow and fast characteristics through ``point``.
    """
    c1 = trace_characteristic(f, point, 1)
    c2 = trace_characteristic(f, point, 2)
    if not (c1.complete and c2.complete):
        raise WindowTooShort(f"characteristics through {point} leave the stored window")
    tv, Vr, Vs = period_difference(f, P)
    if point[0] > tv[-1]:
        raise WindowTooShort(f"V(t, x) is undefined beyond t={tv[-1]:.6g}")
    W = Vr**2 + Vs**2
    cols = np.nonzero(f.x <= point[1] + 1e-12)[0]
    xs = f.x[cols]
    t1 = c1.t_at(xs)
    t2 = c2.t_at(xs)
    I = np.array([0.5 * strip_integral(tv, W[:, i], a, b) for i, a, b in zip(cols, t1, t2)])
    return EnergyProfile(xs, I, t1, t2, (c1, c2))


# ---------------------------------------------------------------- H2 profile
@dataclass
class H2Profile:
    x: np.ndarray
    norms: np.ndarray
    C_fit: float
    t_window: np.ndarray

    @property
    def rows(self):
        return list(zip(self.x, self.norms))


def window_nodes(f: Field, t_lo, P=None) -> slice:
    """Record nodes covering one period starting at the first node >= t_lo."""
    n = f.period_shift(P or f.params.P)
    j0 = int(math.ceil((t_lo - f.t[0]) / f.dt - 1e-9))
    if j0 < 0 or j0 + n >= f.t.size:
        raise WindowTooShort(f"window [{t_lo:.6g}, {t_lo + n * f.dt:.6g}] is not covered by the field")
    return slice(j0, j0 + n + 1)


def exponential_rate(x, norms):
    """Least ``C >= 0`` with ``norms(x)^2 <= norms(x_0)^2 exp(C (x - x_0))`` on all columns."""
    if norms[0] == 0.0:
        return 0.0 if not np.any(norms[1:] > 0) else math.inf
    ratio = np.log(norms[1:] ** 2 / norms[0] ** 2) / (x[1:] - x[0])
    return float(max(0.0, ratio.max()))


def h2_profile(f: Field, bg: BackgroundSolution, t_lo=None, P=None) -> H2Profile:
    """H^2 norm in t of the deviation on ``[t_lo, t_lo + P]``, per column.

    ``t_lo`` defaults to the onset bound ``T0 = L / lambda0``.
    """
    if t_lo is None:
        _, t_lo = report_lambda0(f)
    win = window_nodes(f, t_lo, P)
    sub = Field(f.t[win], f.x, f.r[win], f.s[win], f.params)
    norms = h2_norms_columns(sub.deviation(bg), f.dt)
    return H2Profile(f.x, norms, exponential_rate(f.x, norms), sub.t)


# ------------------------------------------------------------- convergence
@dataclass
class ConvergenceTable:
    h: np.ndarray
    error: np.ndarray
    local_order: np.ndarray
    fitted_order: float

    @property
    def rows(self):
        return list(zip(self.h, self.error, self.local_order))


def linf_error_vs_background(f: Field, bg: BackgroundSolution, times=None) -> float:
    """L-infinity error of (r, s) against the exact background at t >= 0 record times."""
    sel = f.t >= -1e-12
    if times is not None:
        sel &= _matched(f.t, times)
    qa = bg.riemann(f.t[sel])
    return float(max(np.abs(f.r[sel] - qa.r[:, None]).max(), np.abs(f.s[sel] - qa.s[:, None]).max()))


def _matched(t, times, tol=1e-9):
    idx = np.clip(np.searchsorted(times, t), 1, times.size - 1)
    near = np.minimum(np.abs(times[idx] - t), np.abs(times[idx - 1] - t))
    return near <= tol * np.maximum(1.0, np.abs(t))


def fit_order(h, err):
    slope, _ = np.polyfit(np.log(h), np.log(err), 1)
    return float(slope)


def convergence_study(run: Callable[[int], Field], resolutions: Sequence[int], reference) -> ConvergenceTable:
    """Errors at matched record times and the least-squares observed order.

    ``reference`` is a :class:`BackgroundSolution` (exact solution) or a
    fine-grid :class:`Field` sampled bilinearly.
    """
    if len(resolutions) < 3:
        raise ValueError("a convergence study needs at least 3 resolutions")
    fields = [run(n) for n in resolutions]
    times = min(fields, key=lambda g: g.t.size).t
    times = times[times >= -1e-12]
    h, err = [], []
    for g in fields:
        h.append(g.meta["h"])
        if isinstance(reference, BackgroundSolution):
            err.append(linf_error_vs_background(g, reference, times))
        else:
            sel = _matched(g.t, times) & (g.t >= -1e-12)
            T, X = np.meshgrid(g.t[sel], g.x, indexing="ij")
            rr, ss = reference.sample(T, X)
            err.append(float(max(np.abs(g.r[sel] - rr).max(), np.abs(g.s[sel] - ss).max())))
    h = np.array(h)
    err = np.array(err)
    local = np.concatenate([[np.nan], np.log(err[:-1] / err[1:]) / np.log(h[:-1] / h[1:])])
    return ConvergenceTable(h, err, local, fit_order(h, err))


# ------------------------------------------------------------ cross-solver
@dataclass
class CrossReport:
    linf: float
    l2: float
    n_points: int
    window: tuple


def cross_difference(fa: Field, fb: Field, t_lo=-np.inf, t_hi=np.inf) -> CrossReport:
    """Difference of two fields on the coarser of their record grids.

    Both are sampled bilinearly at the coarser t-nodes inside the window and
    at the coarser x-nodes inside both x-ranges. ``l2`` is the RMS value.
    """
    tn = min(fa.t, fb.t, key=len)
    xn = min(fa.x, fb.x, key=len)
    lo, hi = max(fa.t[0], fb.t[0], t_lo), min(fa.t[-1], fb.t[-1], t_hi)
    tn = tn[(tn >= lo - 1e-12) & (tn <= hi + 1e-12)]
    xn = xn[(xn >= max(fa.x[0], fb.x[0]) - 1e-12) & (xn <= min(fa.x[-1], fb.x[-1]) + 1e-12)]
    if tn.size == 0 or xn.size == 0:
        raise ValueError("fields share no record points in the window")
    T, X = np.meshgrid(tn, xn, indexing="ij")
    ra, sa = fa.sample(T, X)
    rb, sb = fb.sample(T, X)
    d = np.maximum(np.abs(ra - rb), np.abs(sa - sb))
    l2 = float(np.sqrt(np.mean((ra - rb) ** 2 + (sa - sb) ** 2)))
    return CrossReport(float(d.max()), l2, int(d.size), (float(tn[0]), float(tn[-1])))


# ---------------------------------------------------------------- summary
def exact_background_field(params, bg: BackgroundSolution, t, x) -> Field:
    qa = bg.riemann(np.asarray(t, dtype=float))
    shape = (len(t), len(x))
    return Field(np.asarray(t, dtype=float), np.asarray(x, dtype=float),
                 np.broadcast_to(qa.r[:, None], shape).copy(),
                 np.broadcast_to(qa.s[:, None], shape).copy(), params, {"solver": "exact"})


def summary_lines(f: Field, bg: BackgroundSolution, periodicity=None, profile=None, deviation=None):
    lam0, T0 = report_lambda0(f)
    lines = [
        f"solver          {f.meta.get('solver')} ({f.meta.get('scheme')})",
        f"grid            nt={f.t.size} nx={f.x.size} t=[{f.t[0]:.6g}, {f.t[-1]:.6g}]",
        f"lambda0         {lam0:.10g}",
        f"T0              {T0:.10g}",
    ]
    if "error_estimate" in f.meta:
        lines.append(f"error_estimate  {f.meta['error_estimate']:.6e}")
    if periodicity is not None:
        onset = "none" if periodicity.onset_detected is None else f"{periodicity.onset_detected:.6g}"
        lines.append(f"onset           {onset} (tol {periodicity.tol_used:.3e})")
    if profile is not None:
        lines.append(f"C_fit           {profile.C_fit:.6g}")
    if deviation is not None:
        lines.append(
            f"sup|m|          {deviation.sup_m:.6e}  sup|m_t| {deviation.sup_m_t:.6e}  sup|m_x| {deviation.sup_m_x:.6e}"
        )
        lines.append(
            f"sup|rho-rho_a|  {deviation.sup_rho:.6e}  sup|u-u_a| {deviation.sup_u:.6e}"
        )
    return lines
