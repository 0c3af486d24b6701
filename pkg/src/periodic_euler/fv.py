"""Conservative finite-volume oracle for the balance law in (rho, rho u).

Time marching with forward Euler (order 1) or Heun with minmod-limited
linear reconstruction (order 2). Both primitive variables are imposed in the
inflow ghosts; the outflow ghosts copy the last cell.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .boundary import BoundaryData
from .errors import CFLError, NonFiniteError, PositivityError, ValidationError
from .field import Field
from .forcing import ForcingCoefficient
from .gasdyn import GasParams, PrimitiveState, to_riemann

FLUXES = {"rusanov": 0, "hll": 1}
# Courant numbers used when none is given; limited reconstruction with Heun
# amplifies roundoff above about one half.
DEFAULT_CFL = {1: 0.9, 2: 0.45}


@dataclass(frozen=True)
class FvGrid:
    nx: int
    L: float = 1.0
    cfl: Optional[float] = None
    t_end: float = 5.0
    record_dt: Optional[float] = None

    def __post_init__(self):
        if self.nx < 2:
            raise ValidationError("need at least 2 cells")
        if self.cfl is not None and not (0 < self.cfl <= 1):
            raise ValidationError("Courant number must lie in (0, 1]")

    @property
    def dx(self):
        return self.L / self.nx

    @property
    def x(self):
        return (np.arange(self.nx) + 0.5) * self.dx

    def courant(self, order):
        return self.cfl if self.cfl is not None else DEFAULT_CFL[order]

    def record_times(self, P):
        h = self.record_dt or P / 256
        return np.arange(int(np.floor(self.t_end / h + 1e-9)) + 1) * h

    def coarsened(self):
        if self.nx % 2:
            raise ValueError("odd cell count cannot be coarsened by two")
        return FvGrid(self.nx // 2, self.L, self.cfl, self.t_end, self.record_dt)


def _integrate(params, forcing, boundary, grid, flux, order, backend):
    k = kernels.get_backend(backend)
    a, gamma = params.a, params.gamma
    fid = FLUXES[flux]
    dx = grid.dx
    cfl = grid.courant(order)
    rho = np.full(grid.nx, params.rho_ref)
    mom = np.full(grid.nx, params.rho_ref * params.u_ref)
    trec = grid.record_times(params.P)
    out_rho = np.empty((trec.size, grid.nx))
    out_mom = np.empty((trec.size, grid.nx))
    out_rho[0], out_mom[0] = rho, mom
    d1r, d1m = np.empty(grid.nx), np.empty(grid.nx)
    d2r, d2m = np.empty(grid.nx), np.empty(grid.nx)

    def inflow(t):
        rl = boundary.rho_l(t)
        return rl, rl * boundary.u_l(t)

    t = 0.0
    n_rec = 1
    steps = 0
    while n_rec < trec.size:
        dt = cfl * dx / k.max_wavespeed(rho, mom, a, gamma)
        if not dt > 1e-14 * max(1.0, grid.t_end):
            raise CFLError(f"time step underflow at t={t:.6g}", t=t, dt=dt)
        rin, min_ = inflow(t)
        k.fv_rhs(rho, mom, rin, min_, dx, forcing(t), a, gamma, fid, order, d1r, d1m)
        if order == 1:
            rho_n = rho + dt * d1r
            mom_n = mom + dt * d1m
        else:
            rho1 = rho + dt * d1r
            mom1 = mom + dt * d1m
            rin, min_ = inflow(t + dt)
            k.fv_rhs(rho1, mom1, rin, min_, dx, forcing(t + dt), a, gamma, fid, order, d2r, d2m)
            rho_n = 0.5 * (rho + rho1 + dt * d2r)
            mom_n = 0.5 * (mom + mom1 + dt * d2m)
        steps += 1
        rmin = rho_n.min()
        if not np.isfinite(rmin) or not np.all(np.isfinite(mom_n)):
            raise NonFiniteError(f"non-finite state at t={t + dt:.6g}", t=t + dt)
        if rmin <= 0:
            raise PositivityError(f"density lost positivity at t={t + dt:.6g}", t=t + dt)
        tn = t + dt
        while n_rec < trec.size and trec[n_rec] <= tn:
            w = (trec[n_rec] - t) / dt
            out_rho[n_rec] = (1 - w) * rho + w * rho_n
            out_mom[n_rec] = (1 - w) * mom + w * mom_n
            n_rec += 1
        rho, mom, t = rho_n, mom_n, tn
    return trec, out_rho, out_mom, steps


def fv_run(params: GasParams, forcing: ForcingCoefficient, boundary: BoundaryData, grid: FvGrid,
           flux="hll", scheme_order=1, backend=None, estimate_error=False) -> Field:
    """Advance cell averages from the constant initial state to ``grid.t_end``.

    Output is converted to Riemann invariants at the record times, at cell
    centres. Loss of supersonicity is flagged in ``meta`` but not fatal.
    """
    if flux not in FLUXES:
        raise ValidationError(f"unknown flux {flux!r}; choose from {sorted(FLUXES)}")
    if scheme_order not in (1, 2):
        raise ValidationError("scheme_order must be 1 or 2")
    trec, rho, mom, steps = _integrate(params, forcing, boundary, grid, flux, scheme_order, backend)
    q = to_riemann(PrimitiveState(rho, mom / rho), params)
    f = Field(
        trec, grid.x, q.r, q.s, params,
        meta={
            "solver": "fv",
            "scheme": f"{flux}-{scheme_order}",
            "flux": flux,
            "scheme_order": scheme_order,
            "h": grid.dx,
            "dx": grid.dx,
            "steps": steps,
            "cfl": grid.courant(scheme_order),
            "grid": grid,
        },
    )
    lam1, _ = f.lambdas()
    f.meta["min_lambda1"] = float(lam1.min())
    f.meta["supersonic_lost"] = bool(lam1.min() <= 0)
    if estimate_error:
        _, rc, mc, _ = _integrate(params, forcing, boundary, grid.coarsened(), flux, scheme_order, backend)
        # restrict the fine cell averages of the conserved variables
        rr = 0.5 * (rho[:, 0::2] + rho[:, 1::2])
        mr = 0.5 * (mom[:, 0::2] + mom[:, 1::2])
        qf = to_riemann(PrimitiveState(rr, mr / rr), params)
        qc = to_riemann(PrimitiveState(rc, mc / rc), params)
        diff = np.maximum(np.abs(qf.r - qc.r), np.abs(qf.s - qc.s))
        series = diff.max(axis=1) / (2**scheme_order - 1)
        f.meta["error_series"] = (trec, series)
        f.meta["error_estimate"] = float(series.max())
    return f
