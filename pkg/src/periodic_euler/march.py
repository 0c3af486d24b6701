"""Space-marching solver: x is the evolution variable.

With supersonic flow both characteristic speeds are positive, so the
invariants can be advanced column by column across the duct,

    r_x + r_t / lambda1 = alpha (r + s) / (2 lambda1),
    s_x + s_t / lambda2 = alpha (r + s) / (2 lambda2),

starting from the inflow data at x = 0, which is extended by the background
for t <= 0. Differences in t are upwind (backward), so the scheme is causal
in t as well.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .boundary import BoundaryData, extended_star
from .errors import CFLError, NonFiniteError, SupersonicityLoss, ValidationError
from .field import Field
from .forcing import ForcingCoefficient
from .gasdyn import GasParams


def _even_ceil(v):
    n = math.ceil(v - 1e-9)
    return n + (n % 2)


@dataclass(frozen=True)
class MarchGrid:
    n_neg: int
    n_pos: int
    segments: int
    dt: float
    L: float

    @classmethod
    def build(cls, params: GasParams, lambda_floor, nt_per_period=256, t_max=5.0,
              cfl_safety=0.9, buffer=1.25):
        """Uniform grid with dt = P / nt_per_period and dx from the CFL bound.

        The buffer below t = 0 is ``buffer * L / lambda_floor``; node counts are
        rounded up to even numbers so the grid can be coarsened by two.
        """
        if nt_per_period < 4:
            raise ValidationError("need at least 4 t-nodes per period")
        if buffer < 1.0:
            raise ValidationError("buffer below t=0 must be at least L / lambda_floor")
        dt = params.P / nt_per_period
        return cls(
            n_neg=_even_ceil(buffer * params.L / lambda_floor / dt),
            n_pos=_even_ceil(t_max / dt),
            segments=_even_ceil(params.L / (cfl_safety * lambda_floor * dt)),
            dt=dt,
            L=params.L,
        )

    @property
    def nt(self):
        return self.n_neg + self.n_pos + 1

    @property
    def nx(self):
        return self.segments + 1

    @property
    def dx(self):
        return self.L / self.segments

    @property
    def t_min(self):
        return -self.n_neg * self.dt

    @property
    def t_max(self):
        return self.n_pos * self.dt

    @property
    def t(self):
        return (np.arange(self.nt) - self.n_neg) * self.dt

    @property
    def x(self):
        return np.arange(self.nx) * self.dx

    def coarsened(self):
        if self.n_neg % 2 or self.n_pos % 2 or self.segments % 2:
            raise ValueError("grid cannot be coarsened by two")
        return MarchGrid(self.n_neg // 2, self.n_pos // 2, self.segments // 2, 2 * self.dt, self.L)


def _raise_for_status(status, column, lam_min, grid, lam_abort):
    x = column * grid.dx
    lam = lam_min[column]
    if status == kernels.NON_FINITE:
        raise NonFiniteError(f"non-finite value at column {column} (x={x:.6g})", column=column, x=x)
    if status == kernels.SUPERSONIC_LOSS:
        raise SupersonicityLoss(
            f"slow speed fell to {lam:.6g} <= {lam_abort:.6g} at x={x:.6g}; "
            "the perturbation has left the small-amplitude regime",
            column=column, x=x, lambda1=lam,
        )
    if status == kernels.CFL_VIOLATION:
        raise CFLError(
            f"CFL violated at x={x:.6g}: dx/lambda1={grid.dx / lam:.6g} > dt={grid.dt:.6g}; "
            "use a larger dt or a smaller dx",
            column=column, x=x, lambda1=lam,
        )


def _sweep(forcing, boundary, grid, order, backend):
    bg = boundary.background
    t = grid.t
    R = np.empty((grid.nx, grid.nt))
    S = np.empty((grid.nx, grid.nt))
    q0 = extended_star(boundary, t)
    R[0], S[0] = q0.r, q0.s
    # bottom rows lie in the region fixed by t <= 0 data: exact background
    qb = bg.riemann(t[:order])
    R[:, :order] = qb.r
    S[:, :order] = qb.s
    alpha = np.ascontiguousarray(forcing(t), dtype=float)
    lam_abort = 0.5 * bg.lambda_floor
    k = kernels.get_backend(backend)
    status, column, lam_min = k.march_columns(R, S, alpha, grid.dt, grid.dx, bg.params.gamma, order, lam_abort)
    _raise_for_status(status, column, lam_min, grid, lam_abort)
    return np.ascontiguousarray(R.T), np.ascontiguousarray(S.T), lam_min


def march(params: GasParams, forcing: ForcingCoefficient, boundary: BoundaryData, grid: MarchGrid,
          scheme_order=1, backend=None, estimate_error=False) -> Field:
    """Run the space-marching solver and return the field on ``grid``.

    With ``estimate_error`` a companion run on the grid coarsened by two gives
    a Richardson estimate of the L-infinity error, stored in
    ``meta["error_estimate"]`` with its per-time profile in
    ``meta["error_series"]``.
    """
    if scheme_order not in (1, 2):
        raise ValidationError("scheme_order must be 1 or 2")
    r, s, lam_min = _sweep(forcing, boundary, grid, scheme_order, backend)
    f = Field(
        grid.t, grid.x, r, s, params,
        meta={
            "solver": "march",
            "scheme": f"upwind-{scheme_order}",
            "scheme_order": scheme_order,
            "h": grid.dt,
            "dt": grid.dt,
            "dx": grid.dx,
            "cfl_history": lam_min,
            "grid": grid,
        },
    )
    lam0, T0 = report_lambda0(f)
    f.meta["lambda0"], f.meta["T0"] = lam0, T0
    if estimate_error:
        rc, sc, _ = _sweep(forcing, boundary, grid.coarsened(), scheme_order, backend)
        j0 = grid.n_neg // 2
        diff = np.maximum(np.abs(r[::2, ::2] - rc), np.abs(s[::2, ::2] - sc))[j0:]
        series = diff.max(axis=1) / (2**scheme_order - 1)
        f.meta["error_series"] = (grid.t[::2][j0:], series)
        f.meta["error_estimate"] = float(series.max())
    return f


def report_lambda0(f: Field):
    """Minimum slow speed over nodes with t >= 0 and the onset bound L / lambda0."""
    lam1, _ = f.lambdas()
    lam0 = float(lam1[f.t >= 0].min())
    return lam0, f.params.L / lam0
