"""Discrete solutions on a rectangular (t, x) grid and their CSV form."""
from dataclasses import dataclass, field

import numpy as np

from .gasdyn import GasParams, PrimitiveState, RiemannPair, from_riemann

CSV_COLUMNS = ("t", "x", "r", "s", "rho", "u", "lambda1", "lambda2")


@dataclass
class Field:
    """Riemann invariants ``r, s`` of shape ``(nt, nx)`` on nodes ``t x x``."""

    t: np.ndarray
    x: np.ndarray
    r: np.ndarray
    s: np.ndarray
    params: GasParams
    meta: dict = field(default_factory=dict)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def shape(self):
        return self.r.shape

    def lambdas(self):
        u = self.r + self.s
        c = 0.5 * (self.params.gamma - 1.0) * (self.s - self.r)
        return u - c, u + c

    def primitive(self) -> PrimitiveState:
        return from_riemann(RiemannPair(self.r, self.s), self.params)

    def deviation(self, bg):
        """``m = (r - r_alpha, s - s_alpha)`` with a trailing component axis."""
        qa = bg.riemann(self.t)
        return np.stack([self.r - qa.r[:, None], self.s - qa.s[:, None]], axis=-1)

    def time_index(self, t, tol=1e-9) -> int:
        j = int(round((t - self.t[0]) / self.dt))
        if not (0 <= j < self.t.size) or abs(self.t[j] - t) > tol * max(1.0, abs(t)):
            raise ValueError(f"t={t} is not a record time of this field")
        return j

    def period_shift(self, P) -> int:
        """Number of record steps in one period; the t-grid must resolve P."""
        n = int(round(P / self.dt))
        if n < 1 or abs(n * self.dt - P) > 1e-9 * P:
            raise ValueError(f"period {P} is not a multiple of the record step {self.dt}")
        return n

    def sample(self, t, x):
        """Bilinear interpolation of ``(r, s)`` at arbitrary points (clamped)."""
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        return tuple(_bilinear(self.t, self.x, A, t, x) for A in (self.r, self.s))

    def restrict(self, t_lo=-np.inf, t_hi=np.inf):
        keep = (self.t >= t_lo - 1e-12) & (self.t <= t_hi + 1e-12)
        return Field(self.t[keep], self.x, self.r[keep], self.s[keep], self.params, dict(self.meta))


def _locate(nodes, v):
    i = np.clip(np.searchsorted(nodes, v, side="right") - 1, 0, nodes.size - 2)
    w = (v - nodes[i]) / (nodes[i + 1] - nodes[i])
    return i, np.clip(w, 0.0, 1.0)


def _bilinear(tn, xn, A, t, x):
    t, x = np.broadcast_arrays(t, x)
    j, wt = _locate(tn, t)
    i, wx = _locate(xn, x)
    out = (
        (1 - wt) * (1 - wx) * A[j, i]
        + (1 - wt) * wx * A[j, i + 1]
        + wt * (1 - wx) * A[j + 1, i]
        + wt * wx * A[j + 1, i + 1]
    )
    return float(out) if out.ndim == 0 else out


def write_field_csv(f: Field, path, header_lines=(), stride_t=1, stride_x=1):
    """Row-major over (t, x): ``t,x,r,s,rho,u,lambda1,lambda2``.

    ``header_lines`` are written first as ``#`` comments.
    """
    t = f.t[::stride_t]
    x = f.x[::stride_x]
    r = f.r[::stride_t, ::stride_x]
    s = f.s[::stride_t, ::stride_x]
    sub = Field(t, x, r, s, f.params)
    w = sub.primitive()
    lam1, lam2 = sub.lambdas()
    T, X = np.meshgrid(t, x, indexing="ij")
    table = np.column_stack([a.ravel() for a in (T, X, r, s, w.rho, w.u, lam1, lam2)])
    with open(path, "w", newline="\n") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(CSV_COLUMNS) + "\n")
        np.savetxt(fh, table, fmt="%.17g", delimiter=",")


def read_field_csv(path, params: GasParams) -> Field:
    data = np.loadtxt(path, delimiter=",", skiprows=_header_rows(path), ndmin=2)
    t = np.unique(data[:, 0])
    x = np.unique(data[:, 1])
    shape = (t.size, x.size)
    return Field(t, x, data[:, 2].reshape(shape), data[:, 3].reshape(shape), params)


def _header_rows(path):
    n = 0
    with open(path) as fh:
        for line in fh:
            n += 1
            if not line.startswith("#"):
                return n
    return n


def write_table(path, columns, data, header_lines=()):
    """Plain CSV with ``#`` comment header, one row per line of ``data``."""
    data = np.column_stack([np.asarray(c, dtype=float) for c in data])
    with open(path, "w", newline="\n") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        np.savetxt(fh, data, fmt="%.17g", delimiter=",")


def read_table(path):
    """Inverse of :func:`write_table`: ``(column names, 2-d array)``."""
    n = _header_rows(path)
    with open(path) as fh:
        columns = [ln for _, ln in zip(range(n), fh)][-1].strip().split(",")
    return columns, np.loadtxt(path, delimiter=",", skiprows=n, ndmin=2)
