"""Periodic inflow data at x = 0 and its extension to t <= 0."""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ValidationError
from .forcing import BackgroundSolution
from .gasdyn import PrimitiveState, RiemannPair, eigenvalues, to_riemann
from .norms import h2_norm_periodic, h2_norm_window

SIGNAL_KINDS = ("constant", "background_plus_sine3", "sine_series", "tabulated")
COMPAT_TOL = 1e-10


def _sin3_derivatives(t, w, order=2):
    """``sin(w t)**3`` and its derivatives up to ``order``."""
    sn = np.sin(w * t)
    if order == 0:
        return (sn**3,)
    cs = np.cos(w * t)
    return sn**3, 3 * w * sn**2 * cs, 3 * w**2 * sn * (2 * cs**2 - sn**2)


@dataclass(frozen=True)
class PeriodicSignal:
    """A P-periodic scalar signal for one inflow channel.

    ``background_plus_sine3`` adds ``amplitude * sin(2 pi k t / P)**3`` to the
    background velocity (channel ``"u"``) or to ``rho**((gamma-1)/2)`` of the
    background density (channel ``"rho"``); it needs ``background``.
    """

    kind: str
    period: float = 1.0
    value: float = 0.0
    amplitude: float = 0.0
    harmonic: int = 1
    coefficients: tuple = ()
    samples: tuple = ()
    channel: str = "u"
    background: Optional[BackgroundSolution] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in SIGNAL_KINDS:
            raise ValidationError(f"unknown signal kind {self.kind!r}")
        if self.channel not in ("rho", "u"):
            raise ValidationError(f"unknown boundary channel {self.channel!r}")
        if self.kind == "background_plus_sine3" and self.background is None:
            raise ValidationError("background_plus_sine3 needs a background solution")
        if self.kind == "tabulated" and len(self.samples) < 4:
            raise ValidationError("tabulated signal needs at least 4 samples per period")
        object.__setattr__(self, "coefficients", tuple((float(b), int(k)) for b, k in self.coefficients))
        object.__setattr__(self, "samples", tuple(float(v) for v in self.samples))

    @cached_property
    def _spline(self):
        n = len(self.samples)
        y = np.append(self.samples, self.samples[0])
        return CubicSpline(np.arange(n + 1) * (self.period / n), y, bc_type="periodic")

    def derivative(self, t, order=0):
        """Time derivative of the given order (0, 1 or 2)."""
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return np.full_like(t, self.value) if order == 0 else np.zeros_like(t)
        if self.kind == "tabulated":
            return self._spline(np.mod(t, self.period), nu=order)
        if self.kind == "sine_series":
            g = np.full_like(t, self.value) if order == 0 else np.zeros_like(t)
            for beta, k in self.coefficients:
                w = 2 * np.pi * k / self.period
                g = g + beta * w**order * np.sin(w * t + order * np.pi / 2)
            return g
        w = 2 * np.pi * self.harmonic / self.period
        S = _sin3_derivatives(np.mod(t, self.period), w, order)
        bg = self.background
        if self.channel == "u":
            v = bg.velocity(t)
            if order == 1:
                v = bg.forcing(t) * v
            elif order == 2:
                v = (bg.forcing.derivative(t, 1) + bg.forcing(t) ** 2) * v
            return v + self.amplitude * S[order]
        # perturbation of rho**((gamma-1)/2), mapped back to rho
        n = 2.0 / (bg.params.gamma - 1)
        q = bg.params.rho_ref ** (1.0 / n) + self.amplitude * S[0]
        if order == 0:
            return q**n
        q1 = self.amplitude * S[1]
        if order == 1:
            return n * q ** (n - 1) * q1
        return n * (n - 1) * q ** (n - 2) * q1**2 + n * q ** (n - 1) * self.amplitude * S[2]

    def derivatives(self, t):
        """Value with first and second time derivatives."""
        return tuple(self.derivative(t, k) for k in range(3))

    def __call__(self, t):
        g = self.derivative(t, 0)
        return float(g) if np.ndim(g) == 0 else g


@dataclass
class BoundaryReport:
    valid: bool
    rho_jump: float
    u_jump: float
    min_lambda1: float
    violations: list = field(default_factory=list)
    violating_t: Optional[float] = None


@dataclass(frozen=True)
class BoundaryData:
    rho_l: PeriodicSignal
    u_l: PeriodicSignal
    background: BackgroundSolution

    @classmethod
    def from_background(cls, bg: BackgroundSolution):
        P = bg.params.P
        return cls(
            PeriodicSignal("constant", P, value=bg.params.rho_ref, channel="rho"),
            PeriodicSignal("background_plus_sine3", P, amplitude=0.0, channel="u", background=bg),
            bg,
        )

    @classmethod
    def sine3(cls, bg: BackgroundSolution, delta, harmonic=1, channel="u"):
        """Background data plus ``delta * sin^3`` on one channel."""
        P = bg.params.P
        pert = PeriodicSignal(
            "background_plus_sine3", P, amplitude=delta, harmonic=harmonic, channel=channel, background=bg
        )
        if channel == "u":
            return cls(PeriodicSignal("constant", P, value=bg.params.rho_ref, channel="rho"), pert, bg)
        u = PeriodicSignal("background_plus_sine3", P, amplitude=0.0, channel="u", background=bg)
        return cls(pert, u, bg)

    @property
    def params(self):
        return self.background.params

    def primitive(self, t) -> PrimitiveState:
        return PrimitiveState(self.rho_l(t), self.u_l(t))

    def validate(self, n_samples=10_000) -> BoundaryReport:
        p = self.params
        rho_jump = abs(self.rho_l(0.0) - p.rho_ref)
        u_jump = abs(self.u_l(0.0) - p.u_ref)
        t = np.linspace(0.0, p.P, n_samples + 1)
        rep = BoundaryReport(True, rho_jump, u_jump, float("nan"))
        if rho_jump > COMPAT_TOL or u_jump > COMPAT_TOL:
            rep.valid = False
            rep.violating_t = 0.0
            rep.violations.append(
                f"compatibility violated at t=0: |rho_l-rho_ref|={rho_jump:.3e}, |u_l-u_ref|={u_jump:.3e}"
            )
        rho = np.asarray(self.rho_l(t))
        if np.any(~(rho > 0)):
            rep.valid = False
            rep.violating_t = float(t[np.argmax(~(rho > 0))])
            rep.violations.append(f"inflow density not positive at t={rep.violating_t:.6g}")
            return rep
        lam1, _ = eigenvalues(to_riemann(PrimitiveState(rho, self.u_l(t)), p), p)
        rep.min_lambda1 = float(np.min(lam1))
        if rep.min_lambda1 <= 0:
            rep.valid = False
            rep.violating_t = float(t[np.argmin(lam1)])
            rep.violations.append(f"inflow not supersonic at t={rep.violating_t:.6g}")
        return rep

    def check(self):
        rep = self.validate()
        if not rep.valid:
            raise ValidationError("; ".join(rep.violations))
        return rep


def boundary_riemann(b: BoundaryData, t) -> RiemannPair:
    return to_riemann(b.primitive(t), b.params)


def extended_star(b: BoundaryData, t) -> RiemannPair:
    """Inflow invariants for t > 0, background invariants for t <= 0."""
    t = np.asarray(t, dtype=float)
    bg = b.background.riemann(t)
    tp = np.where(t > 0, t, 0.0)
    data = boundary_riemann(b, tp)
    r = np.where(t > 0, data.r, bg.r)
    s = np.where(t > 0, data.s, bg.s)
    if r.ndim == 0:
        return RiemannPair(float(r), float(s))
    return RiemannPair(r, s)


def perturbation_h2(b: BoundaryData, n=4096) -> float:
    """Measured size of the inflow perturbation in H^2([0, P]).

    Sum of the discrete H^2 norms of ``rho_l - rho_ref`` and
    ``u_l - exp(A) u_ref`` on ``n`` periodic samples.
    """
    P = b.params.P
    t = np.arange(n) * (P / n)
    bg = b.background.primitive(t)
    return h2_norm_periodic(b.rho_l(t) - bg.rho, P) + h2_norm_periodic(b.u_l(t) - bg.u, P)


def riemann_deviation(b: BoundaryData, t):
    """``(r_star - r_alpha, s_star - s_alpha)`` stacked along the last axis."""
    q = extended_star(b, t)
    qa = b.background.riemann(t)
    return np.stack([np.asarray(q.r) - qa.r, np.asarray(q.s) - qa.s], axis=-1)


def deviation_h2(b: BoundaryData, t_nodes) -> float:
    """Windowed H^2 norm of the inflow Riemann deviation on uniform ``t_nodes``."""
    t_nodes = np.asarray(t_nodes, dtype=float)
    return h2_norm_window(riemann_deviation(b, t_nodes), t_nodes[1] - t_nodes[0])
