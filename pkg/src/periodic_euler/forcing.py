"""The periodic force coefficient alpha(t) and the background periodic solution.

``alpha`` is either identically zero, a pure sine series
``sum_k beta_k sin(2 pi k t / P)`` (zero mean by construction, so the
cumulative integral ``A(t)`` is closed-form), or a tabulated period
interpolated by a periodic cubic spline.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline

from .errors import ValidationError
from .gasdyn import GasParams, PrimitiveState, RiemannPair

TOL_INT = 1e-10
KINDS = ("zero", "sine_series", "tabulated")


@dataclass(frozen=True)
class ForcingCoefficient:
    kind: str = "zero"
    period: float = 1.0
    coefficients: tuple = ()
    samples: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown forcing kind {self.kind!r}")
        if not self.period > 0:
            raise ValidationError("forcing period must be positive")
        coeffs = tuple((float(b), int(k)) for b, k in self.coefficients)
        if any(k < 1 for _, k in coeffs):
            raise ValidationError("sine harmonics must be positive integers")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "samples", tuple(float(v) for v in self.samples))
        if self.kind == "tabulated" and len(self.samples) < 4:
            raise ValidationError("tabulated forcing needs at least 4 samples per period")

    @classmethod
    def zero(cls, period=1.0):
        return cls("zero", period)

    @classmethod
    def sine(cls, beta, k=1, period=1.0):
        return cls("sine_series", period, ((beta, k),))

    @classmethod
    def tabulated(cls, samples, period=1.0):
        return cls("tabulated", period, samples=tuple(samples))

    # tabulated machinery -------------------------------------------------
    @cached_property
    def _nodes(self):
        n = len(self.samples)
        return np.arange(n + 1) * (self.period / n)

    @cached_property
    def _spline(self):
        y = np.append(self.samples, self.samples[0])
        return CubicSpline(self._nodes, y, bc_type="periodic")

    @cached_property
    def _antiderivative(self):
        return self._spline.antiderivative()

    @cached_property
    def _A_nodes(self):
        h = self.period / len(self.samples)
        y = np.append(self.samples, self.samples[0])
        return cumulative_simpson(y, dx=h, initial=0.0)

    @property
    def period_integral(self) -> float:
        """Quadrature estimate of the integral of alpha over one period."""
        if self.kind == "tabulated":
            return float(self._A_nodes[-1])
        return 0.0

    # evaluation ---------------------------------------------------------
    def derivative(self, t, order=0):
        t = np.asarray(t, dtype=float)
        if self.kind == "zero":
            out = np.zeros_like(t)
        elif self.kind == "sine_series":
            out = np.zeros_like(t)
            for beta, k in self.coefficients:
                w = 2 * np.pi * k / self.period
                # d^n/dt^n sin(w t) = w^n sin(w t + n pi / 2)
                out = out + beta * w**order * np.sin(w * t + order * np.pi / 2)
        else:
            out = self._spline(np.mod(t, self.period), nu=order)
        return float(out) if out.ndim == 0 else out

    def __call__(self, t):
        return self.derivative(t, 0)

    def cumulative(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "zero":
            out = np.zeros_like(t)
        elif self.kind == "sine_series":
            out = np.zeros_like(t)
            for beta, k in self.coefficients:
                w = 2 * np.pi * k / self.period
                # reduce modulo P first so A(nP) is exactly zero
                out = out + beta * (1.0 - np.cos(w * np.mod(t, self.period))) / w
        else:
            tm = np.mod(t, self.period)
            h = self.period / len(self.samples)
            i = np.minimum((tm / h).astype(int), len(self.samples) - 1)
            F = self._antiderivative
            out = self._A_nodes[i] + F(tm) - F(self._nodes[i])
        return float(out) if out.ndim == 0 else out


def alpha_at(f: ForcingCoefficient, t):
    return f(t)


def cumulative_A(f: ForcingCoefficient, t):
    """``A(t) = int_0^t alpha``, exactly periodic with ``A(nP) = 0``."""
    return f.cumulative(t)


@dataclass
class ForcingReport:
    valid: bool
    relaxed: bool
    period_integral: float
    min_A: float
    t_min_A: float
    min_margin: float
    bound: float
    max_abs: tuple
    violations: list = field(default_factory=list)
    violating_t: Optional[float] = None


def validate(f: ForcingCoefficient, params: GasParams, relaxed=False, n_samples=10_000) -> ForcingReport:
    """Check zero mean and the lower bound on ``A``; never raises.

    ``min_margin`` is the minimum of ``exp(A) u_ref - c_ref`` over one period,
    i.e. the slow speed of the background. ``max_abs`` holds
    ``max |alpha|, |alpha'|, |alpha''|`` of the representation. For tabulated
    forcing these come from the spline, which says nothing certain about the
    function the samples were taken from.
    """
    t = np.linspace(0.0, f.period, n_samples + 1)
    A = np.asarray(f.cumulative(t))
    integral = f.period_integral
    i_min = int(np.argmin(A))
    bound = float(np.log(params.c_ref / params.u_ref)) + TOL_INT if relaxed else -TOL_INT
    margin = np.exp(A) * params.u_ref - params.c_ref
    report = ForcingReport(
        valid=True,
        relaxed=relaxed,
        period_integral=integral,
        min_A=float(A[i_min]),
        t_min_A=float(t[i_min]),
        min_margin=float(margin.min()),
        bound=bound,
        max_abs=tuple(float(np.max(np.abs(f.derivative(t, n)))) for n in range(3)),
    )
    if abs(integral) > TOL_INT:
        report.valid = False
        report.violations.append(f"integral of alpha over one period is {integral:.3e}, not 0")
    bad = A <= bound if relaxed else A < bound
    if np.any(bad):
        report.valid = False
        report.violating_t = float(t[np.argmax(bad)])
        which = "ln(c_ref/u_ref)" if relaxed else "0"
        report.violations.append(
            f"cumulative integral A(t)={A[bad][0]:.3e} below {which} at t={report.violating_t:.6g}"
        )
    return report


@dataclass(frozen=True)
class BackgroundSolution:
    """The x-independent periodic solution ``(rho_ref, exp(A(t)) u_ref)``."""

    params: GasParams
    forcing: ForcingCoefficient

    def velocity(self, t):
        return np.exp(self.forcing.cumulative(t)) * self.params.u_ref

    def primitive(self, t) -> PrimitiveState:
        u = self.velocity(t)
        rho = np.full_like(np.asarray(u, dtype=float), self.params.rho_ref)
        return PrimitiveState(float(rho) if rho.ndim == 0 else rho, u)

    def riemann(self, t) -> RiemannPair:
        half_u = 0.5 * self.velocity(t)
        k = self.params.c_ref / (self.params.gamma - 1)
        return RiemannPair(half_u - k, half_u + k)

    def lambda1(self, t):
        return self.velocity(t) - self.params.c_ref

    @property
    def lambda_floor(self) -> float:
        """Half the minimum over one period of the background slow speed."""
        t = np.linspace(0.0, self.forcing.period, 10_001)
        return 0.5 * float(np.min(self.lambda1(t)))


def background_primitive(bg: BackgroundSolution, t) -> PrimitiveState:
    return bg.primitive(t)


def background_riemann(bg: BackgroundSolution, t) -> RiemannPair:
    return bg.riemann(t)


def background_ode_residual(bg: BackgroundSolution, t, h=1e-6):
    """Centered-difference residuals of ``r' = s' = alpha (r + s) / 2``.

    Returns the pair of residual arrays for the two invariants at ``t``.
    """
    t = np.asarray(t, dtype=float)
    qp, qm, q = bg.riemann(t + h), bg.riemann(t - h), bg.riemann(t)
    rhs = 0.5 * bg.forcing(t) * (q.r + q.s)
    return (qp.r - qm.r) / (2 * h) - rhs, (qp.s - qm.s) / (2 * h) - rhs
