"""Pressure law, Riemann invariants and characteristic speeds.

All functions accept Python floats or numpy arrays; array inputs are
evaluated elementwise.
"""
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DomainError, ValidationError

DENSITY_FLOOR = 1e-12
SONIC_RTOL = 8 * np.finfo(float).eps


@dataclass(frozen=True)
class GasParams:
    """Pressure-law constants, duct geometry and the reference inflow state."""

    a: float = 1.0
    gamma: float = 2.0
    L: float = 1.0
    P: float = 1.0
    rho_ref: float = 1.0
    u_ref: float = 2.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValidationError("pressure coefficient a must be positive")
        if not self.gamma > 1:
            raise ValidationError("gamma must exceed 1")
        if not self.L > 0:
            raise ValidationError("duct length L must be positive")
        if not self.P > 0:
            raise ValidationError("period P must be positive")
        if not self.rho_ref > 0:
            raise ValidationError("reference density must be positive")
        if not self.u_ref > self.c_ref:
            raise ValidationError(
                f"reference state subsonic: u_ref={self.u_ref} <= c_ref={self.c_ref}"
            )

    @property
    def c_ref(self) -> float:
        return float(np.sqrt(self.a * self.gamma) * self.rho_ref ** ((self.gamma - 1) / 2))

    @property
    def lambda_floor(self) -> float:
        """Half the slow speed of the reference state, ``(u_ref - c_ref) / 2``."""
        return 0.5 * (self.u_ref - self.c_ref)


@dataclass(frozen=True)
class PrimitiveState:
    rho: Any
    u: Any


@dataclass(frozen=True)
class RiemannPair:
    r: Any
    s: Any


@dataclass(frozen=True)
class ConservedState:
    rho: Any
    mom: Any


def _positive(rho, what="density"):
    rho = np.asarray(rho, dtype=float)
    if np.any(~(rho > 0)):
        raise DomainError(f"{what} must be positive")
    return rho


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def sound_speed(rho, params: GasParams):
    """``c = sqrt(a*gamma) * rho**((gamma-1)/2)``."""
    rho = _positive(rho)
    return _out(np.sqrt(params.a * params.gamma) * rho ** ((params.gamma - 1) / 2))


def pressure(rho, params: GasParams):
    return _out(params.a * np.asarray(rho, dtype=float) ** params.gamma)


def to_riemann(w: PrimitiveState, params: GasParams) -> RiemannPair:
    c = np.asarray(sound_speed(w.rho, params))
    u = np.asarray(w.u, dtype=float)
    k = c / (params.gamma - 1)
    return RiemannPair(_out(0.5 * u - k), _out(0.5 * u + k))


def sound_speed_from_riemann(q: RiemannPair, params: GasParams):
    return 0.5 * (params.gamma - 1) * (np.asarray(q.s, dtype=float) - np.asarray(q.r, dtype=float))


def from_riemann(q: RiemannPair, params: GasParams) -> PrimitiveState:
    r = np.asarray(q.r, dtype=float)
    s = np.asarray(q.s, dtype=float)
    if np.any(~(s > r)):
        raise DomainError("s must exceed r (non-positive sound speed)")
    c = 0.5 * (params.gamma - 1) * (s - r)
    rho = (c * c / (params.a * params.gamma)) ** (1.0 / (params.gamma - 1))
    return PrimitiveState(_out(rho), _out(r + s))


def eigenvalues(q: RiemannPair, params: GasParams):
    """Characteristic speeds ``(u - c, u + c)`` computed from the invariants."""
    r = np.asarray(q.r, dtype=float)
    s = np.asarray(q.s, dtype=float)
    if np.any(~(s > r)):
        raise DomainError("s must exceed r (non-positive sound speed)")
    u = r + s
    c = 0.5 * (params.gamma - 1) * (s - r)
    return _out(u - c), _out(u + c)


def is_supersonic(q: RiemannPair, params: GasParams):
    """Strictly ``u > c``; states within roundoff of the sonic line count as sonic."""
    lam1, lam2 = eigenvalues(q, params)
    ok = np.asarray(lam1) > SONIC_RTOL * np.abs(lam2)
    return _out(ok) if np.ndim(lam1) else bool(ok)


def primitive_to_conserved(w: PrimitiveState) -> ConservedState:
    rho = np.asarray(w.rho, dtype=float)
    return ConservedState(_out(rho), _out(rho * np.asarray(w.u, dtype=float)))


def conserved_to_primitive(U: ConservedState) -> PrimitiveState:
    rho = np.asarray(U.rho, dtype=float)
    if np.any(~(rho > DENSITY_FLOOR)):
        raise DomainError(f"density below floor {DENSITY_FLOOR}")
    return PrimitiveState(_out(rho), _out(np.asarray(U.mom, dtype=float) / rho))
