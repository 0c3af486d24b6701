import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from periodic_euler.boundary import (
    BoundaryData,
    PeriodicSignal,
    boundary_riemann,
    deviation_h2,
    extended_star,
    perturbation_h2,
    riemann_deviation,
)
from periodic_euler.errors import ValidationError
from periodic_euler.forcing import BackgroundSolution, ForcingCoefficient, background_ode_residual

R2 = math.sqrt(2.0)
W = 2 * math.pi
SIN3_H2 = math.sqrt(5 / 16 + W**2 * 9 / 16 + W**4 * 90 / 32)


@pytest.fixture(scope="module")
def zero_bg(params):
    return BackgroundSolution(params, ForcingCoefficient.zero())


def test_constant_boundary_invariants(zero_bg):
    b = BoundaryData.sine3(zero_bg, 0.0)
    q = boundary_riemann(b, np.linspace(0, 3, 50))
    np.testing.assert_allclose(q.r, 1 - R2, atol=1e-15)
    np.testing.assert_allclose(q.s, 1 + R2, atol=1e-15)


def test_background_boundary(background):
    b = BoundaryData.from_background(background)
    t = np.linspace(0, 2, 101)
    q, qa = boundary_riemann(b, t), background.riemann(t)
    np.testing.assert_allclose(q.r, qa.r, atol=1e-15)
    np.testing.assert_allclose(q.s, qa.s, atol=1e-15)
    assert perturbation_h2(b) == 0.0


def test_compatibility_and_validation(background):
    b = BoundaryData.sine3(background, 1e-2)
    q0 = boundary_riemann(b, 0.0)
    assert (q0.r, q0.s) == pytest.approx((1 - R2, 1 + R2), abs=1e-15)
    rep = b.check()
    assert rep.valid and rep.min_lambda1 > 0


def test_incompatible_boundary_rejected(background):
    P = background.params.P
    bad = BoundaryData(PeriodicSignal("constant", P, value=1.1, channel="rho"),
                       PeriodicSignal("background_plus_sine3", P, channel="u", background=background), background)
    rep = bad.validate()
    assert not rep.valid and rep.violating_t == 0.0
    with pytest.raises(ValidationError, match="compatibility"):
        bad.check()


def test_subsonic_boundary_rejected(background):
    big = BoundaryData.sine3(background, -1.5)
    rep = big.validate()
    assert not rep.valid
    assert any("supersonic" in v for v in rep.violations)


def test_extended_star_branches(background):
    b = BoundaryData.sine3(background, 1e-2)
    q = extended_star(b, -1.0)
    qa = background.riemann(-1.0)
    assert (q.r, q.s) == (qa.r, qa.s)
    q = extended_star(b, 0.3)
    ql = boundary_riemann(b, 0.3)
    assert (q.r, q.s) == (ql.r, ql.s)


def test_extended_star_properties(background):
    b = BoundaryData.sine3(background, 1e-2)
    t = np.linspace(0.01, 2.0, 200)
    q1, q2 = extended_star(b, t), extended_star(b, t + 1.0)
    np.testing.assert_allclose(q2.r, q1.r, atol=1e-12)
    np.testing.assert_allclose(q2.s, q1.s, atol=1e-12)
    # below t = 0 the data is the background and solves its ODE
    tn = np.linspace(-3.0, -0.01, 100)
    rr, rs = background_ode_residual(background, tn)
    qs = extended_star(b, tn)
    np.testing.assert_array_equal(qs.r, background.riemann(tn).r)
    assert np.abs(rr).max() < 1e-6 and np.abs(rs).max() < 1e-6


def test_extension_is_c2_across_zero(background):
    b = BoundaryData.sine3(background, 1e-2)
    h = 1e-3
    t = np.array([-2 * h, -h, 0.0, h, 2 * h])
    m = riemann_deviation(b, t)
    # value and first two differences of the deviation vanish to O(h^3) at t = 0
    assert np.abs(m).max() < 1e-2 * (W * h) ** 3 * 10
    d2 = (m[3] - 2 * m[2] + m[1]) / h**2
    assert np.abs(d2).max() < 1e-2 * W**3 * h * 10


def test_signal_derivatives(background):
    for channel in ("u", "rho"):
        sig = PeriodicSignal("background_plus_sine3", 1.0, amplitude=0.05, harmonic=2,
                             channel=channel, background=background)
        t = np.linspace(0.05, 0.95, 17)
        h = 1e-5
        d1 = (sig(t + h) - sig(t - h)) / (2 * h)
        d2 = (sig.derivative(t + h, 1) - sig.derivative(t - h, 1)) / (2 * h)
        np.testing.assert_allclose(sig.derivative(t, 1), d1, rtol=1e-6, atol=1e-7)
        np.testing.assert_allclose(sig.derivative(t, 2), d2, rtol=1e-6, atol=1e-6)
        np.testing.assert_allclose(sig(t + 1.0), sig(t), atol=1e-12)


def test_tabulated_and_sine_signals():
    n = 128
    t = np.arange(n) / n
    tab = PeriodicSignal("tabulated", 1.0, samples=tuple(2.0 + 0.1 * np.sin(W * t)))
    ser = PeriodicSignal("sine_series", 1.0, value=2.0, coefficients=((0.1, 1),))
    probe = np.linspace(0, 3, 301)
    np.testing.assert_allclose(tab(probe), ser(probe), atol=1e-6)
    np.testing.assert_allclose(tab.derivative(probe, 1), ser.derivative(probe, 1), atol=1e-4)


def test_perturbation_h2_oracle(background):
    b = BoundaryData.sine3(background, 1e-2)
    assert perturbation_h2(b) == pytest.approx(1e-2 * SIN3_H2, rel=1e-4)


def test_rho_channel_perturbation(background):
    b = BoundaryData.sine3(background, 1e-2, channel="rho")
    assert b.check().valid
    assert b.rho_l(0.25) == pytest.approx((1 + 1e-2) ** 2, abs=1e-14)
    assert perturbation_h2(b) > 0


def test_deviation_h2_window(background):
    b = BoundaryData.sine3(background, 1e-2)
    t = 2.0 + np.arange(257) / 256
    # the Riemann deviation is half the velocity perturbation in each invariant
    ref = math.sqrt(2) * 0.5 * 1e-2 * SIN3_H2
    assert deviation_h2(b, t) == pytest.approx(ref, rel=1e-3)


@settings(max_examples=25, deadline=None)
@given(delta=st.floats(1e-4, 5e-2), scale=st.floats(0.1, 3.0))
def test_perturbation_h2_homogeneous(delta, scale):
    from periodic_euler.gasdyn import GasParams
    bg = BackgroundSolution(GasParams(), ForcingCoefficient.sine(0.5, 1))
    a = perturbation_h2(BoundaryData.sine3(bg, delta), n=1024)
    b = perturbation_h2(BoundaryData.sine3(bg, scale * delta), n=1024)
    assert b == pytest.approx(scale * a, rel=1e-12)
