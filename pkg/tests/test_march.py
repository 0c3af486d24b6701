import math
from dataclasses import dataclass

import numpy as np
import pytest

from periodic_euler import kernels
from periodic_euler.boundary import BoundaryData, PeriodicSignal
from periodic_euler.errors import CFLError, SupersonicityLoss, ValidationError
from periodic_euler.forcing import BackgroundSolution, ForcingCoefficient
from periodic_euler.march import MarchGrid, march, report_lambda0

R2 = math.sqrt(2.0)


@pytest.fixture(scope="module")
def zero_bg(params):
    return BackgroundSolution(params, ForcingCoefficient.zero())


def grid_for(bg, npp, t_max=3.0):
    return MarchGrid.build(bg.params, bg.lambda_floor, nt_per_period=npp, t_max=t_max)


def test_grid_layout(background):
    g = grid_for(background, 64)
    assert g.dt == 1 / 64
    assert g.t_min <= -background.params.L / background.lambda_floor
    assert g.n_neg % 2 == 0 and g.n_pos % 2 == 0 and g.segments % 2 == 0
    assert g.t[g.n_neg] == 0.0
    assert np.all(g.t[g.n_neg::64] == np.arange(g.t[g.n_neg::64].size))
    assert g.dx <= 0.9 * background.lambda_floor * g.dt + 1e-15
    c = g.coarsened()
    np.testing.assert_array_equal(c.t, g.t[::2])
    np.testing.assert_allclose(c.x, g.x[::2], atol=1e-15)
    with pytest.raises(ValidationError):
        MarchGrid.build(background.params, background.lambda_floor, nt_per_period=2)
    with pytest.raises(ValidationError):
        MarchGrid.build(background.params, background.lambda_floor, buffer=0.5)


@pytest.mark.parametrize("order", [1, 2])
def test_constant_state_is_fixed_point(zero_bg, order):
    b = BoundaryData.sine3(zero_bg, 0.0)
    f = march(zero_bg.params, zero_bg.forcing, b, grid_for(zero_bg, 32), order)
    assert np.all(f.r == 1 - R2) and np.all(f.s == 1 + R2)
    lam0, T0 = report_lambda0(f)
    assert lam0 == pytest.approx(2 - R2, abs=1e-15)
    assert T0 == pytest.approx(1 / (2 - R2), abs=1e-13)
    assert T0 == pytest.approx(1.7071, abs=1e-4)


def _bg_error(f, bg):
    q = bg.riemann(f.t)
    return max(np.abs(f.r - q.r[:, None]).max(), np.abs(f.s - q.s[:, None]).max())


def test_background_first_order_halving(background):
    b = BoundaryData.from_background(background)
    e = [_bg_error(march(background.params, background.forcing, b, grid_for(background, n), 1), background)
         for n in (64, 128)]
    assert 2 / 1.25 <= e[0] / e[1] <= 2 * 1.25


def test_background_second_order(background):
    b = BoundaryData.from_background(background)
    e = [_bg_error(march(background.params, background.forcing, b, grid_for(background, n), 2), background)
         for n in (64, 128)]
    assert 3.2 <= e[0] / e[1] <= 4.8


def test_background_lambda0_is_strict_minimum(background):
    b = BoundaryData.from_background(background)
    f = march(background.params, background.forcing, b, grid_for(background, 128), 2)
    lam0, _ = report_lambda0(f)
    assert lam0 == pytest.approx(2 - R2, abs=1e-3)


def test_error_estimate_tracks_true_error(background):
    b = BoundaryData.from_background(background)
    f = march(background.params, background.forcing, b, grid_for(background, 128), 2, estimate_error=True)
    true = _bg_error(f.restrict(0.0), background)
    assert 0.3 * true <= f.meta["error_estimate"] <= 3 * true
    t, e = f.meta["error_series"]
    assert t[0] == 0.0 and e.shape == t.shape


def test_perturbed_lambda0_and_invariants(background):
    b = BoundaryData.sine3(background, 1e-2)
    f = march(background.params, background.forcing, b, grid_for(background, 64), 2)
    assert abs(f.meta["lambda0"] - (2 - R2)) <= 0.05
    assert np.all(f.s > f.r)
    assert np.all(f.lambdas()[0] > 0)
    assert f.meta["cfl_history"].shape == f.x.shape


def test_onset_bound_linear_in_perturbation(background):
    g = grid_for(background, 128, t_max=2.0)
    T0 = {}
    for d in (0.0, 1e-2, 5e-3, 2.5e-3):
        b = BoundaryData.sine3(background, d)
        T0[d] = march(background.params, background.forcing, b, g, 2).meta["T0"]
    slopes = [(T0[d] - T0[0.0]) / d for d in (1e-2, 5e-3, 2.5e-3)]
    assert all(s > 0 for s in slopes)
    assert max(slopes) / min(slopes) < 1.3


def test_cfl_violation(background):
    b = BoundaryData.from_background(background)
    g = grid_for(background, 64)
    bad = MarchGrid(g.n_neg, g.n_pos, 4, g.dt, g.L)
    with pytest.raises(CFLError, match="CFL") as exc:
        march(background.params, background.forcing, b, bad, 1)
    assert exc.value.diagnostics["column"] == 0


def test_supersonicity_loss(zero_bg):
    # inflow stays supersonic but dips below the abort threshold lambda_floor / 2
    b = BoundaryData.sine3(zero_bg, 0.5)
    assert b.validate().valid
    with pytest.raises(SupersonicityLoss) as exc:
        march(zero_bg.params, zero_bg.forcing, b, grid_for(zero_bg, 64), 1)
    assert exc.value.diagnostics["lambda1"] <= 0.5 * zero_bg.lambda_floor


def test_bad_order(background):
    with pytest.raises(ValidationError):
        march(background.params, background.forcing, BoundaryData.from_background(background),
              grid_for(background, 32), 3)


@dataclass(frozen=True)
class _Kicked:
    """Wrap a signal and add a bump only for t > t_star."""

    base: PeriodicSignal
    t_star: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.base(t) + np.where(t > self.t_star, 1e-3 * np.sin(7 * t) ** 2, 0.0)


@pytest.mark.parametrize("order", [1, 2])
def test_domain_of_determinacy(background, order):
    b = BoundaryData.sine3(background, 1e-2)
    t_star = 1.5
    kicked = BoundaryData(b.rho_l, _Kicked(b.u_l, t_star), background)
    g = grid_for(background, 64)
    f1 = march(background.params, background.forcing, b, g, order)
    f2 = march(background.params, background.forcing, kicked, g, order)
    keep = f1.t <= t_star
    np.testing.assert_array_equal(f1.r[keep], f2.r[keep])
    np.testing.assert_array_equal(f1.s[keep], f2.s[keep])
    assert np.abs(f1.r[~keep] - f2.r[~keep]).max() > 0


def test_first_order_monotone_without_forcing(zero_bg):
    P = zero_bg.params.P
    u = PeriodicSignal("sine_series", P, value=2.0, coefficients=((0.05, 1), (0.03, 3)))
    rho = PeriodicSignal("constant", P, value=1.0, channel="rho")
    b = BoundaryData(rho, u, zero_bg)
    f = march(zero_bg.params, zero_bg.forcing, b, grid_for(zero_bg, 64), 1)
    tol = 1e-14
    assert np.all(np.diff(f.r.max(axis=0)) <= tol) and np.all(np.diff(f.r.min(axis=0)) >= -tol)
    assert np.all(np.diff(f.s.max(axis=0)) <= tol) and np.all(np.diff(f.s.min(axis=0)) >= -tol)


@pytest.mark.skipif("cython" not in kernels.BACKENDS, reason="compiled kernels not built")
@pytest.mark.parametrize("order", [1, 2])
def test_backends_agree(background, order):
    b = BoundaryData.sine3(background, 1e-2)
    g = grid_for(background, 64)
    fc = march(background.params, background.forcing, b, g, order, backend="cython")
    fp = march(background.params, background.forcing, b, g, order, backend="python")
    np.testing.assert_allclose(fc.r, fp.r, rtol=0, atol=1e-14)
    np.testing.assert_allclose(fc.s, fp.s, rtol=0, atol=1e-14)
