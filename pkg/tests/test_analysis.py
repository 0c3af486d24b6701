import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from periodic_euler import analysis as an
from periodic_euler.boundary import BoundaryData, deviation_h2
from periodic_euler.cli import compare_fields
from periodic_euler.errors import WindowTooShort
from periodic_euler.forcing import BackgroundSolution, ForcingCoefficient
from periodic_euler.fv import FvGrid, fv_run
from periodic_euler.march import MarchGrid, march

R2 = math.sqrt(2.0)


def field_on(bg, npp, t_span, nx=11):
    nt = int(round((t_span[1] - t_span[0]) * npp)) + 1
    t = t_span[0] + np.arange(nt) / npp
    return an.exact_background_field(bg.params, bg, t, np.linspace(0.0, bg.params.L, nx))


def run_march(bg, delta, npp=64, order=2, t_max=5.0, estimate=True):
    g = MarchGrid.build(bg.params, bg.lambda_floor, nt_per_period=npp, t_max=t_max)
    b = BoundaryData.sine3(bg, delta)
    return march(bg.params, bg.forcing, b, g, order, estimate_error=estimate), b


@pytest.fixture(scope="module")
def zero_bg(params):
    return BackgroundSolution(params, ForcingCoefficient.zero())


@pytest.fixture(scope="module")
def small_runs(background):
    return {d: run_march(background, d) for d in (0.0, 1e-2, 5e-3)}


# ------------------------------------------------------------ characteristics
def test_trace_constant_field(zero_bg):
    f = field_on(zero_bg, 64, (0.0, 3.0), nx=101)
    c1 = an.trace_characteristic(f, (2.0, 1.0), 1)
    c2 = an.trace_characteristic(f, (2.0, 1.0), 2)
    assert c1.complete and c2.complete
    assert c1.t[-1] == pytest.approx(2 - 1 / (2 - R2), abs=1e-12)
    assert c1.t[-1] == pytest.approx(0.2929, abs=1e-4)
    assert c2.t[-1] == pytest.approx(2 - 1 / (2 + R2), abs=1e-12)
    assert c2.t[-1] == pytest.approx(1.7071, abs=1e-4)
    np.testing.assert_allclose(c1.t, 2 - (1 - c1.x) / (2 - R2), atol=1e-12)
    assert c1.x[-1] == 0.0 and c1.x[0] == 1.0
    assert np.all(np.diff(c1.t) < 0) and np.all(np.diff(c2.t) < 0)
    assert np.all(c1.t[1:] < c2.t[1:])


def test_trace_background_against_ode(background):
    f = field_on(background, 4096, (0.0, 3.0))
    for start in ((2.0, 1.0), (2.7, 0.6)):
        c = an.trace_characteristic(f, start, 1)
        lam = lambda t: background.velocity(t) - background.params.c_ref  # noqa: E731
        sol = solve_ivp(lambda x, t: 1.0 / lam(t), (start[1], 0.0), [start[0]], rtol=1e-12, atol=1e-13)
        assert c.t[-1] == pytest.approx(sol.y[0, -1], abs=1e-6)


def test_trace_leaves_window(zero_bg):
    f = field_on(zero_bg, 64, (0.0, 3.0), nx=51)
    c = an.trace_characteristic(f, (0.3, 1.0), 1)
    assert not c.complete
    assert c.t.min() >= 0.0 and c.x[-1] > 0.0
    with pytest.raises(ValueError):
        an.trace_characteristic(f, (5.0, 0.5), 1)
    with pytest.raises(ValueError):
        an.trace_characteristic(f, (1.0, 0.5), 3)


def test_influence_front_constant(zero_bg):
    f = field_on(zero_bg, 64, (0.0, 3.0), nx=51)
    assert an.influence_front(f) == pytest.approx(1 / (2 - R2), abs=1e-12)


@settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(tp=st.floats(2.0, 4.0), xp=st.floats(0.05, 1.0))
def test_slow_curve_below_fast_curve(small_runs, tp, xp):
    f, _ = small_runs[1e-2]
    c1 = an.trace_characteristic(f, (tp, xp), 1)
    c2 = an.trace_characteristic(f, (tp, xp), 2)
    x = np.linspace(0.0, xp, 25)[:-1]
    assert np.all(c1.t_at(x) < c2.t_at(x))
    assert c1.t[0] == c2.t[0] == tp


# ---------------------------------------------------------------- periodicity
def test_onset_time_rule():
    t = np.arange(6.0)
    assert an.onset_time(t, np.array([5, 4, 0.1, 3, 0.1, 0.1]), 1.0) == 4.0
    assert an.onset_time(t, np.zeros(6), 1.0) == 0.0
    assert an.onset_time(t, np.ones(6), 0.5) is None


def test_background_periodicity(small_runs, background):
    f, _ = small_runs[0.0]
    rep = an.periodicity_residual(f)
    err = an.linf_error_vs_background(f, background)
    assert rep.R_sup.max() <= err
    assert rep.onset_detected == 0.0 == rep.t[0]
    assert np.all(rep.R_sup >= 0) and np.all(rep.R_l2 >= 0)


def test_perturbed_periodicity_ratio(small_runs):
    f, _ = small_runs[1e-2]
    rep = an.periodicity_residual(f)
    T0 = rep.T0_predicted
    assert rep.tol_used == pytest.approx(10 * f.meta["error_estimate"])
    pre = rep.R_sup[rep.t <= T0 - 0.1].max()
    assert pre >= 100 * rep.window_max(T0 + 0.1, T0 + 1.0)
    assert rep.onset_detected is not None


def test_periodicity_window_too_short(background):
    f, _ = run_march(background, 1e-2, npp=32, t_max=3.0)
    with pytest.raises(WindowTooShort):
        an.periodicity_residual(f)


def test_periodicity_needs_estimate(background):
    f, _ = run_march(background, 1e-2, npp=32, estimate=False)
    with pytest.raises(ValueError, match="error estimate"):
        an.periodicity_residual(f)
    assert an.periodicity_residual(f, tol=1e-3).tol_used == 1e-3


# ------------------------------------------------------------------ deviation
def test_deviation_background(small_runs, background):
    f, _ = small_runs[0.0]
    d = an.deviation_c1(f, background)
    err = an.linf_error_vs_background(f, background)
    assert d.sup_m <= err
    assert d.sup_m_t <= 10 * err / f.dt and d.sup_m_x <= 10 * err
    assert d.sup_rho <= 2 * err


def test_deviation_linear(small_runs, background):
    a = an.deviation_c1(small_runs[1e-2][0], background)
    b = an.deviation_c1(small_runs[5e-3][0], background)
    for x, y in zip(a.as_tuple(), b.as_tuple()):
        assert 1.6 <= x / y <= 2.4


# ------------------------------------------------------------------ energy
def test_energy_background(small_runs, background):
    f, _ = small_runs[0.0]
    est = an.error_estimate(f, 0.0)
    e = an.energy_functional(f, (3.2, 1.0))
    assert e.I.max() <= est**2


def test_energy_boundary_column(small_runs):
    f, _ = small_runs[1e-2]
    e = an.energy_functional(f, (3.0, 0.7))
    t, Vr, Vs = an.period_difference(f)
    direct = 0.5 * an.strip_integral(t, Vr[:, 0] ** 2 + Vs[:, 0] ** 2, e.t1[0], e.t2[0])
    assert e.x[0] == 0.0
    assert abs(e.I[0] - direct) <= 1e-12
    assert np.all(e.t1 <= e.t2)


def test_energy_perturbed_after_onset(small_runs):
    f, _ = small_runs[1e-2]
    T0 = f.meta["T0"]
    est = an.error_estimate(f, 0.0)
    e = an.energy_functional(f, (T0 + 1.3, 1.0))
    assert e.I.max() <= (10 * est) ** 2 * (e.t2 - e.t1).max()


def test_energy_before_onset_is_positive(small_runs):
    f, _ = small_runs[1e-2]
    # strips below the slow characteristic from (0, 0) still see the t <= 0 extension
    e = an.energy_functional(f, (1.0, 1.0))
    assert e.I.max() > 1e-8


def test_energy_window_errors(small_runs):
    f, _ = small_runs[1e-2]
    with pytest.raises(WindowTooShort):
        an.energy_functional(f, (4.5, 1.0))
    g = f.restrict(0.0)
    with pytest.raises(WindowTooShort):
        an.energy_functional(g, (0.2, 1.0))


def test_strip_integral_exact_on_linear():
    t = np.linspace(0, 1, 11)
    assert an.strip_integral(t, 3 * t, 0.15, 0.72) == pytest.approx(1.5 * (0.72**2 - 0.15**2), abs=1e-14)


# -------------------------------------------------------------- H2 profile
def test_h2_profile_background(small_runs, background):
    f, _ = small_runs[0.0]
    p = an.h2_profile(f, background)
    err = an.linf_error_vs_background(f, background)
    # H2 of an O(err) smooth error over a unit window
    assert p.norms.max() <= 1e3 * err
    assert p.t_window.size == 65


def test_h2_profile_scaling_and_boundary(small_runs, background):
    pa = an.h2_profile(small_runs[1e-2][0], background)
    pb = an.h2_profile(small_runs[5e-3][0], background, t_lo=pa.t_window[0])
    ratio = pa.norms / pb.norms
    assert ratio.min() >= 1.6 and ratio.max() <= 2.4
    b = small_runs[1e-2][1]
    assert abs(pa.norms[0] - deviation_h2(b, pa.t_window)) <= 1e-6
    assert math.isfinite(pa.C_fit) and pa.C_fit >= 0


def test_exponential_rate():
    x = np.linspace(0, 1, 11)
    assert an.exponential_rate(x, np.exp(0.5 * 1.3 * x)) == pytest.approx(1.3, rel=1e-12)
    assert an.exponential_rate(x, np.exp(-x)) == 0.0


def test_window_nodes(small_runs):
    f, _ = small_runs[1e-2]
    w = an.window_nodes(f, 1.7)
    assert f.t[w.start] >= 1.7 and w.stop - w.start == 65
    with pytest.raises(WindowTooShort):
        an.window_nodes(f, 4.5)


# -------------------------------------------------------------- convergence
def test_convergence_study(background):
    bg_b = BoundaryData.from_background(background)

    def run(n):
        g = MarchGrid.build(background.params, background.lambda_floor, nt_per_period=n, t_max=2.0)
        return march(background.params, background.forcing, bg_b, g, 1)

    tab = an.convergence_study(run, [32, 64, 128], background)
    assert 0.8 <= tab.fitted_order <= 1.2
    assert np.isnan(tab.local_order[0]) and len(tab.rows) == 3
    with pytest.raises(ValueError, match="at least 3"):
        an.convergence_study(run, [32, 64], background)


def test_convergence_against_fine_reference(background):
    b = BoundaryData.sine3(background, 1e-2)

    def run(n):
        g = MarchGrid.build(background.params, background.lambda_floor, nt_per_period=n, t_max=2.0)
        return march(background.params, background.forcing, b, g, 2)

    # the sin^3 data is pre-asymptotic on coarse grids; the local order settles near 2
    tab = an.convergence_study(run, [64, 128, 256], run(1024))
    assert 1.4 <= tab.fitted_order <= 2.4
    assert tab.local_order[-1] >= 1.7


def test_fit_order():
    h = np.array([0.1, 0.05, 0.025])
    assert an.fit_order(h, 3 * h**2) == pytest.approx(2.0, abs=1e-12)


# ------------------------------------------------------------ cross-solver
def test_cross_difference_constant(zero_bg):
    b = BoundaryData.sine3(zero_bg, 0.0)
    g = MarchGrid.build(zero_bg.params, zero_bg.lambda_floor, nt_per_period=32, t_max=3.0)
    fm = march(zero_bg.params, zero_bg.forcing, b, g, 2)
    ff = fv_run(zero_bg.params, zero_bg.forcing, b, FvGrid(64, t_end=3.0), "hll", 2)
    rep = an.cross_difference(fm, ff, 0.0, 3.0)
    assert rep.linf <= 1e-12 and rep.n_points > 0


def test_cross_difference_mismatched_resolutions(background):
    b = BoundaryData.sine3(background, 1e-2)
    g = MarchGrid.build(background.params, background.lambda_floor, nt_per_period=128, t_max=4.0)
    fm = march(background.params, background.forcing, b, g, 2, estimate_error=True)
    ff = fv_run(background.params, background.forcing, b, FvGrid(200, t_end=4.0), "hll", 2, estimate_error=True)
    rep, tol = compare_fields(fm, ff)
    assert rep.linf <= tol
    # dominated by the coarser scheme: within a few of its own error estimate
    T0 = fm.meta["T0"]
    assert rep.linf <= 5 * an.error_estimate(ff, T0 + 1, T0 + 2)


def test_residuals_agree_across_solvers(suite):
    fm, ff = suite.march, suite.fv
    rm = an.periodicity_residual(fm)
    rf = an.periodicity_residual(ff, T0=fm.meta["T0"])
    _, tol = compare_fields(fm, ff)
    # both series live on the same record times t = k P / 256
    np.testing.assert_allclose(rf.t, rm.t[: rf.t.size], atol=1e-12)
    assert np.abs(rm.R_sup[: rf.t.size] - rf.R_sup).max() <= tol


def test_summary_lines(small_runs, background):
    f, _ = small_runs[1e-2]
    lines = an.summary_lines(f, background, an.periodicity_residual(f), an.h2_profile(f, background),
                             an.deviation_c1(f, background))
    text = "\n".join(lines)
    for key in ("lambda0", "T0", "onset", "C_fit", "sup|m|"):
        assert key in text
