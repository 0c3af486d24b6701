"""Pure numpy implementation of the hot loops (fallback backend)."""
import numpy as np

OK, CFL_VIOLATION, SUPERSONIC_LOSS, NON_FINITE = 0, 1, 2, 3


def _speeds(r, s, gamma):
    u = r + s
    c = 0.5 * (gamma - 1.0) * (s - r)
    return u - c, u + c


def _rhs(r, s, alpha, dt, gamma, order, fr, fs):
    lam1, lam2 = _speeds(r, s, gamma)
    src = 0.5 * alpha * (r + s)
    if order == 1:
        fr[1:] = (src[1:] - (r[1:] - r[:-1]) / dt) / lam1[1:]
        fs[1:] = (src[1:] - (s[1:] - s[:-1]) / dt) / lam2[1:]
    else:
        h2 = 2.0 * dt
        fr[2:] = (src[2:] - (3.0 * r[2:] - 4.0 * r[1:-1] + r[:-2]) / h2) / lam1[2:]
        fs[2:] = (src[2:] - (3.0 * s[2:] - 4.0 * s[1:-1] + s[:-2]) / h2) / lam2[2:]


def _check(r, s, gamma, dt, dx, lam_abort):
    lam1, _ = _speeds(r, s, gamma)
    lmin = lam1.min()
    if not (np.isfinite(lmin) and np.all(np.isfinite(s))):
        return NON_FINITE, lmin
    if lmin <= lam_abort:
        return SUPERSONIC_LOSS, lmin
    if dx > dt * lmin:
        return CFL_VIOLATION, lmin
    return OK, lmin


def march_columns(r, s, alpha, dt, dx, gamma, order, lam_abort):
    """March the invariants across the duct, one x-column at a time.

    ``r`` and ``s`` have shape ``(nx, nt)``; column 0 and the bottom ``order``
    rows of every column must be filled on entry, the rest is overwritten.
    Returns ``(status, column, lam_min)`` where ``lam_min[i]`` is the minimum
    slow speed on column ``i`` (checked before that column is advanced).
    """
    nx, nt = r.shape
    lam_min = np.full(nx, np.nan)
    fr = np.zeros(nt)
    fs = np.zeros(nt)
    for i in range(nx):
        status, lam_min[i] = _check(r[i], s[i], gamma, dt, dx, lam_abort)
        if status != OK:
            return status, i, lam_min
        if i == nx - 1:
            break
        ri, si = r[i], s[i]
        _rhs(ri, si, alpha, dt, gamma, order, fr, fs)
        if order == 1:
            r[i + 1, 1:] = ri[1:] + dx * fr[1:]
            s[i + 1, 1:] = si[1:] + dx * fs[1:]
        else:
            rh = ri + 0.5 * dx * fr
            sh = si + 0.5 * dx * fs
            _rhs(rh, sh, alpha, dt, gamma, order, fr, fs)
            r[i + 1, 2:] = ri[2:] + dx * fr[2:]
            s[i + 1, 2:] = si[2:] + dx * fs[2:]
    return OK, nx - 1, lam_min


def _minmod(a, b):
    return np.where(a * b > 0.0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def fv_rhs(rho, mom, rho_in, mom_in, dx, alpha_t, a, gamma, flux, order, drho, dmom):
    """Semi-discrete right-hand side of the balance law on interior cells.

    Two inflow ghosts hold ``(rho_in, mom_in)``; two outflow ghosts copy the
    last cell. ``flux`` is 0 for Rusanov, 1 for HLL. Results go to
    ``drho`` and ``dmom``.
    """
    n = rho.shape[0]
    R = np.empty(n + 4)
    M = np.empty(n + 4)
    R[:2], M[:2] = rho_in, mom_in
    R[2:-2], M[2:-2] = rho, mom
    R[-2:], M[-2:] = rho[-1], mom[-1]
    if order == 1:
        RL, RR = R[1:-2], R[2:-1]
        ML, MR = M[1:-2], M[2:-1]
    else:
        dR = _minmod(R[1:-1] - R[:-2], R[2:] - R[1:-1])
        dM = _minmod(M[1:-1] - M[:-2], M[2:] - M[1:-1])
        RL = (R[1:-1] + 0.5 * dR)[:-1]
        RR = (R[1:-1] - 0.5 * dR)[1:]
        ML = (M[1:-1] + 0.5 * dM)[:-1]
        MR = (M[1:-1] - 0.5 * dM)[1:]
    uL, uR = ML / RL, MR / RR
    k = np.sqrt(a * gamma)
    cL = k * RL ** (0.5 * (gamma - 1.0))
    cR = k * RR ** (0.5 * (gamma - 1.0))
    F0L, F0R = ML, MR
    F1L = ML * uL + a * RL**gamma
    F1R = MR * uR + a * RR**gamma
    if flux == 0:
        smax = np.maximum(np.abs(uL) + cL, np.abs(uR) + cR)
        F0 = 0.5 * (F0L + F0R) - 0.5 * smax * (RR - RL)
        F1 = 0.5 * (F1L + F1R) - 0.5 * smax * (MR - ML)
    else:
        SL = np.minimum(uL - cL, uR - cR)
        SR = np.maximum(uL + cL, uR + cR)
        with np.errstate(invalid="ignore", divide="ignore"):
            inv = 1.0 / (SR - SL)
            H0 = (SR * F0L - SL * F0R + SL * SR * (RR - RL)) * inv
            H1 = (SR * F1L - SL * F1R + SL * SR * (MR - ML)) * inv
        F0 = np.where(SL >= 0.0, F0L, np.where(SR <= 0.0, F0R, H0))
        F1 = np.where(SL >= 0.0, F1L, np.where(SR <= 0.0, F1R, H1))
    drho[:] = -(F0[1:] - F0[:-1]) / dx
    dmom[:] = -(F1[1:] - F1[:-1]) / dx + alpha_t * mom


def max_wavespeed(rho, mom, a, gamma):
    u = mom / rho
    c = np.sqrt(a * gamma) * rho ** (0.5 * (gamma - 1.0))
    return float(np.max(np.abs(u) + c))
