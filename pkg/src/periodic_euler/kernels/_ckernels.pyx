# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot loops; same signatures as ``_pykernels``."""
import numpy as np
from libc.math cimport sqrt, pow, fabs, isfinite

cdef int OK = 0
cdef int CFL_VIOLATION = 1
cdef int SUPERSONIC_LOSS = 2
cdef int NON_FINITE = 3


cdef void _rhs(const double[::1] r, const double[::1] s, const double[::1] alpha,
               double dt, double gamma, int order, double[::1] fr, double[::1] fs) noexcept nogil:
    cdef Py_ssize_t j, nt = r.shape[0]
    cdef double g = 0.5 * (gamma - 1.0), u, c, src, h2 = 2.0 * dt
    for j in range(order, nt):
        u = r[j] + s[j]
        c = g * (s[j] - r[j])
        src = 0.5 * alpha[j] * u
        if order == 1:
            fr[j] = (src - (r[j] - r[j - 1]) / dt) / (u - c)
            fs[j] = (src - (s[j] - s[j - 1]) / dt) / (u + c)
        else:
            fr[j] = (src - (3.0 * r[j] - 4.0 * r[j - 1] + r[j - 2]) / h2) / (u - c)
            fs[j] = (src - (3.0 * s[j] - 4.0 * s[j - 1] + s[j - 2]) / h2) / (u + c)


def march_columns(double[:, ::1] r, double[:, ::1] s, const double[::1] alpha,
                  double dt, double dx, double gamma, int order, double lam_abort):
    cdef Py_ssize_t i, j, nx = r.shape[0], nt = r.shape[1]
    cdef double g = 0.5 * (gamma - 1.0), lam, lmin
    cdef bint finite
    lam_min_arr = np.full(nx, np.nan)
    cdef double[::1] lam_min = lam_min_arr
    cdef double[::1] fr = np.zeros(nt), fs = np.zeros(nt)
    cdef double[::1] rh = np.empty(nt), sh = np.empty(nt)
    cdef int status = OK
    with nogil:
        for i in range(nx):
            lmin = 1e300
            finite = True
            for j in range(nt):
                lam = r[i, j] + s[i, j] - g * (s[i, j] - r[i, j])
                if not (isfinite(lam) and isfinite(s[i, j])):
                    finite = False
                if lam < lmin:
                    lmin = lam
            lam_min[i] = lmin
            if not finite:
                status = NON_FINITE
            elif lmin <= lam_abort:
                status = SUPERSONIC_LOSS
            elif dx > dt * lmin:
                status = CFL_VIOLATION
            if status != OK:
                break
            if i == nx - 1:
                break
            _rhs(r[i], s[i], alpha, dt, gamma, order, fr, fs)
            if order == 1:
                for j in range(1, nt):
                    r[i + 1, j] = r[i, j] + dx * fr[j]
                    s[i + 1, j] = s[i, j] + dx * fs[j]
            else:
                for j in range(nt):
                    rh[j] = r[i, j] + 0.5 * dx * fr[j]
                    sh[j] = s[i, j] + 0.5 * dx * fs[j]
                _rhs(rh, sh, alpha, dt, gamma, order, fr, fs)
                for j in range(2, nt):
                    r[i + 1, j] = r[i, j] + dx * fr[j]
                    s[i + 1, j] = s[i, j] + dx * fs[j]
    return status, i, lam_min_arr


cdef inline double _minmod(double a, double b) noexcept nogil:
    if a * b <= 0.0:
        return 0.0
    if fabs(a) < fabs(b):
        return a
    return b


def fv_rhs(const double[::1] rho, const double[::1] mom, double rho_in, double mom_in,
           double dx, double alpha_t, double a, double gamma, int flux, int order,
           double[::1] drho, double[::1] dmom):
    cdef Py_ssize_t n = rho.shape[0], k, i
    cdef double[::1] R = np.empty(n + 4), M = np.empty(n + 4)
    cdef double[::1] dR = np.zeros(n + 4), dM = np.zeros(n + 4)
    cdef double[::1] F0 = np.empty(n + 1), F1 = np.empty(n + 1)
    cdef double RL, RR, ML, MR, uL, uR, cL, cR, F0L, F0R, F1L, F1R, smax, SL, SR
    cdef double kc = sqrt(a * gamma), ge = 0.5 * (gamma - 1.0)
    with nogil:
        R[0] = rho_in; R[1] = rho_in; M[0] = mom_in; M[1] = mom_in
        for i in range(n):
            R[i + 2] = rho[i]
            M[i + 2] = mom[i]
        R[n + 2] = rho[n - 1]; R[n + 3] = rho[n - 1]
        M[n + 2] = mom[n - 1]; M[n + 3] = mom[n - 1]
        if order == 2:
            for k in range(1, n + 3):
                dR[k] = _minmod(R[k] - R[k - 1], R[k + 1] - R[k])
                dM[k] = _minmod(M[k] - M[k - 1], M[k + 1] - M[k])
        for k in range(1, n + 2):
            RL = R[k] + 0.5 * dR[k]
            RR = R[k + 1] - 0.5 * dR[k + 1]
            ML = M[k] + 0.5 * dM[k]
            MR = M[k + 1] - 0.5 * dM[k + 1]
            uL = ML / RL
            uR = MR / RR
            cL = kc * pow(RL, ge)
            cR = kc * pow(RR, ge)
            F0L = ML
            F0R = MR
            F1L = ML * uL + a * pow(RL, gamma)
            F1R = MR * uR + a * pow(RR, gamma)
            if flux == 0:
                smax = fabs(uL) + cL
                if fabs(uR) + cR > smax:
                    smax = fabs(uR) + cR
                F0[k - 1] = 0.5 * (F0L + F0R) - 0.5 * smax * (RR - RL)
                F1[k - 1] = 0.5 * (F1L + F1R) - 0.5 * smax * (MR - ML)
            else:
                SL = uL - cL if uL - cL < uR - cR else uR - cR
                SR = uL + cL if uL + cL > uR + cR else uR + cR
                if SL >= 0.0:
                    F0[k - 1] = F0L
                    F1[k - 1] = F1L
                elif SR <= 0.0:
                    F0[k - 1] = F0R
                    F1[k - 1] = F1R
                else:
                    F0[k - 1] = (SR * F0L - SL * F0R + SL * SR * (RR - RL)) / (SR - SL)
                    F1[k - 1] = (SR * F1L - SL * F1R + SL * SR * (MR - ML)) / (SR - SL)
        for i in range(n):
            drho[i] = -(F0[i + 1] - F0[i]) / dx
            dmom[i] = -(F1[i + 1] - F1[i]) / dx + alpha_t * mom[i]


def max_wavespeed(const double[::1] rho, const double[::1] mom, double a, double gamma):
    cdef Py_ssize_t i, n = rho.shape[0]
    cdef double kc = sqrt(a * gamma), ge = 0.5 * (gamma - 1.0), v, best = 0.0
    with nogil:
        for i in range(n):
            v = fabs(mom[i] / rho[i]) + kc * pow(rho[i], ge)
            if v > best:
                best = v
    return best
