"""Discrete H^2 norms of time signals."""
import numpy as np


def second_difference(f, h, axis=0):
    """Second derivative: centered inside, one-sided second order at the edges."""
    f = np.moveaxis(np.asarray(f, dtype=float), axis, 0)
    if f.shape[0] < 4:
        raise ValueError("need at least 4 samples for a second-order second difference")
    d2 = np.empty_like(f)
    d2[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / h**2
    d2[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / h**2
    d2[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / h**2
    return np.moveaxis(d2, 0, axis)


def h2_norms_columns(f, h):
    """Windowed H^2 norm of each column of ``f[time, column, component]``."""
    f = np.asarray(f, dtype=float)
    d1 = np.gradient(f, h, axis=0, edge_order=2)
    d2 = second_difference(f, h)
    sq = (f**2 + d1**2 + d2**2).sum(axis=2)
    return np.sqrt(np.trapezoid(sq, dx=h, axis=0))


def h2_norm_window(f, h):
    """H^2 norm of samples on a closed window (axis 0 is time).

    A trailing axis, if present, holds components whose squares are summed.
    """
    f = np.asarray(f, dtype=float)
    f = f.reshape(f.shape[0], 1, -1)
    return float(h2_norms_columns(f, h)[0])


def h2_norm_periodic(f, period):
    """H^2 norm over one period of uniform samples ``f(i*period/N)``, i < N."""
    f = np.asarray(f, dtype=float)
    h = period / f.shape[0]
    fp, fm = np.roll(f, -1, axis=0), np.roll(f, 1, axis=0)
    d1 = (fp - fm) / (2 * h)
    d2 = (fp - 2 * f + fm) / h**2
    sq = f**2 + d1**2 + d2**2
    # periodic trapezoid rule = rectangle sum
    return float(np.sqrt(np.sum(sq) * h))
