"""Time the compiled and numpy kernel backends on the baseline problem.

Usage::

    python benchmarks/bench_kernels.py --repeat 3
"""
import argparse
import time

import numpy as np

from periodic_euler import kernels
from periodic_euler.cli import run_fv, run_march
from periodic_euler.config import RunConfig


def _best(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(cfg, problem, args):
    yield f"march order 2, {args.npp}/period", lambda b: run_march(
        cfg.replace(march__backend=b), problem, args.npp, estimate=False)
    for order in (1, 2):
        c = cfg.replace(fv__scheme_order=order, fv__t_end=args.t_end)
        yield f"fv order {order}, nx {args.nx}", lambda b, c=c: run_fv(
            c.replace(fv__backend=b), problem, args.nx, estimate=False)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--npp", type=int, default=256, help="march samples per period")
    p.add_argument("--nx", type=int, default=512, help="finite-volume cells")
    p.add_argument("--t-end", type=float, default=3.0, help="finite-volume end time")
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    cfg = RunConfig.load()
    problem = cfg.problem()
    backends = [b for b in ("python", "cython") if b in kernels.BACKENDS]
    print(f"backends available: {', '.join(backends)}")
    print(f"{'case':<28}" + "".join(f"{b:>10}" for b in backends) + f"{'speedup':>10}{'max diff':>12}")
    for name, fn in cases(cfg, problem, args):
        timing, fields = {}, {}
        for b in backends:
            timing[b], fields[b] = _best(lambda: fn(b), args.repeat)
        row = f"{name:<28}" + "".join(f"{timing[b]:>9.3f}s" for b in backends)
        if len(backends) == 2:
            diff = max(np.max(np.abs(fields["python"].r - fields["cython"].r)),
                       np.max(np.abs(fields["python"].s - fields["cython"].s)))
            row += f"{timing['python'] / timing['cython']:>9.2f}x{diff:>12.2e}"
        print(row)


if __name__ == "__main__":
    main()
