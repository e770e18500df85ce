"""Time the compiled kernels against the numpy fallback.

Usage::

    python benchmarks/bench_core.py [--repeat 5] [--quick]

Prints one line per (kernel, size) with the median time of each backend and
the speedup, after checking that both backends agree.
"""
import argparse
import statistics
import time

import numpy as np

from anchornys import _accel
from anchornys.dataio import make_rng

CASES = {
    # (queries, points, dim)
    "linf_argmin": [(2000, 400, 3), (20000, 800, 8), (100000, 200, 3)],
    "sqdist": [(1000, 1000, 8), (4000, 300, 8), (2000, 2000, 2)],
    "inner": [(1000, 1000, 8), (4000, 300, 8), (2000, 2000, 2)],
}


def median_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="first size of each kernel only")
    args = ap.parse_args(argv)

    names = _accel.available()
    if "compiled" not in names:
        print("compiled extension not built; only the numpy backend is available")
    backends = {n: _accel.get_backend(n) for n in names}
    rng = make_rng(7)
    print(f"{'kernel':<12} {'shape':<20} " + " ".join(f"{n + ' ms':>12}" for n in names) + "   speedup")
    for kernel, cases in CASES.items():
        for nq, npts, d in cases[:1] if args.quick else cases:
            a = rng.standard_normal((nq, d))
            b = rng.standard_normal((npts, d))
            outs = {n: getattr(be, kernel)(a, b) for n, be in backends.items()}
            if len(outs) == 2:
                if kernel == "linf_argmin":
                    assert np.array_equal(outs["compiled"], outs["python"]), kernel
                else:
                    np.testing.assert_allclose(outs["compiled"], outs["python"], rtol=1e-12, atol=1e-12)
            ms = {n: 1e3 * median_time(lambda be=be: getattr(be, kernel)(a, b), args.repeat)
                  for n, be in backends.items()}
            speed = f"{ms['python'] / ms['compiled']:8.2f}x" if "compiled" in ms else "       -"
            print(f"{kernel:<12} {f'{nq}x{npts}x{d}':<20} "
                  + " ".join(f"{ms[n]:12.2f}" for n in names) + "  " + speed)


if __name__ == "__main__":
    main()
