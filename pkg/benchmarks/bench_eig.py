"""Compare the compiled Jacobi kernel with the pure-Python fallback.

    python benchmarks/bench_eig.py [--sizes 4 16 64] [--repeat 5]
"""

import argparse
import time

import numpy as np

from reinfanneal import _jacobi_py, mathcore

try:
    from reinfanneal import _jacobi_c
except ImportError:
    _jacobi_c = None


def _hermitian(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (a + a.conj().T)


def _best_of(fn, m, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(m, mathcore.MAX_SWEEPS, mathcore.REL_TOL)
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[2, 4, 16, 64])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"active backend: {mathcore.BACKEND}")
    print(f"{'d':>4} {'python [ms]':>12} {'cython [ms]':>12} {'speedup':>8}")
    for d in args.sizes:
        m = _hermitian(rng, d)
        t_py = _best_of(_jacobi_py.jacobi_eigh, m, args.repeat)
        if _jacobi_c is None:
            print(f"{d:>4} {1e3 * t_py:>12.3f} {'n/a':>12} {'':>8}")
            continue
        t_c = _best_of(_jacobi_c.jacobi_eigh, m, args.repeat)
        print(f"{d:>4} {1e3 * t_py:>12.3f} {1e3 * t_c:>12.3f} {t_py / t_c:>7.1f}x")


if __name__ == "__main__":
    main()
