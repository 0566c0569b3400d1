"""Time the compiled shot kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--shots N] [--repeat R]
"""
import argparse
import timeit

import numpy as np

from epistate import kernels
from epistate.linalg import cumulative


def cases(n: int):
    rng = np.random.default_rng(0)
    d1 = rng.random((n, 1))
    d2 = rng.random((n, 2))
    d6 = rng.random((n, 6))
    cum4, last4 = cumulative([0.25, 0.25, 0.25, 0.25])
    return {
        "categorical": lambda k: k.categorical(d1, cum4, last4),
        "mz_ess": lambda k: k.mz_ess(d1, 0),
        "epr_ess": lambda k: k.epr_ess(d2, 0, 1, 0.3, 0.7),
        "optical_qm": lambda k: k.optical_qm(np.ascontiguousarray(d6[:, :4]), 0.9, cum4, last4, 0.5),
        "optical_ess": lambda k: k.optical_ess(d6, 0.9, 0.5, 2, 0.5, 0.5),
    }


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--shots", type=int, default=200_000)
    p.add_argument("--repeat", type=int, default=3)
    a = p.parse_args()

    py = kernels.backend("python")
    try:
        c = kernels.backend("cython")
    except ImportError:
        c = None
        print("compiled kernels not built; timing the Python fallback only")

    print(f"{'kernel':<12} {'python s':>10} {'cython s':>10} {'speedup':>8}   ({a.shots} shots)")
    for name, fn in cases(a.shots).items():
        t_py = min(timeit.repeat(lambda: fn(py), number=1, repeat=a.repeat))
        if c is None:
            print(f"{name:<12} {t_py:>10.4f}")
            continue
        assert np.array_equal(fn(py), fn(c)), name
        t_c = min(timeit.repeat(lambda: fn(c), number=1, repeat=a.repeat))
        print(f"{name:<12} {t_py:>10.4f} {t_c:>10.4f} {t_py / t_c:>7.1f}x")


if __name__ == "__main__":
    main()
