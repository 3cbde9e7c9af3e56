"""Compare the compiled kernels with the numpy fallback.

Usage: python benchmarks/bench_backend.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from hardyops import _accel_py

try:
    from hardyops import _accel
except ImportError:  # extension not built
    _accel = None

CASES = {
    "horner deg 30, 4096 pts": (
        "horner",
        lambda rng: (
            rng.normal(size=31) + 1j * rng.normal(size=31),
            np.exp(2j * np.pi * rng.uniform(size=4096)) * 0.9,
        ),
    ),
    "horner deg 512, 1024 pts": (
        "horner",
        lambda rng: (
            rng.normal(size=513) + 0j,
            np.exp(2j * np.pi * rng.uniform(size=1024)) * 0.99,
        ),
    ),
    "power_means J=256, 2048 pts": (
        "power_means",
        lambda rng: (rng.uniform(size=2048), 256),
    ),
    "power_means J=1024, 8192 pts": (
        "power_means",
        lambda rng: (rng.uniform(0.5, 1.0, size=8192), 1024),
    ),
}


def best_time(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=7)
    opts = parser.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'case':32s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for label, (name, make) in CASES.items():
        args = make(rng)
        py = best_time(getattr(_accel_py, name), args, opts.repeat)
        if _accel is None:
            print(f"{label:32s} {py * 1e3:12.3f} {'n/a':>12s} {'':>8s}")
            continue
        cy = best_time(getattr(_accel, name), args, opts.repeat)
        ref, got = getattr(_accel_py, name)(*args), np.asarray(getattr(_accel, name)(*args))
        assert np.allclose(ref, got, rtol=1e-10, atol=1e-12), label
        print(f"{label:32s} {py * 1e3:12.3f} {cy * 1e3:12.3f} {py / cy:7.1f}x")


if __name__ == "__main__":
    main()
