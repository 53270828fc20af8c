"""Time the numba kernels against their pure-numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat N] [--quick]

Each kernel is warmed up once (so JIT compilation is excluded) and then
timed as the best of ``--repeat`` runs.  Results of the two backends are
compared before timing.
"""
import argparse
import time

import numpy as np

from superkepler import _kernels
from superkepler.sampling import sample_orbits


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(quick):
    scale = 10 if quick else 1
    z = np.array([2.0, 0.0, 0.0, 0.5])
    steps = 100_000 // scale
    orbits = np.concatenate([sample_orbits(50 // scale, 1, "so3"), sample_orbits(50 // scale, 1, "so21")])
    rng = np.random.Generator(np.random.PCG64(0))
    n = 100_000 // scale
    mean, e_ell, e_hyp = rng.uniform(-10, 10, n), rng.uniform(0, 0.99, n), rng.uniform(1.01, 10, n)
    yield (f"verlet path, {steps} steps",
           lambda: _kernels.verlet_path_numba(z, 1e-3, steps)[0],
           lambda: _kernels.verlet_path_numpy(z, 1e-3, steps)[0])
    yield (f"verlet batch, {len(orbits)} orbits",
           lambda: _kernels.verlet_batch_numba(orbits, 1e-3, 300_000, 1e-2, 50.0)[1],
           lambda: _kernels.verlet_batch_numpy(orbits, 1e-3, 300_000, 1e-2, 50.0)[1])
    yield (f"elliptic Kepler, {n} solves",
           lambda: _kernels.kepler_elliptic_numba(mean, e_ell),
           lambda: _kernels.kepler_elliptic_numpy(mean, e_ell))
    yield (f"hyperbolic Kepler, {n} solves",
           lambda: _kernels.kepler_hyperbolic_numba(mean, e_hyp),
           lambda: _kernels.kepler_hyperbolic_numpy(mean, e_hyp))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--quick", action="store_true", help="10x smaller problem sizes")
    args = parser.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'kernel':34s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s}")
    for name, fast, slow in cases(args.quick):
        if not np.allclose(fast(), slow(), atol=1e-10):
            raise SystemExit(f"{name}: backends disagree")
        t_fast, t_slow = best_of(fast, args.repeat), best_of(slow, args.repeat)
        print(f"{name:34s} {t_fast:10.4f} {t_slow:10.4f} {t_slow / t_fast:7.1f}x")


if __name__ == "__main__":
    main()
