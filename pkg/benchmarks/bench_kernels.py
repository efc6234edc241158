"""Timing comparison of the compiled and vectorized kernel paths.

Exercises the three dual-path kernels at the call shapes the measurement and
mixture layers actually produce. The compiled path is warmed up before timing
so JIT compilation never pollutes the steady-state numbers; warmup time is
reported on its own line.

Run as a script:

    python3 benchmarks/bench_kernels.py [--repeat N] [--dim D] [--grid G]
"""

import argparse
import time

import numpy as np

from cvclone import _kernels


def _best_of(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _inputs(dim, grid, seed=11):
    rng = np.random.default_rng(seed)
    zs = (rng.normal(size=grid * grid)
          + 1j * rng.normal(size=grid * grid)).astype(np.complex128)
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    rho /= np.trace(rho).real
    s_dag = np.linalg.qr(m)[0].conj().T
    nth = 8
    weights = 0.5 ** np.arange(1, nth + 1)
    weights /= weights.sum()
    disp = _kernels.displacement_columns_batch_numpy(zs[: grid * grid // 2],
                                                     dim, dim)
    return zs, s_dag, rho, weights, disp


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5,
                        help="timing repetitions per kernel (best is kept)")
    parser.add_argument("--dim", type=int, default=24,
                        help="truncation dimension of the test operators")
    parser.add_argument("--grid", type=int, default=41,
                        help="phase-space grid edge length; grid^2 points")
    args = parser.parse_args(argv)

    zs, s_dag, rho, weights, disp = _inputs(args.dim, args.grid)
    cases = [
        ("displacement batch",
         _kernels.displacement_columns_batch_numpy,
         (zs, args.dim, args.dim)),
        ("outcome-density grid",
         _kernels.povm_grid_values_numpy,
         (zs, s_dag, rho, weights, 0.3)),
        ("mixture accumulate",
         _kernels.smear_accumulate_numpy,
         (disp, np.full(disp.shape[0], 1.0 / disp.shape[0]), rho)),
    ]

    print(f"kernel shapes: dim={args.dim}, points={zs.size}, "
          f"thermal terms={weights.size}")
    if not _kernels.NUMBA_ENABLED:
        print("numba path unavailable (package missing or disabled by "
              "CVCLONE_NO_NUMBA); timing the numpy path only")

    compiled = {
        "displacement batch": _kernels.displacement_columns_batch,
        "outcome-density grid": _kernels.povm_grid_values,
        "mixture accumulate": _kernels.smear_accumulate,
    }
    if _kernels.NUMBA_ENABLED:
        t0 = time.perf_counter()
        for name, _, call_args in cases:
            compiled[name](*call_args)
        print(f"(one-time JIT warmup: {time.perf_counter() - t0:.2f}s)")

    header = f"{'kernel':<22} {'numpy':>10}"
    if _kernels.NUMBA_ENABLED:
        header += f" {'numba':>10} {'speedup':>8}"
    print(header)

    for name, numpy_fn, call_args in cases:
        t_np = _best_of(numpy_fn, call_args, args.repeat)
        line = f"{name:<22} {t_np * 1e3:9.2f}ms"
        if _kernels.NUMBA_ENABLED:
            t_nb = _best_of(compiled[name], call_args, args.repeat)
            line += f" {t_nb * 1e3:9.2f}ms {t_np / t_nb:7.1f}x"
        print(line)


if __name__ == "__main__":
    main()
