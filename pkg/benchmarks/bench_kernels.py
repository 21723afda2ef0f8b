"""Time the numba kernels against their pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both backends are imported side by side, so the env flag is not needed here.
"""
import argparse
import time

import numpy as np

from crit_cycle import _backend, kernels
from crit_cycle.lmg import _banded_parts, _stage_coefficients, build_collective_ops
from crit_cycle.protocols import power_law
from crit_cycle.spin_wigner import _logfact


def best_of(fn, repeat):
    fn()  # warm-up (jit compile for numba)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def setup(N, n_steps):
    ops = build_collective_ops(N)
    spec = power_law(2.0, 2.0)
    a, d, e = _banded_parts(ops, spec)
    coef, h = _stage_coefficients(spec, 0.0, 2.0, n_steps, N)
    return ops, a, d, e, coef, h


def cases():
    rng = np.random.default_rng(0)

    ops, a, d, e, coef, h = setup(1000, 4000)
    psi = (rng.normal(size=ops.dim) + 1j * rng.normal(size=ops.dim)).astype(complex)
    yield ("pure_rk4 N=1000, 4000 steps",
           lambda: kernels._pure_rk4_nb(psi.copy(), a, d, e, coef, h),
           lambda: kernels._pure_rk4_np(psi.copy(), a, d, e, coef, h))

    ops, a, d, e, coef, h = setup(40, 200)
    A = rng.normal(size=(ops.dim, ops.dim)) + 1j * rng.normal(size=(ops.dim, ops.dim))
    rho = A @ A.conj().T
    rho /= np.trace(rho)
    yield ("lindblad_rk4 N=40, 200 steps",
           lambda: kernels._lindblad_rk4_nb(rho.copy(), a, d, e, ops.jp, ops.jm_jp_diag, 0.01, coef, h),
           lambda: kernels._lindblad_rk4_np(rho.copy(), a, d, e, ops.jp, ops.jm_jp_diag, 0.01, coef, h))

    lf = _logfact(200)
    args = [(2 * j, 2 * j, 2 * k, 2 * m - 2 * j, 2 * j - 2 * m, 0)
            for j, k, m in [(7, 5, 3), (20, 11, 9), (60, 30, 40)]] * 200

    def loop(fn):
        return lambda: [fn(*x, lf) for x in args]
    yield ("wigner_3j x600", loop(kernels._wigner_3j_nb), loop(kernels._wigner_3j_np))


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    if not _backend.NUMBA_AVAILABLE:
        print("numba not installed; nothing to compare")
        return
    print(f"{'kernel':32s} {'numba [s]':>11s} {'numpy [s]':>11s} {'speedup':>8s}")
    for name, nb, npf in cases():
        t_nb, t_np = best_of(nb, args.repeat), best_of(npf, args.repeat)
        print(f"{name:32s} {t_nb:11.4g} {t_np:11.4g} {t_np / t_nb:8.1f}")


if __name__ == "__main__":
    main()
