"""Compare the numba kernels with their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5] [--sizes 16,256,4096,65536]

Each row reports the best-of-``repeat`` wall time per call for both paths
after a warm-up call (so numba compilation is excluded), the speedup, and
the largest relative difference between the two results.

Warm numba wins at every size, but the first numba call in a process pays a
one-off start-up cost. The last section measures that cost in fresh
interpreters; it is why ``hkflop._kernels`` sends small batches to numpy.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

if os.environ.get("HKFLOP_DISABLE_NUMBA"):
    sys.exit("unset HKFLOP_DISABLE_NUMBA to benchmark the numba path")

from hkflop import _kernels as K
from hkflop.exactpoly import parse, term_arrays

POLYS = {
    "conic": "x0*x2 - x1^2",
    "quartic": "x0^4 + x1^4 + x2^4 - 3*x0^2*x1*x2 + x1^3*x2",
    "sextic_4var": "x0^6 + x1^6 + x2^6 + x3^6 - 2*x0^2*x1^2*x2*x3 + x0*x1*x2*x3^3",
}


def best(fn, repeat: int) -> float:
    fn()  # warm-up (and JIT compilation)
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def rel_diff(a, b) -> float:
    if isinstance(a, tuple):
        return max(rel_diff(x, y) for x, y in zip(a, b))
    return float(np.abs(a - b).max() / max(1.0, np.abs(b).max()))


def rows(sizes, repeat):
    rng = np.random.default_rng(0)
    for name, text in POLYS.items():
        exps, coeffs = term_arrays(parse(text))
        e64, c128 = exps.astype(np.int64), coeffs.astype(np.complex128)
        for P in sizes:
            X = np.ascontiguousarray(rng.standard_normal((P, exps.shape[1]))
                                     + 1j * rng.standard_normal((P, exps.shape[1])))
            yield (f"poly_eval[{name}]", P,
                   lambda: K.poly_eval_np(exps, coeffs, X), lambda: K._poly_eval_nb(e64, c128, X))
            yield (f"poly_derivs[{name}]", P,
                   lambda: K.poly_derivs_np(exps, coeffs, X), lambda: K._poly_derivs_nb(e64, c128, X))
    for n in (1, 2, 4):
        for P in sizes:
            W = np.ascontiguousarray(rng.standard_normal((P, 2 * n)) + 1j * rng.standard_normal((P, 2 * n)))
            yield (f"calabi_potential[n={n}]", P, lambda: K.calabi_potential_np(W), lambda: K._calabi_potential_nb(W))


_COLD = """
import time, numpy as np
t0 = time.perf_counter()
from hkflop import _kernels as K
X = np.ones((8, 3), dtype=complex)
e = np.array([[1, 0, 1], [0, 2, 0]], dtype=np.int64)
c = np.array([1, -1], dtype=complex)
(K._poly_eval_nb if {nb} else K.poly_eval_np)(e, c, X)
print(time.perf_counter() - t0)
"""


def cold_start(use_numba: bool) -> float:
    out = subprocess.run([sys.executable, "-c", _COLD.format(nb=use_numba)], capture_output=True, text=True,
                         check=True)
    return float(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", default="16,256,4096,65536")
    args = ap.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",")]
    if not K.HAVE_NUMBA:
        sys.exit("numba is not importable; only the numpy path exists")
    print(f"{'kernel':<30} {'points':>8} {'numpy [ms]':>11} {'numba [ms]':>11} {'speedup':>8} {'max rel diff':>13}")
    for label, P, f_np, f_nb in rows(sizes, args.repeat):
        t_np = best(f_np, args.repeat)
        t_nb = best(f_nb, args.repeat)
        diff = rel_diff(f_nb(), f_np())
        print(f"{label:<30} {P:>8} {1e3 * t_np:>11.3f} {1e3 * t_nb:>11.3f} {t_np / t_nb:>7.1f}x {diff:>13.1e}")
    cold_np = min(cold_start(False) for _ in range(3))
    cold_nb = min(cold_start(True) for _ in range(3))
    print(f"\nfirst call in a fresh process (import + call, cached compilation): "
          f"numpy {1e3 * cold_np:.0f} ms, numba {1e3 * cold_nb:.0f} ms")
    print(f"dispatch thresholds: POLY_MIN_WORK={K.POLY_MIN_WORK} (points*terms), "
          f"CALABI_MIN_POINTS={K.CALABI_MIN_POINTS}")


if __name__ == "__main__":
    main()
