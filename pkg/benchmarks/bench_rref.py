"""Compare the compiled and numpy modular elimination kernels, plus an end-to-end run.

    python3 benchmarks/bench_rref.py [--sizes 100 200 400] [--repeat 3]
"""
import argparse
import os
import subprocess
import sys
import time

import numpy as np

from twistk.linalg import backend

PRIME = 2_147_483_629


def _time(fn, M, p, repeat):
    best = float("inf")
    for _ in range(repeat):
        work = M.copy()
        start = time.perf_counter()
        fn(work, p)
        best = min(best, time.perf_counter() - start)
    return best


def kernels(sizes, repeat):
    rng = np.random.default_rng(0)
    print(f"{'size':>6} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for n in sizes:
        M = rng.integers(0, PRIME, size=(n, n + n // 2), dtype=np.int64)
        M[rng.random(M.shape) < 0.6] = 0
        py = _time(backend.python_rref_mod_p, M, PRIME, repeat)
        if backend.compiled_rref_mod_p is None:
            print(f"{n:>6} {py:>10.4f} {'n/a':>11} {'n/a':>8}")
            continue
        a, b = M.copy(), M.copy()
        assert list(backend.python_rref_mod_p(a, PRIME)) == list(backend.compiled_rref_mod_p(b, PRIME))
        cy = _time(backend.compiled_rref_mod_p, M, PRIME, repeat)
        print(f"{n:>6} {py:>10.4f} {cy:>11.4f} {py / cy:>7.1f}x")


def end_to_end():
    """Time a full extension job under each backend in a fresh interpreter."""
    code = (
        "import time; from twistk.catalog import ex71_table; from twistk.linalg import BACKEND;"
        "t = time.perf_counter(); ex71_table(7); print(BACKEND, round(time.perf_counter() - t, 2))"
    )
    for pure in ("", "1"):
        env = dict(os.environ)
        if pure:
            env["TWISTK_PURE"] = "1"
        else:
            env.pop("TWISTK_PURE", None)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        name, secs = out.stdout.split()
        print(f"separable extension to degree 7, {name} backend: {secs}s")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400, 800])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    kernels(args.sizes, args.repeat)
    end_to_end()
