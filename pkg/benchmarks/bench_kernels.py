"""Compare the compiled and pure-Python Kummer kernels.

Each backend runs in its own interpreter (the backend is fixed at import),
on the same workloads:

* ``scalar``  -- real-c series_fast calls over a (c, z) grid
* ``complex`` -- complex-c calls at the sizes Euler inversion produces
* ``vector``  -- series_fast_vec over 4096 z values
* ``option``  -- one complex option-transform evaluation, end to end

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from cirmax import kernels
from cirmax.model import AffineParams
from cirmax.pricing import option_lt

repeat = int(sys.argv[1])
cs = np.linspace(0.1, 20.0, 40)
zs = np.linspace(0.5, 60.0, 40)
zc = [complex(5.0 + 0.3 * j, 40.0 * j) for j in range(40)]
zv = np.linspace(0.1, 80.0, 4096)
params = AffineParams(0.02, 0.2, 0.02, 0.002, 0.1)


def scalar():
    for c in cs:
        for z in zs:
            kernels.series_fast(float(c), 4.0, float(z), 1e-14, 10000)


def complex_c():
    for c in zc:
        for z in zs[::4]:
            kernels.series_fast(c, 4.0, float(z), 1e-14, 10000)


def vector():
    kernels.series_fast_vec(2.5 + 1.0j, 4.0, zv, 1e-14, 10000)


def option():
    option_lt(params, 0.1, 14.0 + 20.0j)


out = {"backend": kernels.BACKEND}
for name, fn in [("scalar", scalar), ("complex", complex_c), ("vector", vector), ("option", option)]:
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out[name] = best
print(json.dumps(out))
"""


def run(pure, repeat):
    env = dict(os.environ, CIRMAX_PURE_PYTHON="1" if pure else "0")
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, str(repeat)], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    compiled = run(False, args.repeat)
    fallback = run(True, args.repeat)
    if compiled["backend"] == fallback["backend"]:
        print("compiled extension not built; only the python backend is available")
    print(f"{'workload':<10}{compiled['backend']:>12}{fallback['backend']:>12}{'speedup':>10}")
    for key in ("scalar", "complex", "vector", "option"):
        a, b = compiled[key], fallback[key]
        print(f"{key:<10}{a * 1e3:>10.2f}ms{b * 1e3:>10.2f}ms{b / a:>9.1f}x")


if __name__ == "__main__":
    main()
