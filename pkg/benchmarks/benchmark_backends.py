#!/usr/bin/env python3
"""Compare the numba-compiled kernels against the pure-NumPy fallback.

The backend is fixed per process (FCTLS_BACKEND), so each one runs in a
subprocess and times the same scenario.  The first numba call includes JIT
compilation unless the on-disk cache is already warm.

Usage:
    python benchmarks/benchmark_backends.py [--t-end 10.0] [--step 1e-3]
                                            [--repeats 3] [--scenario example5]
"""

import argparse
import json
import os
import statistics
import subprocess
import sys

WORKER = r"""
import json, sys, time
import fctls
from fctls import kernels

scenario, step, t_end, repeats = sys.argv[1], float(sys.argv[2]), float(sys.argv[3]), int(sys.argv[4])
config = fctls.apply_overrides(fctls.preset(scenario), step=step, t_end=t_end)
times = []
for _ in range(repeats + 1):
    started = time.perf_counter()
    fctls.simulate_scenario(config)
    times.append(time.perf_counter() - started)
print(json.dumps({"backend": kernels.BACKEND, "first": times[0], "warm": times[1:]}))
"""


def run_backend(backend, args):
    env = dict(os.environ, FCTLS_BACKEND=backend)
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, args.scenario, str(args.step),
         str(args.t_end), str(args.repeats)],
        capture_output=True,
        text=True,
        env=env,
    )
    if proc.returncode != 0:
        raise RuntimeError(f"{backend} worker failed:\n{proc.stderr}")
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--scenario", default="example5")
    parser.add_argument("--t-end", type=float, default=10.0, dest="t_end")
    parser.add_argument("--step", type=float, default=1e-3)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    steps = int(round(args.t_end / args.step))
    print(f"scenario {args.scenario}: {steps} steps (step={args.step}, t_end={args.t_end}), "
          f"{args.repeats} timed repeats per backend\n")

    results = {}
    for backend in ("numba", "numpy"):
        print(f"running {backend} backend ...")
        results[backend] = run_backend(backend, args)

    print()
    print(f"{'backend':<8} {'first call':>12} {'warm median':>12} {'warm min':>12}")
    print("-" * 48)
    for backend in ("numba", "numpy"):
        r = results[backend]
        warm = r["warm"]
        print(f"{backend:<8} {r['first']:>11.3f}s {statistics.median(warm):>11.3f}s "
              f"{min(warm):>11.3f}s")
    print("-" * 48)
    speedup = statistics.median(results["numpy"]["warm"]) / statistics.median(
        results["numba"]["warm"]
    )
    print(f"warm speedup (numpy / numba): {speedup:.1f}x")
    print("note: the numba first call includes JIT compilation when the disk "
          "cache is cold")


if __name__ == "__main__":
    main()
