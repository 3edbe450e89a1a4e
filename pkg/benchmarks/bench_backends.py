"""Compare the gmpy2 and stdlib Fraction rational backends.

Each backend runs in its own interpreter because the choice is made once at
import time from ``WEBRANK_RATIONAL``.

    python3 benchmarks/bench_backends.py [--repeat 3]
"""

import argparse
import os
import subprocess
import sys

WORKLOAD = r"""
import random, time
from webrank._rational import BACKEND
from webrank.connection import connection_data, zero_sum_section
from webrank.dim3 import QuvTriple, quv_web, reconstruct
from webrank.jets import Jet

x, y, z = (Jet.var(i, 3, 20) for i in range(3))
timings = {}
t = time.perf_counter()
(1 + x / 3 - y / 5 + z / 7 + x * y).inv()
timings["jet inverse, 3 vars, order 20"] = time.perf_counter() - t
t = time.perf_counter()
Q = Jet(3, 10, {(2, 0, 0): 1, (0, 1, 1): 1, (3, 0, 1): 2, (1, 2, 1): -1, (0, 0, 4): 1})
u = Jet(3, 10, {(0, 1, 0): 1, (1, 0, 0): -1, (2, 1, 0): 3, (0, 0, 3): -2})
v = Jet(3, 10, {(0, 0, 1): 1, (1, 0, 0): -1, (1, 1, 1): 1, (0, 2, 0): 1})
web = quv_web(QuvTriple(Q, u, v)).web
connection_data(zero_sum_section(web))
timings["connection of a (Q, u, v) web, order 10"] = time.perf_counter() - t
t = time.perf_counter()
reconstruct(web)
timings["reconstruction, order 10"] = time.perf_counter() - t
for name, sec in timings.items():
    print(f"{BACKEND}\t{name}\t{sec:.6f}")
"""


def run(backend):
    env = dict(os.environ, WEBRANK_RATIONAL=backend)
    out = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, capture_output=True, text=True, check=True)
    rows = [line.split("\t") for line in out.stdout.strip().splitlines()]
    return {name: float(sec) for _, name, sec in rows}


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    results = {}
    for backend in ("gmpy2", "fraction"):
        runs = [run(backend) for _ in range(args.repeat)]
        results[backend] = {k: min(r[k] for r in runs) for k in runs[0]}
    width = max(len(k) for k in results["gmpy2"])
    print(f"{'workload':<{width}}  {'gmpy2':>8}  {'fraction':>8}  speedup")
    for k in results["gmpy2"]:
        a, b = results["gmpy2"][k], results["fraction"][k]
        print(f"{k:<{width}}  {a:8.3f}  {b:8.3f}  {b / max(a, 1e-9):6.1f}x")


if __name__ == "__main__":
    main()
