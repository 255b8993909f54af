#!/usr/bin/env python3
"""Benchmark the pure-Python kernels against the compiled extension.

Times the two hot paths (BPR volume-delay and logit choice) at simulator-
representative call patterns, then a whole demo-world day under each
backend. Run after `python setup.py build_ext --inplace` (or a normal
install) so the compiled twin exists.
"""

import random
import statistics
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from modeshift._kernels import pure

try:
    from modeshift._kernels import _cykern
except ImportError:
    _cykern = None


def time_call(fn, repeats=5):
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return min(samples), statistics.median(samples)


def bench_bpr(backend, n=200_000):
    rng = random.Random(1)
    args = [(rng.uniform(2, 30), rng.uniform(0, 6000), rng.uniform(600, 6000)) for _ in range(n)]

    def run():
        f = backend.bpr_travel_time
        for t0, vol, cap in args:
            f(t0, vol, cap)

    return run


def bench_logit(backend, n=100_000):
    rng = random.Random(2)
    cases = [
        ([rng.uniform(-40, 0) for _ in range(rng.randint(2, 5))], rng.uniform(0.5, 4.0), rng.random())
        for _ in range(n)
    ]

    def run():
        f = backend.logit_choice
        for utilities, scale, draw in cases:
            f(utilities, scale, draw)

    return run


def bench_sim(backend_name_: str):
    import importlib
    import os

    os.environ["MODESHIFT_KERNEL"] = backend_name_
    for mod in list(sys.modules):
        if mod.startswith("modeshift"):
            del sys.modules[mod]
    from modeshift import datasets
    from modeshift.mobsim.engine import simulate_day
    from modeshift.mobsim.world import load_world

    world = load_world(datasets.world_dir("demo"))
    tracts = {t.tract_id: t for t in datasets.bundled_tracts()}
    factors = datasets.houston2014_factors()

    def run():
        simulate_day(world, None, factors, seed=7, n_agents=20_000, tracts=tracts)

    return run


def main() -> int:
    if _cykern is None:
        print("compiled extension not built; run `python setup.py build_ext --inplace` first")
        return 1

    print(f"{'kernel':<28}{'pure (s)':>12}{'compiled (s)':>14}{'speedup':>10}")
    for name, factory in (("bpr_travel_time x200k", bench_bpr), ("logit_choice x100k", bench_logit)):
        t_pure, _ = time_call(factory(pure))
        t_comp, _ = time_call(factory(_cykern))
        print(f"{name:<28}{t_pure:>12.3f}{t_comp:>14.3f}{t_pure / t_comp:>9.1f}x")

    results = {}
    for backend in ("pure", "compiled"):
        t, _ = time_call(bench_sim(backend), repeats=3)
        results[backend] = t
    print(
        f"{'demo day, 20k agents':<28}{results['pure']:>12.3f}{results['compiled']:>14.3f}"
        f"{results['pure'] / results['compiled']:>9.1f}x"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
