"""Compare the pure-Python and compiled sampling kernels.

Runs the flagship pipeline's hot paths (free Boltzmann draws with window
and orthant filtering, plus the naive baseline) on each available
backend with identical seeds, and reports throughput and speedup.

Usage: python benchmarks/backend_bench.py [--walks N] [--naive-len N]
"""
import argparse
import time

import numpy as np

from orthantwalks._kernels import available_backends, get_backend
from orthantwalks.pipeline import assemble_pipeline
from orthantwalks.rng import UniformStream, make_rng
from orthantwalks.stepsets import validate_stepset

FLAGSHIP = [
    ([1, 0, 0], 1), ([0, 1, 0], 1), ([0, 0, 1], 1),
    ([-1, 0, 0], 2), ([0, -1, 0], 2), ([0, 0, -1], 2),
]


def bench_sampler(backend, tables, walks, seed):
    stream = UniformStream(make_rng(seed))
    start = time.perf_counter()
    _, _, stats = backend.run_sampler(tables, 10, 10, walks, 10**10, stream, True, "endpoints")
    elapsed = time.perf_counter() - start
    return elapsed, stats["free_draws"], stats["accepted"]


def bench_naive(backend, stepset, length, walks, seed):
    weights = np.array([w for _, w in stepset.entries], dtype=np.float64)
    cum = np.cumsum(weights / weights.sum())
    cum[-1] = 1.0
    steps = np.array([list(s) for s, _ in stepset.entries], dtype=np.int32)
    stream = UniformStream(make_rng(seed))
    start = time.perf_counter()
    _, _, stats = backend.run_naive(cum, steps, length, walks, 10**9, stream, "endpoints")
    elapsed = time.perf_counter() - start
    return elapsed, stats["attempts"], stats["accepted"]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--walks", type=int, default=2000, help="accepted walks per run")
    parser.add_argument("--naive-len", type=int, default=10, dest="naive_len")
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    stepset = validate_stepset(FLAGSHIP)
    pipeline = assemble_pipeline(stepset)
    backends = available_backends()
    print("backends:", ", ".join(backends))

    results = {}
    for name in backends:
        backend = get_backend(name)
        elapsed, draws, accepted = bench_sampler(backend, pipeline.tables, args.walks, args.seed)
        results[("sampler", name)] = (elapsed, draws)
        print(
            "boltzmann  %-8s %8.3f s  %12d draws  %9.0f draws/s  (%d accepted)"
            % (name, elapsed, draws, draws / elapsed, accepted)
        )
    for name in backends:
        backend = get_backend(name)
        elapsed, attempts, accepted = bench_naive(
            backend, stepset, args.naive_len, args.walks, args.seed
        )
        results[("naive", name)] = (elapsed, attempts)
        print(
            "naive      %-8s %8.3f s  %12d attempts %8.0f attempts/s  (%d accepted)"
            % (name, elapsed, attempts, attempts / elapsed, accepted)
        )

    if "compiled" in backends:
        for kind in ("sampler", "naive"):
            pure_t = results[(kind, "pure")][0]
            comp_t = results[(kind, "compiled")][0]
            assert results[(kind, "pure")][1] == results[(kind, "compiled")][1], (
                "backends disagree on the %s draw count" % kind
            )
            print("%s speedup: %.1fx" % (kind, pure_t / comp_t))


if __name__ == "__main__":
    main()
