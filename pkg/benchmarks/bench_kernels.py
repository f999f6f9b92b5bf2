"""Benchmark the compiled kernels against the numpy fallback.

Times the raw sweeps and full world stepping under each backend and prints a
speedup table. The compiled backend is skipped if it isn't built.

    python benchmarks/bench_kernels.py [--sensors N] [--slots N] [--repeat N]
"""

import argparse
import math
import time

import numpy as np

import wrsnsim.world
from wrsnsim._kernels import available_backends
from wrsnsim.world import AGENTS, WorldConfig, WorldState


def time_kernel_sweeps(mod, n_sensors, iters):
    rng = np.random.default_rng(0)
    xs = rng.uniform(0, 100, n_sensors)
    ys = rng.uniform(0, 100, n_sensors)
    energy = rng.uniform(0, 2, n_sensors)
    alive = np.ones(n_sensors, dtype=bool)
    draws = rng.uniform(0.025, 0.04, n_sensors)
    last_draw = np.zeros(n_sensors)
    powers = np.empty(n_sensors)

    start = time.perf_counter()
    for _ in range(iters):
        mod.sense_sweep(energy, alive, draws, last_draw)
        energy += 0.05  # keep nodes alive across iterations
        np.clip(energy, 0, 2, out=energy)
        alive[:] = True
    sense_time = (time.perf_counter() - start) / iters

    start = time.perf_counter()
    for _ in range(iters):
        mod.charge_sweep(xs, ys, energy, alive, 50.0, 50.0, 9.0, 36.0, 30.0, 6.0, 3.0, 0.005, 1.0, 2.0, powers)
    charge_time = (time.perf_counter() - start) / iters

    return sense_time, charge_time


def time_world_steps(mod, n_sensors, slots, repeat):
    config = WorldConfig(n_sensors=n_sensors, episode_len=slots)
    saved = wrsnsim.world.kernels
    wrsnsim.world.kernels = mod
    try:
        total_steps = 0
        start = time.perf_counter()
        for seed in range(repeat):
            world = WorldState(config, seed)
            rng = np.random.default_rng(seed)
            while not world.done:
                actions = {
                    name: (float(rng.uniform(0, 2 * math.pi)), float(rng.uniform(0, 10)))
                    for name in AGENTS
                }
                world.step(actions)
                total_steps += 1
        elapsed = time.perf_counter() - start
    finally:
        wrsnsim.world.kernels = saved
    return elapsed / total_steps, total_steps


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sensors", type=int, default=100)
    parser.add_argument("--slots", type=int, default=200)
    parser.add_argument("--repeat", type=int, default=5, help="episodes per backend")
    parser.add_argument("--kernel-iters", type=int, default=20_000)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends available: {', '.join(sorted(backends))}")
    print(f"scenario: {args.sensors} sensors, {args.slots} slots, {args.repeat} episodes\n")

    rows = {}
    for name, mod in sorted(backends.items()):
        sense, charge = time_kernel_sweeps(mod, args.sensors, args.kernel_iters)
        step, steps = time_world_steps(mod, args.sensors, args.slots, args.repeat)
        rows[name] = (sense, charge, step)
        print(
            f"{name:>7}: sense_sweep {sense * 1e6:8.2f} us | charge_sweep {charge * 1e6:8.2f} us"
            f" | world step {step * 1e6:8.2f} us  ({steps} steps)"
        )

    if {"numpy", "cython"} <= rows.keys():
        print("\nspeedup (numpy / cython):")
        for label, idx in (("sense_sweep", 0), ("charge_sweep", 1), ("world step", 2)):
            print(f"  {label:>12}: {rows['numpy'][idx] / rows['cython'][idx]:5.2f}x")


if __name__ == "__main__":
    main()
