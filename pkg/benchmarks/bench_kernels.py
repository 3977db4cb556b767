"""Compare the compiled and pure-python contact kernels.

Times the sub-stepped primitive executor on a contact-heavy insertion
workload and a full scripted episode, for every available backend.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import statistics
import time

import numpy as np

from pegprim.action import ParameterizedAction, INSERTION
from pegprim.harness import OracleInsertPolicy
from pegprim.sim import kernels
from pegprim.sim.env import PegInHoleEnv
from pegprim.sim.geometry import task_from_name


def _time(fn, repeats):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return min(samples), statistics.median(samples)


def bench_run_primitive(backend_name, repeats):
    """One forceful insertion pressing into the hole floor near the rim."""
    impl = kernels.get_backend(backend_name)
    geom = task_from_name("square")
    pose = np.array([2.0, 1.0, 3.0, 0.01, -0.008, 0.02])
    v6 = np.zeros(6)
    v6[2] = -0.2
    u3 = np.array([0.0, 0.0, -1.0])

    def once():
        impl.run_primitive(
            pose, v6, u3, False, 4.0, 25.0, 0.05,
            0.0, 0.0, 0.0, geom.hole_polygon, geom.sample_points,
            geom.point_stiffness, geom.hole_depth, geom.clearance,
        )

    return _time(once, repeats)


def bench_episode(backend_name, repeats):
    """Scripted oracle episode, exercising reset + every primitive type."""
    def once():
        env = PegInHoleEnv("square", seed=7, backend=backend_name)
        policy = OracleInsertPolicy()
        obs = env.reset()
        policy.begin_episode(env)
        for _ in range(20):
            out = env.step(policy.act(obs))
            obs = out.next_obs
            if out.done:
                break

    return _time(once, repeats)


def bench_insert_types(backend_name, repeats):
    """Tilted press stopped by the force guard, worst-case substep count."""
    def once():
        env = PegInHoleEnv("square", seed=3, backend=backend_name)
        env.reset()
        env.step(ParameterizedAction(INSERTION, np.array([np.inf])))

    return _time(once, repeats)


BENCHES = (
    ("run_primitive (insert press)", bench_run_primitive),
    ("env.step insertion", bench_insert_types),
    ("oracle episode", bench_episode),
)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args(argv)

    names = sorted(kernels.BACKENDS)
    print(f"default backend: {kernels.BACKEND}")
    print(f"available: {', '.join(names)}   repeats: {args.repeats}\n")
    header = f"{'benchmark':<32}" + "".join(f"{n + ' (ms)':>16}" for n in names)
    if len(names) > 1:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, fn in BENCHES:
        best = {}
        for name in names:
            b, _ = fn(name, args.repeats)
            best[name] = b * 1e3
        row = f"{label:<32}" + "".join(f"{best[n]:>16.4f}" for n in names)
        if "cython" in best and "python" in best:
            row += f"{best['python'] / best['cython']:>9.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
