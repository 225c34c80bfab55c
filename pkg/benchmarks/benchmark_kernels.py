#!/usr/bin/env python3
"""Benchmark the compiled integrator core against the pure-Python fallback.

Runs the same driven trajectory on both backends, checks that they agree,
and reports steps/second and the speedup.  Example:

    python benchmarks/benchmark_kernels.py --t-end 5.0
"""

import argparse
import time

import numpy as np

import qomspec as q


def run(backend: str, params, t_end: float, delta: float):
    t_eval = np.linspace(0.0, t_end, 200)
    t0 = time.perf_counter()
    traj = q.integrate(params, t_end, delta=delta, t_eval=t_eval,
                       backend=backend)
    elapsed = time.perf_counter() - t0
    return traj, elapsed


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--t-end", type=float, default=5.0,
                        help="integration span in us (default 5.0)")
    args = parser.parse_args()

    config = dict(omega_b_hz=100e6, omega_q_hz=100e6, chi_hz=10e6, g_hz=10e6,
                  gamma_a_hz=4e6, gamma_q_hz=0.1e6, gamma_b_hz=1000.0,
                  delta_a_hz=100e6, drive_hz=19.8e6, probe_hz=19.8e3)
    params = q.load_params(config)
    delta = params.omega_b

    backends = q.available_backends()
    if "compiled" not in backends:
        print("compiled kernel not available in this build; "
              "benchmarking the pure-Python kernel only")

    results = {}
    for backend in backends:
        traj, elapsed = run(backend, params, args.t_end, delta)
        rate = traj.n_steps / elapsed
        results[backend] = (traj, elapsed, rate)
        print(f"{backend:>9}: {elapsed:8.3f} s  {traj.n_steps:8d} steps  "
              f"{rate:12.0f} steps/s")

    if len(results) == 2:
        ca, _, _ = results["compiled"]
        py, _, _ = results["python"]
        diff = max(np.max(np.abs(ca.a - py.a)), np.max(np.abs(ca.b - py.b)),
                   np.max(np.abs(ca.s_minus - py.s_minus)),
                   np.max(np.abs(ca.s_z - py.s_z)))
        speedup = results["python"][1] / results["compiled"][1]
        print(f"agreement: max |difference| = {diff:.3e}")
        print(f"speedup:   {speedup:.1f}x")
        if diff > 1e-9:
            raise SystemExit("backends disagree beyond 1e-9")


if __name__ == "__main__":
    main()
