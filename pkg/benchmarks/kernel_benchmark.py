"""Compare the compiled and pure-Python integration kernels.

Runs the same short simulation with both kernels, reports wall time and
per-step cost, and verifies the trajectories agree.

Usage::

    python3 benchmarks/kernel_benchmark.py [--config NAME] [--horizon SECONDS]
"""

import argparse
import time

import numpy as np

from ftconsensus.config import load_config, shipped_config_path
from ftconsensus.simulate import HAVE_COMPILED, simulate


def run(config, kernel: str):
    t0 = time.perf_counter()
    trace = simulate(config, kernel=kernel)
    return trace, time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default="example1_passive",
                        help="shipped config name")
    parser.add_argument("--horizon", type=float, default=0.2,
                        help="simulated seconds (python kernel is slow)")
    args = parser.parse_args()

    config = load_config(shipped_config_path(args.config),
                         overrides=[f"sim.horizon={args.horizon}"])
    nsteps = int(round(config.horizon / config.dt))
    print(f"config {args.config}: {config.n_followers} followers, "
          f"{config.n_layers} layers, dt={config.dt:g}, {nsteps} steps")

    trace_py, t_py = run(config, "python")
    print(f"python   kernel: {t_py:8.3f} s  ({1e6 * t_py / nsteps:9.1f} us/step)")

    if not HAVE_COMPILED:
        print("compiled kernel: not built (pip install -e . --no-build-isolation)")
        return

    trace_c, t_c = run(config, "compiled")
    print(f"compiled kernel: {t_c:8.3f} s  ({1e6 * t_c / nsteps:9.1f} us/step)")
    print(f"speedup: {t_py / t_c:.1f}x")

    dy = float(np.max(np.abs(trace_c.y - trace_py.y)))
    du = float(np.max(np.abs(trace_c.u - trace_py.u)))
    print(f"max |y| deviation between kernels: {dy:.3g}")
    print(f"max |u| deviation between kernels: {du:.3g}")
    scale = max(1.0, float(np.max(np.abs(trace_py.u))))
    if dy > 1e-8 or du / scale > 1e-8:
        raise SystemExit("kernel outputs disagree beyond tolerance")
    print("kernels agree within tolerance")


if __name__ == "__main__":
    main()
