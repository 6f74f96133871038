"""End-to-end acceptance checks.

Each test prints one PASS/FAIL line (visible with ``pytest -s`` or in the
captured output of a failing run) and asserts the same condition, so the
suite doubles as a human-readable acceptance report.
"""

import time

import numpy as np
import pytest

from ftconsensus.adaptation import (ControllerGains, StepGains, dist_rate,
                                    validate_gains)
from ftconsensus.analysis import (NOT_SETTLED, aggregate_kp_kq, settling_time,
                                  tmax_bound)
from ftconsensus.config import load_config, shipped_config_path
from ftconsensus.lemma_oracles import (lemma2_check, lemma4_check,
                                       lemma5_check, young_check)
from ftconsensus.simulate import rk4_step, simulate, sweep_ic_scale
from ftconsensus.topology import build_laplacian


def check(name: str, ok: bool, detail: str):
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, f"{name}: {detail}"


def band_error(trace, t_from: float) -> float:
    mask = trace.t >= t_from
    return float(np.max(np.abs(trace.tracking_error[mask])))


class TestReproduction:
    def test_example1_passive_leader_band(self, example1_config):
        t0 = time.perf_counter()
        trace = simulate(example1_config)
        wall = time.perf_counter() - t0
        worst = band_error(trace, 0.4)
        check("example1-band",
              worst < 0.1 and wall < 60.0,
              f"max |y_i - y_0| for t >= 0.4 is {worst:.4f} (< 0.1), "
              f"runtime {wall:.2f} s (< 60 s)")

    def test_example2_reference_band(self):
        trace = simulate(load_config(shipped_config_path("example2")))
        worst = band_error(trace, 2.0)
        check("example2-band", worst < 0.1,
              f"max |y_i - y_r| for t >= 2 is {worst:.4f} (< 0.1)")

    def test_example3_disturbed_band(self):
        trace = simulate(load_config(shipped_config_path("example3")))
        worst = band_error(trace, 2.0)
        check("example3-band", worst < 0.15,
              f"max |y_i - y_r| for t >= 2 under disturbances is "
              f"{worst:.4f} (< 0.15)")


class TestFixedTimeSignature:
    def test_ic_sweep_settles_within_bound(self):
        cfg = load_config(
            shipped_config_path("example1_passive"),
            overrides=["sim.dt=1.0e-6", "sim.horizon=0.4", "sim.stride=100",
                       "sim.x0_leader=[-2.0, 0.0]"],
        )
        traces = sweep_ic_scale(cfg, [0.1, 1.0, 10.0])
        assert not any(isinstance(t, Exception) for t in traces)
        times = []
        for tr in traces:
            per_agent = settling_time(tr, 0.1)
            assert NOT_SETTLED not in per_agent
            times.append(max(per_agent))
        kp_agg, kq_agg = aggregate_kp_kq(cfg.gains, cfg.n_followers)
        bound = tmax_bound(kp_agg, kq_agg, cfg.gains.p, cfg.gains.q).t_max
        ratio = max(times) / min(times)
        check("fixed-time-sweep",
              ratio <= 3.0 and max(times) < bound,
              f"settling times {[f'{t:.3f}' for t in times]} for scales "
              f"0.1/1/10, ratio {ratio:.3f} (<= 3), bound {bound:.4f}")


class TestLemmaOracles:
    def test_randomized_inequality_trials(self):
        rng = np.random.default_rng(2024)
        trials = 100_000
        t0 = time.perf_counter()
        fails = 0
        for _ in range(trials):
            n = int(rng.integers(1, 9))
            a = rng.uniform(-10, 10, n)
            b = rng.uniform(-10, 10, n)
            fails += not lemma4_check(a, b).passed
            fails += not lemma5_check(a, b).passed
            v = rng.uniform(0, 10, n)
            p = rng.choice([1 / 3, 0.5, 2.0, 3.0])
            fails += not lemma2_check(v, p).passed
            pc = rng.uniform(1.1, 5.0)
            fails += not young_check(a[0], b[0], pc, pc / (pc - 1),
                                     rng.uniform(0.1, 5.0)).passed
        wall = time.perf_counter() - t0
        check("lemma-oracles", fails == 0 and wall < 10.0,
              f"{4 * trials} randomized inequality trials, {fails} failures, "
              f"{wall:.1f} s (< 10 s)")


class TestStructuralIdentity:
    def test_consensus_error_matches_pinned_laplacian(self, example1_config,
                                                      example1_trace):
        ltilde = build_laplacian(example1_config.topology).ltilde
        z1 = example1_trace.tracking_error
        resid = float(np.max(np.abs(example1_trace.e - z1 @ ltilde.T)))
        check("structural-identity", resid < 1e-10,
              f"max |e - Ltilde z1| over the trace is {resid:.3g} (< 1e-10)")


class TestIntegratorOrder:
    def test_rk4_convergence_exponent(self):
        A = np.array([[0.0, 1.0], [-4.0, -0.6]])
        x0 = np.array([1.0, 0.5])
        vals, vecs = np.linalg.eig(A)
        c = np.linalg.solve(vecs, x0.astype(complex))
        exact = (vecs @ (c * np.exp(vals * 1.0))).real
        errs = []
        for dt in (1e-2, 5e-3, 2.5e-3):
            x = x0.copy()
            for i in range(int(round(1.0 / dt))):
                x = rk4_step(lambda t, s: A @ s, x, i * dt, dt)
            errs.append(np.linalg.norm(x - exact))
        order = min(np.log2(errs[i] / errs[i + 1]) for i in range(2))
        check("integrator-order", order >= 3.7,
              f"measured step-halving convergence exponent {order:.2f} (>= 3.7)")


class TestGainValidator:
    def test_shipped_config_warning_set(self, example1_config):
        names = {c.name for c in validate_gains(example1_config.gains, 1).warnings}
        required = {"sigma_1c_gt_sigma_1a_gt_1", "sigma_3a_lt_sigma_3c_over_1376"}
        # with unit leakage gains, sigma_2c > 2 sigma_2a is violated too, so
        # it necessarily accompanies the two named warnings
        expected = required | {"sigma_2c_gt_2sigma_2a"}
        check("gain-validator-warnings", names == expected,
              f"shipped gains warn on {sorted(names)}")

    def test_compliant_config_is_clean(self):
        gains = ControllerGains.uniform(2, StepGains(
            k=2.0, kp=1.0, kq=1.0, sigma_1c=2.0, sigma_1a=1.5,
            sigma_2c=2.5, sigma_2a=1.0, sigma_3c=2.0, sigma_3a=1e-4,
            sigma_2d=1.0, mu_d=2.0))
        reports = [validate_gains(gains, s) for s in (1, 2)]
        ok = all(r.all_pass for r in reports)
        check("gain-validator-clean", ok,
              "constructed compliant gains trigger no warnings at any step")


class TestIsolatedLaw:
    def test_fixed_time_decay_oracle(self):
        """w' = -w^(1/3) - w^3 integrated through the shipped rate law."""
        gains = ControllerGains.uniform(1, StepGains(k=2.0, kp=1.0, kq=1.0))
        dt = 1e-5
        times = []
        for w0 in (1.0, 100.0):
            w = np.array([w0])
            t, settled = 0.0, None
            while t < 2.5:
                w = rk4_step(
                    lambda tt, s: np.array([dist_rate(s[0], 0.0, gains, 1)]),
                    w, t, dt)
                t += dt
                if settled is None and abs(w[0]) < 1e-3:
                    settled = t
                    break
            assert settled is not None, f"w0={w0} never reached 1e-3"
            times.append(settled)
        spread = max(times) / min(times) - 1.0
        check("isolated-law-decay", spread < 0.35,
              f"settling to 1e-3 from w0=1: {times[0]:.3f} s, from w0=100: "
              f"{times[1]:.3f} s, spread {100 * spread:.1f}% (< 35%)")
