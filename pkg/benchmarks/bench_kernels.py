#!/usr/bin/env python3
"""Throughput comparison of the compiled and pure-Python kernel backends.

Micro-benchmarks call both implementations directly on identical inputs;
the end-to-end row re-runs a full front-tracking scenario in a subprocess
with the backend pinned through PIPETRACK_PURE_PYTHON.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--skip-e2e]
"""
import argparse
import os
import random
import subprocess
import sys
import time

from pipetrack._kernels import reference


def _load_compiled():
    try:
        from pipetrack._kernels import compiled
    except ImportError:
        return None
    return compiled


def _sample_inputs(count, seed=1234):
    rng = random.Random(seed)
    rows = []
    for _ in range(count):
        kappa = rng.uniform(0.5, 2.0)
        gam = rng.uniform(1.1, 2.0)
        rl = rng.uniform(0.5, 2.0)
        ql = rl * rng.uniform(-0.5, 0.5) * reference.sound_speed(
            rl, kappa, gam)
        rr = rl * (1.0 + rng.uniform(-0.15, 0.15))
        qr = ql + rng.uniform(-0.08, 0.08)
        fam = rng.choice((1, 2))
        sigma = rng.uniform(-0.3, 0.3)
        a_l = rng.uniform(0.9, 1.2)
        a_r = rng.uniform(0.9, 1.2)
        rows.append((kappa, gam, rl, ql, rr, qr, fam, sigma, a_l, a_r))
    return rows


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _kernel_cases(mod, rows):
    return {
        "lax_state": lambda: [
            mod.lax_state(fam, sigma, rl, ql, kappa, gam)
            for (kappa, gam, rl, ql, _, _, fam, sigma, _, _) in rows
        ],
        "riemann_sizes": lambda: [
            mod.riemann_sizes(rl, ql, rr, qr, kappa, gam)
            for (kappa, gam, rl, ql, rr, qr, _, _, _, _) in rows
        ],
        "junction_state": lambda: [
            mod.junction_state(mod.COND_SECTION_L, a_l, a_r, rl, ql,
                               kappa, gam)
            for (kappa, gam, rl, ql, _, _, _, _, a_l, a_r) in rows
        ],
        "generalized_sizes": lambda: [
            mod.generalized_sizes(rl, ql, rr, qr, mod.COND_SECTION_L,
                                  a_l, a_r, kappa, gam)
            for (kappa, gam, rl, ql, rr, qr, _, _, a_l, a_r) in rows
        ],
    }


def _end_to_end_seconds(pure_python, h):
    """Wall time of the smooth-ramp scenario with the backend pinned."""
    env = dict(os.environ)
    if pure_python:
        env["PIPETRACK_PURE_PYTHON"] = "1"
    else:
        env.pop("PIPETRACK_PURE_PYTHON", None)
    code = (
        "import time\n"
        "from pipetrack.scenarios import named_scenario, load_scenario\n"
        "cfg = named_scenario('section_ramp_S')\n"
        f"sc = load_scenario(cfg)\n"
        f"tracker = sc.build(h={h})\n"
        "t0 = time.perf_counter()\n"
        "tracker.run(sc.horizon)\n"
        "print(time.perf_counter() - t0)\n"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    backend = subprocess.run(
        [sys.executable, "-c",
         "from pipetrack._kernels import active_backend;"
         "print(active_backend())"],
        env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip()), backend.stdout.strip()


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5,
                        help="timing repetitions per case (best is kept)")
    parser.add_argument("--count", type=int, default=2000,
                        help="random input rows per micro-benchmark")
    parser.add_argument("--skip-e2e", action="store_true",
                        help="skip the end-to-end scenario comparison")
    parser.add_argument("--heavy", action="store_true",
                        help="run the end-to-end case at h = 0.025 "
                             "(about 19k events) instead of h = 0.05")
    args = parser.parse_args()

    compiled = _load_compiled()
    rows = _sample_inputs(args.count)

    print(f"{args.count} calls per case, best of {args.repeat} runs\n")
    print(f"{'kernel':<20} {'python [ms]':>12} {'compiled [ms]':>14} "
          f"{'speedup':>8}")
    ref_cases = _kernel_cases(reference, rows)
    com_cases = _kernel_cases(compiled, rows) if compiled else {}
    for name, ref_fn in ref_cases.items():
        t_ref = _time(ref_fn, args.repeat) * 1e3
        if compiled:
            t_com = _time(com_cases[name], args.repeat) * 1e3
            print(f"{name:<20} {t_ref:>12.2f} {t_com:>14.2f} "
                  f"{t_ref / t_com:>7.1f}x")
        else:
            print(f"{name:<20} {t_ref:>12.2f} {'(not built)':>14} "
                  f"{'-':>8}")

    if not args.skip_e2e:
        h = 0.025 if args.heavy else 0.05
        print(f"\nend-to-end: smooth-ramp scenario at h = {h}")
        print("(the event loop itself is Python, so full runs gain less "
              "than the kernels)")
        t_py, b_py = _end_to_end_seconds(pure_python=True, h=h)
        print(f"{'backend ' + b_py:<20} {t_py * 1e3:>12.2f} ms")
        if compiled:
            t_c, b_c = _end_to_end_seconds(pure_python=False, h=h)
            print(f"{'backend ' + b_c:<20} {t_c * 1e3:>12.2f} ms "
                  f"({t_py / t_c:.1f}x)")


if __name__ == "__main__":
    main()
