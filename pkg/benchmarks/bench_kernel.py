"""Compiled kernel against the numpy fallback on one annual simulation.

    python benchmarks/bench_kernel.py [--plan PLAN.json] [--repeat N]

Prints seconds per simulated year for each backend, sealed and ventilated,
and the largest temperature difference between the two backends.
"""
from __future__ import annotations

import argparse
import time
from importlib.resources import files
from pathlib import Path

import numpy as np

import planvent.thermal.simulate as sim
from planvent.evaluation import EvaluationContext
from planvent.plan import load_plan
from planvent.scenarios import SCENARIO_B
from planvent.thermal import SEALED, _kernel_py
from planvent.weather import parse_epw

HERE = Path(__file__).resolve().parent


def _time(ctx, plan, control, repeat):
    best, series = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        series = ctx.simulate(plan, control)
        best = min(best, time.perf_counter() - t0)
    return best, series


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--plan", default=str(HERE / "sample_plan.json"))
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    plan = load_plan(args.plan)
    ctx = EvaluationContext(parse_epw(files("planvent") / "data/porto_synthetic.epw"))
    ctx.sun  # solar geometry is shared by both backends; keep it out of the timings
    compiled = sim.kernel
    if compiled is _kernel_py:
        print("compiled kernel not available; only the fallback is timed")
    rows = []
    for label, control in (("sealed", SEALED), ("ventilated B", SCENARIO_B)):
        results = {}
        for name, backend, repeat in (("compiled", compiled, args.repeat), ("python", _kernel_py, 1)):
            if name == "compiled" and backend is _kernel_py:
                continue
            sim.kernel = backend
            try:
                results[name] = _time(ctx, plan, control, repeat)
            finally:
                sim.kernel = compiled
        diff = (float(np.abs(results["compiled"][1].air_temp - results["python"][1].air_temp).max())
                if len(results) == 2 else float("nan"))
        rows.append((label, results.get("compiled", (float("nan"),))[0], results["python"][0], diff))

    print(f"{'run':<14}{'compiled s':>12}{'python s':>12}{'speed-up':>10}{'max |dT| K':>12}")
    for label, tc, tp, diff in rows:
        print(f"{label:<14}{tc:>12.3f}{tp:>12.3f}{tp / tc:>10.1f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
