#!/usr/bin/env python3
"""Wall-time scaling of the two placement algorithms across grid sizes.

Greedy performs one exact solve per candidate per round (about n^4 work per
unit budget with dense factorizations); the relaxation path needs one
optimization per round (about n^3). Small grids are dominated by Python
overhead, so treat the fitted exponents as indicative only.
"""
import argparse
import time

import numpy as np

from influnet import TargetingProblem, ZealotConfig, generate, greedy, relaxed_select
from influnet.graphs import grid_id


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--widths", type=int, nargs="+", default=[8, 11, 16])
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    rows = []
    for w in args.widths:
        g = generate("square_grid", width=w, height=w)
        center = grid_id(w, w // 2 + 1, w // 2 + 1)
        p = TargetingProblem(g, ZealotConfig.of([center], []), 1, budget=1)
        tg = min(_time(lambda: greedy(p)) for _ in range(args.repeats))
        tr = min(_time(lambda: relaxed_select(p, epsilon=0.15)) for _ in range(args.repeats))
        rows.append((w * w, tg, tr))
        print(f"n={w * w:4d}: greedy {tg:8.3f}s   relaxed_select {tr:8.3f}s")

    ns = np.log([r[0] for r in rows])
    for label, idx, nominal in [("greedy", 1, 4.0), ("relaxed_select", 2, 3.0)]:
        ts = np.log([r[idx] for r in rows])
        slope = np.polyfit(ns, ts, 1)[0]
        print(f"{label}: fitted exponent {slope:.2f} (flop model ~n^{nominal:.0f})")
    return 0


def _time(fn) -> float:
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


if __name__ == "__main__":
    raise SystemExit(main())
