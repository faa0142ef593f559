#!/usr/bin/env python3
"""Probe the first-mover advantage: identical strategies, both seat orders.

On undirected graphs the conjecture is that the first player ties or wins
under optimal play; on directed cycles the second player provably wins.
This script plays strategy mirrors across graph families and tabulates the
first player's final share.
"""
import argparse

from influnet.experiments import ExperimentSpec, run_match

FAMILIES = [
    ("cycle", {"n": 12}),
    ("directed_cycle", {"n": 12}),
    ("square_grid", {"width": 5, "height": 5}),
    ("ladder", {"n": 8}),
    ("tree", {"n": 20, "seed": 3}),
    ("random_geometric", {"n": 30, "radius": 0.35, "seed": 5}),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--strategy", default="greedy",
                        choices=["greedy", "relaxation", "brute_small", "random"])
    parser.add_argument("--rounds", type=int, default=2)
    args = parser.parse_args()
    strat = {"strategy": args.strategy}
    print(f"{args.strategy} vs {args.strategy}, {args.rounds} rounds each\n")
    print(f"{'family':28s} {'first share':>12s} {'winner':>7s}")
    for family, params in FAMILIES:
        spec = ExperimentSpec(family=family, params=params, rounds=args.rounds,
                              strategies=[dict(strat), dict(strat, seed=1)])
        t = run_match(spec)
        share = t["final_shares"][0]
        print(f"{family:28s} {share:12.4f} {t['winner']:>7d}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
