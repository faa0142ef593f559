"""Budgeted zealot placement: exact set value, greedy selection, brute force.

The set value F(T) is the influence share an authority reaches after
converting the vertices of T to its zealots. It is monotone and submodular
in T, so greedy selection carries the usual (1 - 1/e) guarantee relative to
the exact optimum.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GraphValidationError
from .graphs import Graph, VertexSet
from .harmonic import ZealotConfig, influence, solve_grouped

BRUTE_FORCE_CAP = 2_000_000
VALUE_TOL = 1e-9


@dataclass(frozen=True)
class TargetingProblem:
    """One authority's placement problem: graph, current zealots, index, budget."""

    graph: Graph
    zealots: ZealotConfig
    authority: int
    budget: int

    def __post_init__(self):
        self.zealots.check(self.graph, self.authority)
        free = self.graph.n - len(self.zealots.union)
        if not 0 <= self.budget <= free:
            raise GraphValidationError(
                f"budget {self.budget} outside [0, {free}] free vertices")

    @property
    def candidates(self) -> VertexSet:
        taken = set(self.zealots.union.ids)
        return VertexSet.of(i for i in range(self.graph.n) if i not in taken)


@dataclass(frozen=True)
class TargetingSolution:
    chosen: VertexSet
    value: float
    trace: tuple[tuple[int, float], ...] = ()

    def to_json(self) -> dict:
        return {
            "chosen": list(self.chosen.ids),
            "value": self.value,
            "trace": [[v, g] for v, g in self.trace],
        }


def set_value(p: TargetingProblem, chosen) -> float:
    """Influence share after converting the given vertices to the authority's side."""
    chosen = chosen if isinstance(chosen, VertexSet) else VertexSet.of(chosen)
    if set(chosen.ids) & set(p.zealots.union.ids):
        raise GraphValidationError("targeted set intersects the zealot sets")
    v = solve_grouped(p.graph, p.zealots, p.authority, extra=chosen)
    return influence(v)


def greedy(p: TargetingProblem, tie_break: str = "lowest",
           seed: int | None = None) -> TargetingSolution:
    """Pick budget vertices one at a time, each maximizing the exact marginal gain.

    Ties are broken by lowest vertex id by default; tie_break="random" uses
    a seeded uniform choice among the maximizers instead.
    """
    if tie_break not in ("lowest", "random"):
        raise ValueError("tie_break must be 'lowest' or 'random'")
    rng = np.random.default_rng(seed) if tie_break == "random" else None
    chosen: list[int] = []
    trace: list[tuple[int, float]] = []
    current = set_value(p, ())
    for _ in range(p.budget):
        remaining = [i for i in p.candidates if i not in chosen]
        values = np.array([set_value(p, chosen + [i]) for i in remaining])
        ties = np.nonzero(values == values.max())[0]
        pick_idx = int(rng.choice(ties)) if rng is not None else int(ties[0])
        pick = remaining[pick_idx]
        chosen.append(pick)
        trace.append((pick, float(values[pick_idx] - current)))
        current = float(values[pick_idx])
    return TargetingSolution(VertexSet.of(chosen), current, tuple(trace))


def brute_force(p: TargetingProblem, cap: int = BRUTE_FORCE_CAP) -> TargetingSolution:
    """Exhaustive optimum over all budget-sized subsets of the free vertices.

    Ties resolve to the lexicographically smallest subset. Refuses to run
    when the number of combinations exceeds cap.
    """
    cands = list(p.candidates)
    n_comb = math.comb(len(cands), p.budget)
    if n_comb > cap:
        raise GraphValidationError(
            f"{n_comb} combinations exceed the brute-force cap {cap}")
    best_set: tuple[int, ...] | None = None
    best_val = -np.inf
    for combo in itertools.combinations(cands, p.budget):
        val = set_value(p, combo)
        if val > best_val:  # first maximizer in lex order wins ties
            best_val, best_set = val, combo
    return TargetingSolution(VertexSet.of(best_set), float(best_val))


@dataclass(frozen=True)
class SubmodularityReport:
    """Outcome of sampling the diminishing-returns and monotonicity inequalities."""

    submodular_checked: int
    monotone_checked: int
    violations: tuple[tuple, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.violations


def check_submodular(g: Graph, z: ZealotConfig, m: int,
                     samples: int | None = None, seed: int = 0,
                     tol: float = VALUE_TOL, value_fn=None) -> SubmodularityReport:
    """Test F(T+x) - F(T) >= F(T+x+y) - F(T+y) and monotonicity on subsets.

    With samples=None the free set is enumerated exhaustively (intended for
    <= 14 free vertices); otherwise that many random (T, x, y) triples are
    drawn. Violations are collected with their witnesses, not raised:
    value_fn lets self-tests swap in a corrupted set function.
    """
    p = TargetingProblem(g, z, m, budget=0)
    cands = list(p.candidates)
    fn = value_fn if value_fn is not None else (lambda T: set_value(p, T))
    cache: dict[tuple[int, ...], float] = {}

    def F(T) -> float:
        key = tuple(sorted(T))
        if key not in cache:
            cache[key] = fn(key)
        return cache[key]

    violations: list[tuple] = []
    sub_n = mono_n = 0

    def check_triple(T: tuple[int, ...], x: int, y: int):
        nonlocal sub_n
        sub_n += 1
        lhs = F(T + (x,)) - F(T)
        rhs = F(tuple(sorted(T + (x, y)))) - F(T + (y,))
        if lhs < rhs - tol:
            violations.append(("submodular", T, x, y, lhs, rhs))

    def check_nested(small: tuple[int, ...], big: tuple[int, ...]):
        nonlocal mono_n
        mono_n += 1
        if F(big) < F(small) - tol:
            violations.append(("monotone", small, big, F(small), F(big)))

    if samples is None:
        for r in range(len(cands) + 1):
            for T in itertools.combinations(cands, r):
                rest = [v for v in cands if v not in T]
                for x, y in itertools.permutations(rest, 2):
                    check_triple(T, x, y)
                for x in rest:
                    check_nested(T, tuple(sorted(T + (x,))))
    else:
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            size = int(rng.integers(0, max(len(cands) - 1, 1)))
            T = tuple(sorted(rng.choice(cands, size=size, replace=False).tolist()))
            rest = [v for v in cands if v not in T]
            if len(rest) < 2:
                continue
            x, y = rng.choice(rest, size=2, replace=False).tolist()
            check_triple(T, int(x), int(y))
            check_nested(T, tuple(sorted(T + (int(x),))))

    return SubmodularityReport(sub_n, mono_n, tuple(violations))
