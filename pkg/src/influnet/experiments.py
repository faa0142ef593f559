"""Experiment drivers: influence heatmaps, relaxation maps, matches, property suite.

Heatmaps are emitted as data files (CSV and JSON with vertex coordinates),
never as images, so runs are bit-for-bit reproducible; every output embeds a
hash of the spec that produced it.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import game as game_mod
from .errors import GraphValidationError
from .graphs import (
    Graph,
    VertexSet,
    generate,
    graph_distances,
    grid_mirror_perm,
    grid_rotation_perm,
    is_automorphism,
)
from .harmonic import ZealotConfig
from .relaxation import maximize, symmetry_check
from .targeting import TargetingProblem, set_value

ARGMAX_TOL = 1e-9


@dataclass
class ExperimentSpec:
    """Declarative description of one experiment run."""

    family: str
    params: dict = field(default_factory=dict)
    zealots: list = field(default_factory=list)     # one id-list per opinion class
    authority: int = 1                              # 0-based opinion index
    epsilon: float | list = 0.15
    budget: int = 1
    seed: int = 0
    rounds: int = 3
    strategies: list | None = None                  # match players, e.g. [{"strategy": "greedy"}]
    out: str | None = None

    def to_json(self) -> dict:
        obj = dataclasses.asdict(self)
        obj.pop("out")
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentSpec":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise GraphValidationError(f"unknown spec fields: {sorted(unknown)}")
        return cls(**obj)

    def digest(self) -> str:
        canon = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def build_graph(self) -> Graph:
        return generate(self.family, **self.params)

    def zealot_config(self) -> ZealotConfig:
        sets = [list(map(int, s)) for s in self.zealots]
        while len(sets) < 2:
            sets.append([])
        return ZealotConfig.of(*sets)

    def epsilons(self) -> list[float]:
        eps = self.epsilon
        return [float(e) for e in (eps if isinstance(eps, (list, tuple)) else [eps])]


def _normalize(raw: dict[int, float]) -> tuple[dict[int, float], bool]:
    vals = np.array(list(raw.values()))
    lo, hi = vals.min(), vals.max()
    if hi - lo <= 0:
        # the normalizing denominator vanishes; emit zeros and flag it
        return {i: 0.0 for i in raw}, True
    return {i: float((v - lo) / (hi - lo)) for i, v in raw.items()}, False


def _argmax_ids(raw: dict[int, float]) -> list[int]:
    hi = max(raw.values())
    tol = ARGMAX_TOL * max(1.0, abs(hi))
    return sorted(i for i, v in raw.items() if v >= hi - tol)


@dataclass(frozen=True)
class HeatmapResult:
    kind: str
    graph: Graph
    values: dict[int, float]          # normalized to [0, 1]; zealots absent
    raw: dict[int, float]
    argmax: list[int]
    degenerate: bool
    spec_hash: str
    epsilon: float | None = None
    symmetry: dict[str, float] = field(default_factory=dict)

    def rows(self):
        coords = self.graph.coords
        for i in sorted(self.values):
            x, y = coords[i] if coords else (float("nan"), float("nan"))
            yield i, x, y, self.values[i], self.raw[i]

    def to_json(self) -> dict:
        obj = {
            "kind": self.kind,
            "spec_sha256": self.spec_hash,
            "degenerate": self.degenerate,
            "argmax": self.argmax,
            "values": {str(i): v for i, v in sorted(self.values.items())},
            "raw": {str(i): v for i, v in sorted(self.raw.items())},
        }
        if self.epsilon is not None:
            obj["epsilon"] = self.epsilon
        if self.symmetry:
            obj["symmetry_deviation"] = self.symmetry
        if self.graph.coords is not None:
            obj["coords"] = [[x, y] for x, y in self.graph.coords]
        return obj

    def write_csv(self, path) -> None:
        lines = [f"# spec_sha256: {self.spec_hash}",
                 f"# kind: {self.kind}" + (f" epsilon: {self.epsilon!r}" if self.epsilon is not None else ""),
                 f"# degenerate: {str(self.degenerate).lower()}",
                 f"# argmax: {' '.join(map(str, self.argmax))}",
                 "vertex,x,y,value,raw"]
        for i, x, y, v, r in self.rows():
            lines.append(f"{i},{x!r},{y!r},{v!r},{r!r}")
        Path(path).write_text("\n".join(lines) + "\n")

    def write_json(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json(), sort_keys=True, separators=(",", ":")) + "\n")


def influence_map(g: Graph, z: ZealotConfig, m: int, spec_hash: str = "") -> HeatmapResult:
    """Exact single-placement influence share for every free vertex, min-max normalized."""
    p = TargetingProblem(g, z, m, budget=0)
    raw = {int(i): set_value(p, [int(i)]) for i in p.candidates}
    values, degenerate = _normalize(raw)
    return HeatmapResult("energy", g, values, raw, _argmax_ids(raw), degenerate, spec_hash)


def _lattice_symmetries(g: Graph, family: str, params: dict):
    """Candidate grid symmetries that survive the automorphism check."""
    perms = {}
    if family in ("square_grid", "square_grid_with_defect"):
        w, h = int(params["width"]), int(params["height"])
        if w == h:
            perms["rotation_90"] = grid_rotation_perm(w, h)
        perms["mirror_horizontal"] = grid_mirror_perm(w, h, "horizontal")
        perms["mirror_vertical"] = grid_mirror_perm(w, h, "vertical")
    return {name: perm for name, perm in perms.items() if is_automorphism(g, perm)}


def phi_map(g: Graph, z: ZealotConfig, m: int, epsilon: float,
            spec_hash: str = "", symmetries: dict | None = None) -> HeatmapResult:
    """Relaxed-optimum weights as a normalized heatmap plus symmetry deviations."""
    pot, _ = maximize(g, z, m, epsilon)
    free = [i for i in range(g.n) if i not in set(z.union.ids)]
    raw = {int(i): float(pot.phi[i]) for i in free}
    values, degenerate = _normalize(raw)
    deviations = {name: symmetry_check(g, perm, pot.phi)
                  for name, perm in (symmetries or {}).items()}
    return HeatmapResult("phi", g, values, raw, _argmax_ids(raw), degenerate,
                         spec_hash, epsilon=epsilon, symmetry=deviations)


def run_energy_map(spec: ExperimentSpec) -> HeatmapResult:
    g = spec.build_graph()
    result = influence_map(g, spec.zealot_config(), spec.authority, spec.digest())
    if spec.out:
        result.write_csv(f"{spec.out}.csv")
        result.write_json(f"{spec.out}.json")
    return result


def run_phi_map(spec: ExperimentSpec) -> list[HeatmapResult]:
    g = spec.build_graph()
    z = spec.zealot_config()
    syms = _lattice_symmetries(g, spec.family, spec.params)
    results = []
    for eps in spec.epsilons():
        res = phi_map(g, z, spec.authority, eps, spec.digest(), syms)
        if spec.out:
            tag = f"_eps{eps!r}" if len(spec.epsilons()) > 1 else ""
            res.write_csv(f"{spec.out}{tag}.csv")
            res.write_json(f"{spec.out}{tag}.json")
        results.append(res)
    return results


def localization_mass(g: Graph, z_from: VertexSet, phi: np.ndarray, hops: int = 2) -> float:
    """Share of the weight vector within the given hop distance of a vertex set."""
    dist = graph_distances(g, z_from)
    mask = (dist >= 0) & (dist <= hops)
    return float(np.asarray(phi)[mask].sum())


# ---------------------------------------------------------------------------
# Matches
# ---------------------------------------------------------------------------

def run_match(spec: ExperimentSpec) -> dict:
    """Play one full game between two configured strategies and transcribe it."""
    if not spec.strategies or len(spec.strategies) != 2:
        raise GraphValidationError("match needs exactly two strategies")
    players = []
    for i, s in enumerate(spec.strategies):
        if isinstance(s, str):
            s = {"strategy": s}
        players.append(game_mod.Player(
            strategy=s["strategy"],
            seed=s.get("seed", spec.seed + i),
            epsilon=float(s.get("epsilon", 0.15))))
    g = spec.build_graph()
    state = game_mod.new_game(g, rounds_per_player=spec.rounds)
    moves = []
    while not game_mod.is_over(state):
        player = players[state.turn - 1]
        if not player.is_ai:
            raise GraphValidationError("match strategies must both be automatic")
        v = game_mod.ai_move(state, player)
        state = game_mod.apply_move(state, state.turn, v)
        moves.append({
            "player": state.history[-1][0],
            "vertex": v,
            "shares": list(state.shares) if state.shares else None,
        })
    final = state.shares
    winner = 0
    if final is not None and final[0] != final[1]:
        winner = 1 if final[0] > final[1] else 2
    transcript = {
        "spec_sha256": spec.digest(),
        "strategies": [p.strategy for p in players],
        "moves": moves,
        "final_shares": list(final) if final else None,
        "winner": winner,
    }
    if spec.out:
        Path(spec.out).write_text(
            json.dumps(transcript, sort_keys=True, separators=(",", ":")) + "\n")
    return transcript


# ---------------------------------------------------------------------------
# Property suite
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    detail: str
    elapsed: float


def run_property_suite(seed: int = 0, corrupt: str | None = None) -> list[PropertyResult]:
    """Execute one fast end-to-end pass over the module invariants.

    corrupt="gradient" flips the analytic gradient's sign inside the
    gradient check so the harness can prove it would catch a regression.
    """
    from . import properties

    return properties.run_all(seed=seed, corrupt=corrupt)


def summarize(results: list[PropertyResult]) -> str:
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"[{status}] {r.name} ({r.elapsed:.2f}s): {r.detail}")
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} properties passed")
    return "\n".join(lines)


def timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0
