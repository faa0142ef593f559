"""Harmonic opinion fields with pinned (zealot) boundary values.

Non-zealot vertices take the weighted average of their out-neighbors'
opinions; zealots hold a fixed extreme opinion. The steady state solves a
graph Laplace problem per opinion component, and equals the probability that
a random walk started at the vertex is absorbed by each zealot class.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import (
    GraphValidationError,
    NotStronglyConnectedError,
    SingularSystemError,
    StabilityError,
    WalkCapError,
)
from .graphs import Graph, VertexSet, is_strongly_connected, laplacian, out_degrees

SOLVER_RESIDUAL_TOL = 1e-10
SIMPLEX_ROW_TOL = 1e-9
SIMPLEX_ENTRY_TOL = 1e-12
DENSE_SOLVE_LIMIT = 2000


@dataclass(frozen=True)
class ZealotConfig:
    """Disjoint vertex sets pinned to the extreme opinions 0..k-1.

    Individual sets may be empty (a competitive instance needs at least two
    nonempty ones, but single-authority sweeps legitimately leave the other
    class empty). The union must be nonempty.
    """

    sets: tuple[VertexSet, ...]

    def __post_init__(self):
        sets = tuple(s if isinstance(s, VertexSet) else VertexSet.of(s)
                     for s in self.sets)
        object.__setattr__(self, "sets", sets)
        if len(sets) < 2:
            raise GraphValidationError("need at least two opinion classes")
        seen: set[int] = set()
        for s in sets:
            overlap = seen & set(s.ids)
            if overlap:
                raise GraphValidationError(f"zealot sets overlap on {sorted(overlap)}")
            seen |= set(s.ids)
        if not seen:
            raise GraphValidationError("zealot union is empty")

    @classmethod
    def of(cls, *sets) -> "ZealotConfig":
        return cls(tuple(VertexSet.of(s) for s in sets))

    @property
    def k(self) -> int:
        return len(self.sets)

    @property
    def union(self) -> VertexSet:
        out: set[int] = set()
        for s in self.sets:
            out |= set(s.ids)
        return VertexSet.of(out)

    def opponents(self, m: int) -> VertexSet:
        out: set[int] = set()
        for ell, s in enumerate(self.sets):
            if ell != m:
                out |= set(s.ids)
        return VertexSet.of(out)

    def check(self, g: Graph, m: int | None = None) -> None:
        self.union.check_range(g.n)
        if m is not None and not 0 <= m < self.k:
            raise GraphValidationError(f"authority index {m} out of range for k={self.k}")


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class OpinionField:
    """n x k matrix of vertex opinions; every row lies on the unit simplex."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise GraphValidationError("opinion field must be an n x k matrix")
        if v.min(initial=0.0) < -SIMPLEX_ENTRY_TOL or v.max(initial=0.0) > 1 + SIMPLEX_ENTRY_TOL:
            raise GraphValidationError("opinion entries leave [0, 1]")
        rows = v.sum(axis=1)
        if np.abs(rows - 1.0).max(initial=0.0) > SIMPLEX_ROW_TOL:
            raise GraphValidationError("opinion rows do not sum to 1")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]

    def column(self, m: int) -> np.ndarray:
        return self.values[:, m]


@dataclass(frozen=True)
class ScalarOpinion:
    """Scalar opinion field in [0, 1]: the share of one opinion per vertex."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise GraphValidationError("scalar opinion must be a vector")
        if v.min(initial=0.0) < -SIMPLEX_ENTRY_TOL or v.max(initial=0.0) > 1 + SIMPLEX_ENTRY_TOL:
            raise GraphValidationError("scalar opinion leaves [0, 1]")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _interior_solve(g: Graph, boundary: np.ndarray, boundary_values: np.ndarray) -> np.ndarray:
    """Solve L u = 0 on the interior with the given boundary rows pinned.

    boundary_values may be a vector or a matrix (one column per opinion).
    Uses a dense factorization below DENSE_SOLVE_LIMIT interior vertices and
    a sparse one above; either way the relative residual must meet
    SOLVER_RESIDUAL_TOL or the solve is rejected.
    """
    if boundary.size == 0:
        raise SingularSystemError("empty zealot union: interior system is singular")
    mask = np.zeros(g.n, dtype=bool)
    mask[boundary] = True
    interior = np.nonzero(~mask)[0]
    vals = np.atleast_2d(np.asarray(boundary_values, dtype=float).T).T  # (n_b, k)
    out = np.zeros((g.n, vals.shape[1]))
    out[boundary] = vals
    if interior.size == 0:
        return out

    L = laplacian(g)
    L_ii = L[np.ix_(interior, interior)]
    rhs = -L[np.ix_(interior, boundary)] @ vals
    try:
        if interior.size < DENSE_SOLVE_LIMIT:
            sol = scipy.linalg.solve(L_ii, rhs)
        else:
            lu = scipy.sparse.linalg.splu(scipy.sparse.csc_matrix(L_ii))
            sol = np.column_stack([lu.solve(rhs[:, c]) for c in range(rhs.shape[1])])
    except (np.linalg.LinAlgError, RuntimeError) as exc:
        raise SingularSystemError(f"interior system could not be solved: {exc}") from exc
    resid = np.abs(L_ii @ sol - rhs).max(initial=0.0)
    scale = max(np.abs(rhs).max(initial=0.0), np.abs(sol).max(initial=0.0), 1.0)
    if not np.isfinite(sol).all() or resid > SOLVER_RESIDUAL_TOL * scale:
        raise SingularSystemError(
            f"interior solve residual {resid:.3e} exceeds tolerance; "
            "input graph is likely not strongly connected")
    out[interior] = sol
    return out


def solve_harmonic(g: Graph, z: ZealotConfig) -> OpinionField:
    """Steady-state opinion field: averaging at free vertices, extremes at zealots.

    Every row of the result lies on the unit simplex; free rows satisfy
    (L u)(i) = 0 componentwise up to the solver tolerance.
    """
    z.check(g)
    if not is_strongly_connected(g):
        raise NotStronglyConnectedError("harmonic solve requires a strongly connected graph")
    boundary = np.array(z.union.ids, dtype=int)
    vals = np.zeros((boundary.size, z.k))
    pos = {v: idx for idx, v in enumerate(boundary)}
    for ell, s in enumerate(z.sets):
        for v in s:
            vals[pos[v], ell] = 1.0
    return OpinionField(_interior_solve(g, boundary, vals))


def solve_grouped(g: Graph, z: ZealotConfig, m: int,
                  extra: VertexSet | None = None) -> ScalarOpinion:
    """Scalar solve for authority m with all opponents grouped to 0.

    v = 1 on Z_m and on the extra targeted set T, v = 0 on every opposing
    zealot, and v is harmonic elsewhere. With T empty this equals column m
    of solve_harmonic.
    """
    z.check(g, m)
    extra = extra if extra is not None else VertexSet()
    extra.check_range(g.n)
    if set(extra.ids) & set(z.union.ids):
        raise GraphValidationError("targeted set overlaps the zealot sets")
    if not is_strongly_connected(g):
        raise NotStronglyConnectedError("grouped solve requires a strongly connected graph")
    ones = sorted(set(z.sets[m].ids) | set(extra.ids))
    zeros = list(z.opponents(m).ids)
    boundary = np.array(ones + zeros, dtype=int)
    vals = np.concatenate([np.ones(len(ones)), np.zeros(len(zeros))])
    order = np.argsort(boundary)
    v = _interior_solve(g, boundary[order], vals[order])[:, 0]
    return ScalarOpinion(v)


def influence(field: OpinionField | ScalarOpinion | np.ndarray, m: int | None = None) -> float:
    """Fraction of total opinion mass held by one opinion: mean of its values.

    For an OpinionField the opinion index m selects the column; a scalar
    field is used as is. Across all m the values sum to 1.
    """
    if isinstance(field, OpinionField):
        if m is None:
            raise ValueError("opinion index m required for a vector field")
        col = field.column(m)
    elif isinstance(field, ScalarOpinion):
        col = field.values
    else:
        col = np.asarray(field, dtype=float)
        if col.ndim == 2:
            if m is None:
                raise ValueError("opinion index m required for a matrix")
            col = col[:, m]
    return float(col.mean())


def dirichlet_energy(g: Graph, field: OpinionField | ScalarOpinion | np.ndarray) -> float:
    """Quadratic smoothness energy (undirected graphs only).

    Half the sum over opinion components of <u_l, L u_l>; per component this
    equals the weighted sum of squared differences over undirected edges.
    Zero iff the field is constant; the harmonic field minimizes it among
    fields with the same boundary values.
    """
    if g.directed:
        raise GraphValidationError("Dirichlet energy is defined for undirected graphs")
    if isinstance(field, OpinionField):
        vals = field.values
    elif isinstance(field, ScalarOpinion):
        vals = field.values[:, None]
    else:
        vals = np.asarray(field, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
    L = laplacian(g)
    return float(0.5 * sum(vals[:, c] @ (L @ vals[:, c]) for c in range(vals.shape[1])))


def simulate_dynamics(g: Graph, z: ZealotConfig, u0: OpinionField,
                      dt: float, steps: int) -> OpinionField:
    """Explicit-Euler integration of the linear diffusion toward the steady state.

    Free rows follow du/dt = -(L u); zealot rows stay pinned. Requires
    dt < 1 / max out-degree so each update is a convex combination and rows
    stay on the simplex at every step. Test utility, not a performance path.
    """
    z.check(g)
    if u0.n != g.n:
        raise GraphValidationError("initial field size does not match graph")
    d = out_degrees(g)
    if dt <= 0 or dt >= 1.0 / d.max():
        raise StabilityError(
            f"dt={dt} unstable: need 0 < dt < 1/max_degree = {1.0 / d.max():.6g}")
    boundary = np.array(z.union.ids, dtype=int)
    expected = np.zeros((boundary.size, z.k))
    pos = {v: idx for idx, v in enumerate(boundary)}
    for ell, s in enumerate(z.sets):
        for v in s:
            expected[pos[v], ell] = 1.0
    if np.abs(u0.values[boundary] - expected).max(initial=0.0) > SIMPLEX_ROW_TOL:
        raise GraphValidationError("initial field does not match zealot boundary values")
    L = laplacian(g)
    free = np.setdiff1d(np.arange(g.n), boundary)
    u = np.array(u0.values)
    for _ in range(steps):
        u[free] -= dt * (L @ u)[free]
    return OpinionField(u)


class HittingEstimate(NamedTuple):
    probability: float
    std_error: float


def mc_hitting_probability(g: Graph, z: ZealotConfig, m: int, vertex: int,
                           walks: int, seed: int,
                           step_cap: int = 10 ** 6) -> HittingEstimate:
    """Monte-Carlo estimate of the chance a walk from vertex hits class m first.

    Walks move i -> j with probability w_ij / d_i and stop on the first
    zealot reached; the estimate is the fraction absorbed in Z_m, an
    unbiased estimator of the harmonic value at the vertex. The reported
    standard error is sqrt(p(1-p)/walks). Walks exceeding step_cap raise.
    """
    z.check(g, m)
    if not 0 <= vertex < g.n:
        raise GraphValidationError(f"vertex {vertex} out of range")
    if walks < 1:
        raise GraphValidationError("need at least one walk")
    if not is_strongly_connected(g):
        raise NotStronglyConnectedError("walks may never absorb on a non-strongly-connected graph")

    target = np.zeros(g.n, dtype=bool)
    target[list(z.sets[m].ids)] = True
    absorbing = np.zeros(g.n, dtype=bool)
    absorbing[list(z.union.ids)] = True
    if absorbing[vertex]:
        p = 1.0 if target[vertex] else 0.0
        return HittingEstimate(p, 0.0)

    # padded per-vertex cumulative transition table for vectorized stepping
    max_deg = max(len(nbrs) for nbrs in g.out_edges)
    nbr = np.zeros((g.n, max_deg), dtype=np.int64)
    cum = np.ones((g.n, max_deg))
    for i, nbrs in enumerate(g.out_edges):
        js = np.array([j for j, _ in nbrs], dtype=np.int64)
        ws = np.array([w for _, w in nbrs])
        c = np.cumsum(ws) / ws.sum()
        nbr[i, :len(js)] = js
        nbr[i, len(js):] = js[-1]
        cum[i, :len(js)] = c
        cum[i, len(js):] = 1.0

    rng = np.random.default_rng(seed)
    pos = np.full(walks, vertex, dtype=np.int64)
    active = np.arange(walks)
    hits = 0
    for _ in range(step_cap):
        r = rng.random(active.size)
        p = pos[active]
        idx = (cum[p] < r[:, None]).sum(axis=1)
        pos[active] = nbr[p, idx]
        done = absorbing[pos[active]]
        if done.any():
            hits += int(target[pos[active[done]]].sum())
            active = active[~done]
            if active.size == 0:
                break
    else:
        raise WalkCapError(f"{active.size} walks still alive after {step_cap} steps")
    p_hat = hits / walks
    return HittingEstimate(p_hat, float(np.sqrt(p_hat * (1 - p_hat) / walks)))
