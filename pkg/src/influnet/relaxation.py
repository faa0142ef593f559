"""Smooth relaxation of the placement problem over the probability simplex.

Hard conversion of a target set is replaced by a nonnegative vertex weighting
phi that sums to 1 and vanishes on existing zealots; a penalty of strength
1/epsilon drags the opinion toward 1 wherever phi puts mass. The resulting
objective is strictly concave in phi with a closed-form gradient and Hessian,
so projected gradient ascent finds the unique maximizer; rounding its top
entries back to vertices gives a fast placement heuristic.
"""
from __future__ import annotations

import logging
from dataclasses import InitVar, dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, GraphValidationError, SingularSystemError
from .graphs import Graph, VertexSet, is_automorphism, laplacian
from .harmonic import SOLVER_RESIDUAL_TOL, ZealotConfig, _readonly
from .targeting import TargetingProblem, TargetingSolution, set_value

MASS_TOL = 1e-9
DEFAULT_EPSILON = 0.15
DEFAULT_PG_TOL = 1e-7
DEFAULT_MAX_ITER = 5000
ARMIJO_SLOPE = 1e-4
ARMIJO_SHRINK = 0.5


def project_simplex(v: np.ndarray, total: float = 1.0) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = total} (sort-based, O(n log n))."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    cssv = np.cumsum(u) - total
    ind = np.arange(1, v.size + 1)
    rho = ind[u - cssv / ind > 0][-1]
    theta = cssv[rho - 1] / rho
    return np.maximum(v - theta, 0.0)


@dataclass(frozen=True)
class RelaxPotential:
    """Nonnegative vertex weights with unit total mass and penalty scale epsilon.

    check_mass=False skips the unit-mass requirement for diagnostic solves
    (the penalized system itself is defined for any nonnegative phi).
    """

    phi: np.ndarray
    epsilon: float
    check_mass: InitVar[bool] = True

    def __post_init__(self, check_mass: bool):
        phi = np.asarray(self.phi, dtype=float)
        if phi.ndim != 1:
            raise GraphValidationError("phi must be a vector over vertices")
        if self.epsilon <= 0:
            raise GraphValidationError(f"epsilon must be positive, got {self.epsilon}")
        if phi.min(initial=0.0) < 0:
            raise GraphValidationError("phi must be nonnegative")
        if check_mass and abs(phi.sum() - 1.0) > MASS_TOL:
            raise GraphValidationError(f"phi mass {phi.sum()!r} is not 1")
        object.__setattr__(self, "phi", _readonly(phi))

    @classmethod
    def uniform(cls, g: Graph, z: ZealotConfig, epsilon: float) -> "RelaxPotential":
        free = _free_vertices(g, z)
        phi = np.zeros(g.n)
        phi[free] = 1.0 / free.size
        return cls(phi, epsilon)


@dataclass(frozen=True)
class RelaxedState:
    """Solution bundle of one penalized solve restricted to the free vertices."""

    free: np.ndarray       # free vertex ids, ascending
    v_c: np.ndarray        # opinion values on the free vertices
    w_c: np.ndarray        # adjoint sensitivity vector
    objective: float       # influence share of the authority
    gradient_c: np.ndarray  # objective gradient w.r.t. phi on the free vertices
    epsilon: float
    n: int

    def full_value(self, z: ZealotConfig, m: int) -> np.ndarray:
        v = np.zeros(self.n)
        v[list(z.sets[m].ids)] = 1.0
        v[self.free] = self.v_c
        return v


def _free_vertices(g: Graph, z: ZealotConfig) -> np.ndarray:
    z.check(g)
    mask = np.ones(g.n, dtype=bool)
    mask[list(z.union.ids)] = False
    free = np.nonzero(mask)[0]
    if free.size == 0:
        raise GraphValidationError("no free vertices outside the zealot sets")
    return free


class _PenalizedSystem:
    """Shared matrices for repeated penalized solves with a fixed (g, z, m)."""

    def __init__(self, g: Graph, z: ZealotConfig, m: int):
        z.check(g, m)
        self.n = g.n
        self.free = _free_vertices(g, z)
        L = laplacian(g)
        self.L_cc = L[np.ix_(self.free, self.free)]
        ones_ids = list(z.sets[m].ids)
        # -L[c, Z_m] @ 1: inbound edge weight from each free vertex into Z_m
        self.rhs_m = (-L[np.ix_(self.free, ones_ids)] @ np.ones(len(ones_ids))
                      if ones_ids else np.zeros(self.free.size))
        self.n_zm = len(ones_ids)

    def factorize(self, phi_c: np.ndarray, epsilon: float):
        M = self.L_cc + np.diag(phi_c / epsilon)
        try:
            return scipy.linalg.lu_factor(M)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise SingularSystemError(f"penalized system factorization failed: {exc}") from exc

    def solve_v(self, lu, phi_c: np.ndarray, epsilon: float) -> np.ndarray:
        return scipy.linalg.lu_solve(lu, phi_c / epsilon + self.rhs_m)

    def solve_w(self, lu, epsilon: float) -> np.ndarray:
        return scipy.linalg.lu_solve(lu, np.ones(self.free.size), trans=1) / epsilon

    def objective_of(self, v_c: np.ndarray) -> float:
        return float((v_c.sum() + self.n_zm) / self.n)

    def value(self, phi_c: np.ndarray, epsilon: float) -> float:
        lu = self.factorize(phi_c, epsilon)
        return self.objective_of(self.solve_v(lu, phi_c, epsilon))

    def value_and_grad(self, phi_c: np.ndarray, epsilon: float):
        lu = self.factorize(phi_c, epsilon)
        v = self.solve_v(lu, phi_c, epsilon)
        w = self.solve_w(lu, epsilon)
        grad = (1.0 - v) * w / self.n
        return self.objective_of(v), v, w, grad


def solve_relaxed(g: Graph, z: ZealotConfig, m: int, pot: RelaxPotential) -> RelaxedState:
    """Solve the penalized opinion system and assemble value, adjoint and gradient.

    The free-vertex system is [L_cc + diag(phi_c)/eps] v_c = phi_c/eps + a_m,
    where a_m collects arc weights into the authority's zealots; boundary
    values are exact by construction. The interior residual must meet the
    shared solver tolerance.
    """
    sys_ = _PenalizedSystem(g, z, m)
    phi = np.asarray(pot.phi, dtype=float)
    if phi.shape != (g.n,):
        raise GraphValidationError("phi length does not match the graph")
    on_zealots = np.abs(phi[list(z.union.ids)]).max(initial=0.0)
    if on_zealots > 0:
        raise GraphValidationError("phi must vanish on the zealot sets")
    phi_c = phi[sys_.free]
    lu = sys_.factorize(phi_c, pot.epsilon)
    v = sys_.solve_v(lu, phi_c, pot.epsilon)
    w = sys_.solve_w(lu, pot.epsilon)
    rhs = phi_c / pot.epsilon + sys_.rhs_m
    M = sys_.L_cc + np.diag(phi_c / pot.epsilon)
    resid = np.abs(M @ v - rhs).max(initial=0.0)
    scale = max(np.abs(rhs).max(initial=0.0), 1.0)
    if not np.isfinite(v).all() or resid > SOLVER_RESIDUAL_TOL * scale:
        raise SingularSystemError(f"penalized solve residual {resid:.3e} out of tolerance")
    grad = (1.0 - v) * w / g.n
    return RelaxedState(free=sys_.free, v_c=v, w_c=w,
                        objective=sys_.objective_of(v), gradient_c=grad,
                        epsilon=pot.epsilon, n=g.n)


def gradient(state: RelaxedState) -> np.ndarray:
    """Objective gradient on the free vertices: (1 - v_c) * w_c / n."""
    return (1.0 - state.v_c) * state.w_c / state.n


def hessian(state: RelaxedState, g: Graph, z: ZealotConfig, m: int,
            pot: RelaxPotential) -> np.ndarray:
    """Dense objective Hessian on the free vertices (testing aid).

    Symmetric by construction and negative semidefinite by concavity of the
    objective. Forms the explicit inverse of the penalized matrix, so keep
    it to small instances.
    """
    sys_ = _PenalizedSystem(g, z, m)
    phi_c = np.asarray(pot.phi)[sys_.free]
    M = sys_.L_cc + np.diag(phi_c / pot.epsilon)
    Phi = np.linalg.inv(M)
    cross = Phi * np.outer(state.w_c, 1.0 - state.v_c)
    return -(cross + cross.T) / (pot.epsilon * g.n)


def maximize(g: Graph, z: ZealotConfig, m: int, epsilon: float = DEFAULT_EPSILON,
             start: np.ndarray | None = None, tol: float = DEFAULT_PG_TOL,
             max_iter: int = DEFAULT_MAX_ITER) -> tuple[RelaxPotential, RelaxedState]:
    """Projected gradient ascent over the restricted simplex.

    Steps use a curvature (Barzilai-Borwein) initial length safeguarded by
    Armijo backtracking; iterates stay feasible via Euclidean projection.
    Terminates when the unit-step projected-gradient infinity norm drops to
    tol. Strict concavity makes the maximizer unique, so the start only
    affects the iteration count. Raises ConvergenceError at the iteration
    cap rather than returning a silently unconverged answer.
    """
    sys_ = _PenalizedSystem(g, z, m)
    nf = sys_.free.size
    if start is None:
        phi = np.full(nf, 1.0 / nf)
    else:
        start = np.asarray(start, dtype=float)
        full = start.shape == (g.n,)
        phi = start[sys_.free] if full else start.copy()
        if phi.shape != (nf,):
            raise GraphValidationError("start must cover the graph or its free vertices")
        if full and np.abs(np.delete(start, sys_.free)).max(initial=0.0) > 0:
            raise GraphValidationError("start puts mass on zealot vertices")
        if phi.min(initial=0.0) < 0 or abs(phi.sum() - 1.0) > MASS_TOL:
            raise GraphValidationError("start must lie on the simplex")

    f, v, w, grad = sys_.value_and_grad(phi, epsilon)
    step = 1.0
    phi_prev = grad_prev = None
    pg_norm = np.inf
    for _ in range(max_iter):
        pg = phi - project_simplex(phi + grad)
        pg_norm = float(np.abs(pg).max(initial=0.0))
        if pg_norm <= tol:
            pot = _assemble(g, sys_.free, phi, epsilon)
            return pot, solve_relaxed(g, z, m, pot)
        if phi_prev is not None:
            s = phi - phi_prev
            y = grad - grad_prev
            curv = -float(s @ y)  # positive for a concave objective
            step = float(s @ s) / curv if curv > 1e-18 else 1.0
            step = min(max(step, 1e-12), 1e12)
        phi_prev, grad_prev = phi, grad
        alpha = step
        for _ in range(80):
            cand = project_simplex(phi + alpha * grad)
            d = cand - phi
            fc = sys_.value(cand, epsilon)
            if fc >= f + ARMIJO_SLOPE * float(grad @ d):
                break
            alpha *= ARMIJO_SHRINK
        phi = cand
        f, v, w, grad = sys_.value_and_grad(phi, epsilon)
    raise ConvergenceError(
        f"no convergence after {max_iter} iterations "
        f"(projected gradient norm {pg_norm:.3e} > {tol:.1e})",
        gradient_norm=pg_norm)


def _assemble(g: Graph, free: np.ndarray, phi_c: np.ndarray, epsilon: float) -> RelaxPotential:
    full = np.zeros(g.n)
    full[free] = phi_c
    # projection keeps the mass at 1 up to roundoff; renormalize the dust
    full /= full.sum()
    return RelaxPotential(full, epsilon)


def relaxed_select(p: TargetingProblem, epsilon: float = DEFAULT_EPSILON,
                   tie_break: str = "lowest", seed: int | None = None,
                   tol: float = DEFAULT_PG_TOL,
                   max_iter: int = DEFAULT_MAX_ITER) -> TargetingSolution:
    """Budgeted selection by repeated relaxation: maximize, take the top vertex, refreeze.

    Each round solves the relaxed problem with the vertices chosen so far
    absorbed into the authority's zealot set, then converts the vertex
    carrying the largest weight. The reported value is the exact influence
    share of the chosen set, not the relaxed objective.
    """
    if tie_break not in ("lowest", "random"):
        raise ValueError("tie_break must be 'lowest' or 'random'")
    rng = np.random.default_rng(seed) if tie_break == "random" else None
    chosen: list[int] = []
    trace: list[tuple[int, float]] = []
    current = set_value(p, ())
    for _ in range(p.budget):
        sets = list(p.zealots.sets)
        sets[p.authority] = VertexSet.of(set(sets[p.authority].ids) | set(chosen))
        z_round = ZealotConfig(tuple(sets))
        pot, _state = maximize(p.graph, z_round, p.authority, epsilon,
                               tol=tol, max_iter=max_iter)
        phi = pot.phi
        ties = np.nonzero(phi == phi.max())[0]
        pick = int(rng.choice(ties)) if rng is not None else int(ties[0])
        chosen.append(pick)
        val = set_value(p, chosen)
        trace.append((pick, val - current))
        current = val
    return TargetingSolution(VertexSet.of(chosen), current, tuple(trace))


def symmetry_check(g: Graph, perm, phi: np.ndarray) -> float:
    """Max deviation of a vertex function from its pullback under an automorphism.

    perm must actually preserve the weighted edge set; anything else is an
    input error, not a zero report.
    """
    perm = np.asarray(perm, dtype=int)
    if not is_automorphism(g, perm):
        raise GraphValidationError("permutation is not a graph automorphism")
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (g.n,):
        raise GraphValidationError("phi length does not match the graph")
    return float(np.abs(phi - phi[perm]).max(initial=0.0))
