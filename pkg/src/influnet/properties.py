"""Fast self-contained invariant checks aggregated by the props command.

Each check exercises one advertised property of the solvers on small seeded
instances and reports pass/fail with a measured witness. The whole suite is
meant to run in well under a minute; the pytest suite covers the same ground
more exhaustively.
"""
from __future__ import annotations

import time

import numpy as np

from . import relaxation
from .experiments import PropertyResult
from .graphs import Graph, VertexSet, generate, grid_mirror_perm, square_grid
from .harmonic import (
    OpinionField,
    ZealotConfig,
    dirichlet_energy,
    influence,
    mc_hitting_probability,
    solve_grouped,
    solve_harmonic,
)
from .relaxation import RelaxPotential, hessian, maximize, project_simplex, solve_relaxed
from .targeting import TargetingProblem, brute_force, check_submodular, greedy


def random_digraph(n: int, seed: int, extra: int | None = None) -> Graph:
    """Random strongly connected digraph: a permutation cycle plus extra arcs."""
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    arcs = {(int(perm[i]), int(perm[(i + 1) % n])) for i in range(n)}
    extra = extra if extra is not None else 2 * n
    target = min(len(arcs) + extra, n * (n - 1))
    while len(arcs) < target:
        i, j = rng.integers(0, n, size=2)
        if i != j:
            arcs.add((int(i), int(j)))
    return Graph.from_edges(n, sorted(arcs), directed=True)


def random_connected_graph(n: int, seed: int, extra: int | None = None) -> Graph:
    """Random connected undirected graph: a random spanning tree plus extra edges."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    edges = {tuple(sorted((int(order[i]), int(order[rng.integers(0, i)]))))
             for i in range(1, n)}
    extra = extra if extra is not None else n
    while len(edges) < min(n - 1 + extra, n * (n - 1) // 2):
        i, j = rng.integers(0, n, size=2)
        if i != j:
            edges.add(tuple(sorted((int(i), int(j)))))
    return Graph.from_edges(n, sorted(edges), directed=False)


def random_zealots(g: Graph, seed: int, k: int = 2) -> ZealotConfig:
    rng = np.random.default_rng(seed)
    picks = rng.choice(g.n, size=min(k, g.n - 1), replace=False)
    return ZealotConfig.of(*([int(p)] for p in picks))


def _check(name, fn):
    t0 = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crash is a failure, not an abort
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    return PropertyResult(name, passed, detail, time.perf_counter() - t0)


def run_all(seed: int = 0, corrupt: str | None = None) -> list[PropertyResult]:
    checks = [
        ("simplex_invariance", lambda: _simplex_invariance(seed)),
        ("random_walk_oracle", lambda: _walk_oracle(seed)),
        ("grouped_reduction_consistency", lambda: _reduction(seed)),
        ("energy_minimality", lambda: _energy_minimality(seed)),
        ("relabeling_equivariance", lambda: _relabeling(seed)),
        ("monotone_submodular", lambda: _submodular(seed)),
        ("greedy_guarantee", lambda: _greedy_guarantee(seed)),
        ("gradient_finite_difference", lambda: _gradient_fd(seed, corrupt == "gradient")),
        ("hessian_concavity", lambda: _hessian(seed)),
        ("penalty_convergence", lambda: _penalty_convergence()),
        ("maximizer_uniqueness", lambda: _uniqueness(seed)),
        ("penalty_scaling_invariance", lambda: _scaling(seed)),
        ("symmetric_input_symmetric_output", lambda: _equivariance()),
    ]
    return [_check(name, fn) for name, fn in checks]


def _simplex_invariance(seed):
    worst_row, worst_entry = 0.0, 0.0
    cases = [square_grid(5, 5), generate("cycle", n=9),
             generate("random_geometric", n=30, radius=0.35, seed=seed)]
    cases += [random_digraph(12, seed + i) for i in range(3)]
    for i, g in enumerate(cases):
        u = solve_harmonic(g, random_zealots(g, seed + i, k=3 if g.n > 10 else 2))
        rows = np.abs(u.values.sum(axis=1) - 1).max()
        entry = max(-u.values.min(), u.values.max() - 1, 0.0)
        worst_row, worst_entry = max(worst_row, rows), max(worst_entry, entry)
    ok = worst_row <= 1e-9 and worst_entry <= 1e-12
    return ok, f"max row-sum dev {worst_row:.2e}, max entry excursion {worst_entry:.2e}"


def _walk_oracle(seed):
    bad = total = 0
    for i in range(3):
        g = random_connected_graph(10, seed + i)
        z = random_zealots(g, seed + 40 + i)
        v = solve_grouped(g, z, 0)
        free = [x for x in range(g.n) if x not in z.union][:3]
        for x in free:
            est = mc_hitting_probability(g, z, 0, x, walks=20_000, seed=seed + x)
            total += 1
            if abs(est.probability - v.values[x]) > 3 * max(est.std_error, 1e-12):
                bad += 1
    return bad == 0, f"{total - bad}/{total} estimates within 3 standard errors"


def _reduction(seed):
    worst = 0.0
    for i in range(3):
        g = random_digraph(10, seed + 7 * i)
        z = random_zealots(g, seed + i, k=3)
        u = solve_harmonic(g, z)
        for m in range(z.k):
            v = solve_grouped(g, z, m)
            worst = max(worst, np.abs(u.column(m) - v.values).max())
    return worst <= 1e-9, f"max |harmonic column - grouped| = {worst:.2e}"


def _energy_minimality(seed):
    g = random_connected_graph(12, seed)
    z = random_zealots(g, seed)
    u = solve_harmonic(g, z)
    e0 = dirichlet_energy(g, u)
    rng = np.random.default_rng(seed)
    free = [i for i in range(g.n) if i not in z.union]
    ok = True
    for _ in range(20):
        vals = np.array(u.values)
        bump = rng.uniform(-0.05, 0.05, size=len(free))
        vals[free, 0] = np.clip(vals[free, 0] + bump, 0, 1)
        vals[free, 1] = 1 - vals[free, 0]
        ok &= dirichlet_energy(g, vals) >= e0 - 1e-12
    return ok, f"harmonic energy {e0:.6f} minimal over 20 perturbations"


def _relabeling(seed):
    g = random_digraph(9, seed)
    rng = np.random.default_rng(seed + 1)
    perm = rng.permutation(g.n)  # perm[old] = new id
    relabeled = Graph.from_edges(
        g.n, [(int(perm[i]), int(perm[j]), w) for i, j, w in g.arcs()], directed=True)
    z = random_zealots(g, seed)
    z2 = ZealotConfig.of(*[[int(perm[v]) for v in s] for s in z.sets])
    u1 = solve_harmonic(g, z).values
    u2 = solve_harmonic(relabeled, z2).values
    dev = np.abs(u2[perm] - u1).max()
    return dev <= 1e-9, f"relabeled solution deviation {dev:.2e}"


def _submodular(seed):
    g = random_connected_graph(8, seed)
    z = random_zealots(g, seed)
    rep = check_submodular(g, z, 0)
    return rep.ok, (f"{rep.submodular_checked} diminishing-returns and "
                    f"{rep.monotone_checked} monotonicity checks, "
                    f"{len(rep.violations)} violations")


def _greedy_guarantee(seed):
    bound = 1 - 1 / np.e
    n_opt = n_tot = 0
    for i in range(5):
        g = random_connected_graph(9, seed + i)
        z = random_zealots(g, seed + i)
        p = TargetingProblem(g, z, 0, budget=2)
        gr, bf = greedy(p), brute_force(p)
        if gr.value < bound * bf.value - 1e-9:
            return False, f"greedy {gr.value:.6f} below bound {bound * bf.value:.6f}"
        n_tot += 1
        n_opt += gr.value >= bf.value - 1e-9
    return True, f"bound held on {n_tot} instances; greedy exactly optimal on {n_opt}"


def _gradient_fd(seed, corrupted=False):
    worst = 0.0
    for i in range(5):
        g = random_digraph(8, seed + i)
        z = random_zealots(g, seed + i)
        rng = np.random.default_rng(seed + 10 + i)
        phi = np.zeros(g.n)
        free = [x for x in range(g.n) if x not in z.union]
        raw = rng.random(len(free)) + 0.2  # strictly positive: differencing stays feasible
        phi[free] = raw / raw.sum()
        pot = RelaxPotential(phi, epsilon=0.2)
        state = solve_relaxed(g, z, 0, pot)
        analytic = relaxation.gradient(state)
        if corrupted:
            analytic = -analytic
        h = 1e-6
        fd = np.zeros_like(analytic)
        for jj, j in enumerate(free):
            for sgn in (+1, -1):
                p2 = np.array(phi)
                p2[j] += sgn * h
                st = solve_relaxed(g, z, 0, RelaxPotential(p2, 0.2, check_mass=False))
                fd[jj] += sgn * st.objective
        fd /= 2 * h
        denom = max(np.abs(fd).max(), 1e-12)
        worst = max(worst, np.abs(fd - analytic).max() / denom)
    return worst <= 1e-5, f"max relative gradient error {worst:.2e}"


def _hessian(seed):
    worst_eig, worst_asym = -np.inf, 0.0
    for i in range(3):
        g = random_digraph(8, seed + i)
        z = random_zealots(g, seed + i)
        rng = np.random.default_rng(seed + 20 + i)
        phi = np.zeros(g.n)
        free = [x for x in range(g.n) if x not in z.union]
        raw = rng.random(len(free)) + 0.2
        phi[free] = raw / raw.sum()
        pot = RelaxPotential(phi, epsilon=0.25)
        state = solve_relaxed(g, z, 0, pot)
        H = hessian(state, g, z, 0, pot)
        worst_asym = max(worst_asym, np.abs(H - H.T).max())
        worst_eig = max(worst_eig, float(np.linalg.eigvalsh(H).max()))
    ok = worst_asym == 0.0 and worst_eig <= 1e-8
    return ok, f"max eigenvalue {worst_eig:.2e}, max asymmetry {worst_asym:.2e}"


def _penalty_convergence():
    g = square_grid(5, 5)
    z = ZealotConfig.of([0], [24])
    targets = VertexSet.of([7, 12])
    pinned = solve_grouped(g, z, 0, extra=targets)
    phi = np.zeros(g.n)
    phi[list(targets)] = 1 / len(targets)
    gaps = []
    for eps in (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
        st = solve_relaxed(g, z, 0, RelaxPotential(phi, eps))
        v = st.full_value(z, 0)
        gaps.append(np.abs(v - pinned.values).max())
    mono = all(b < a for a, b in zip(gaps, gaps[1:]))
    return mono and gaps[-1] <= 1e-4, f"gaps {['%.1e' % gp for gp in gaps]}"


def _uniqueness(seed):
    g = square_grid(4, 4)
    z = ZealotConfig.of([5], [])
    rng = np.random.default_rng(seed)
    ref, _ = maximize(g, z, 1, epsilon=0.15)
    worst = 0.0
    for _ in range(3):
        start = np.zeros(g.n)
        free = [x for x in range(g.n) if x != 5]
        start[free] = project_simplex(rng.random(len(free)))
        pot, _ = maximize(g, z, 1, epsilon=0.15, start=start)
        worst = max(worst, np.abs(pot.phi - ref.phi).max())
    return worst <= 1e-5, f"max deviation across starts {worst:.2e}"


def _scaling(seed):
    g = random_digraph(9, seed)
    z = random_zealots(g, seed)
    rng = np.random.default_rng(seed + 3)
    phi = np.zeros(g.n)
    free = [x for x in range(g.n) if x not in z.union]
    phi[free] = project_simplex(rng.random(len(free)))
    a = solve_relaxed(g, z, 0, RelaxPotential(phi, 0.1))
    c = 3.0
    b = solve_relaxed(g, z, 0, RelaxPotential(c * phi, c * 0.1, check_mass=False))
    dev = np.abs(a.v_c - b.v_c).max()
    return dev <= 1e-12, f"solution change under joint scaling {dev:.2e}"


def _equivariance():
    g = square_grid(5, 5)
    z = ZealotConfig.of([12], [])
    mirror = grid_mirror_perm(5, 5, "horizontal")
    pot = RelaxPotential.uniform(g, z, epsilon=0.2)
    st = solve_relaxed(g, z, 1, pot)
    v = st.full_value(z, 1)
    dev = np.abs(v - v[mirror]).max()
    return dev <= 1e-10, f"mirror deviation of the solve {dev:.2e}"
