import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from influnet import (
    Graph,
    GraphValidationError,
    NotStronglyConnectedError,
    OpinionField,
    ScalarOpinion,
    StabilityError,
    VertexSet,
    WalkCapError,
    ZealotConfig,
    dirichlet_energy,
    generate,
    influence,
    mc_hitting_probability,
    simulate_dynamics,
    solve_grouped,
    solve_harmonic,
)

from conftest import random_connected_graph, random_digraph, random_zealots


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

def test_zealot_config_invariants():
    with pytest.raises(GraphValidationError):
        ZealotConfig.of([0, 1], [1, 2])       # overlap
    with pytest.raises(GraphValidationError):
        ZealotConfig.of([], [])               # empty union
    with pytest.raises(GraphValidationError):
        ZealotConfig(sets=(VertexSet.of([0]),))  # single class
    z = ZealotConfig.of([3, 1], [2])
    assert z.k == 2 and z.union.ids == (1, 2, 3)
    assert z.opponents(0).ids == (2,)


def test_opinion_field_validation():
    with pytest.raises(GraphValidationError):
        OpinionField(np.array([[0.6, 0.6], [0.5, 0.5]]))   # row sum 1.2
    with pytest.raises(GraphValidationError):
        OpinionField(np.array([[-0.1, 1.1]]))
    f = OpinionField(np.array([[0.25, 0.75]]))
    assert not f.values.flags.writeable


def test_scalar_opinion_validation():
    with pytest.raises(GraphValidationError):
        ScalarOpinion(np.array([1.5]))
    assert ScalarOpinion(np.array([0.0, 1.0])).n == 2


# ---------------------------------------------------------------------------
# Harmonic solve
# ---------------------------------------------------------------------------

def test_path3_midpoint(path3):
    u = solve_harmonic(path3, ZealotConfig.of([0], [2]))
    assert u.values[1] == pytest.approx([0.5, 0.5], abs=1e-12)


def test_k4_apex_value(k4_apex):
    u = solve_harmonic(k4_apex, ZealotConfig.of([0, 1, 2], [4]))
    assert abs(u.values[3, 0] - 0.75) <= 1e-10
    assert abs(u.values[3, 1] - 0.25) <= 1e-10


def gambler_ruin_path(length: int) -> np.ndarray:
    # independent oracle: on a path 0..L with u(0)=1, u(L)=0 the harmonic
    # interpolation is linear in the index
    return np.array([(length - i) / length for i in range(length + 1)])


def test_path4_matches_gambler_ruin(path4):
    u = solve_harmonic(path4, ZealotConfig.of([0], [3]))
    assert np.abs(u.column(0) - gambler_ruin_path(3)).max() <= 1e-12


def test_requires_strong_connectivity():
    g = Graph.from_edges(4, [(0, 1), (1, 0), (2, 3), (3, 2)], directed=True)
    with pytest.raises(NotStronglyConnectedError):
        solve_harmonic(g, ZealotConfig.of([0], [1]))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10 ** 6), n=st.integers(4, 20), k=st.integers(2, 4))
def test_simplex_invariance_random_digraphs(seed, n, k):
    g = random_digraph(n, seed)
    z = random_zealots(g, seed + 1, k=min(k, n - 1))
    u = solve_harmonic(g, z)
    assert np.abs(u.values.sum(axis=1) - 1).max() <= 1e-9
    assert u.values.min() >= -1e-12 and u.values.max() <= 1 + 1e-12


def test_permutation_equivariance():
    g = random_digraph(11, 3)
    rng = np.random.default_rng(9)
    perm = rng.permutation(g.n)
    relabeled = Graph.from_edges(
        g.n, [(int(perm[i]), int(perm[j]), w) for i, j, w in g.arcs()], directed=True)
    z = random_zealots(g, 5, k=3)
    z2 = ZealotConfig.of(*[[int(perm[v]) for v in s] for s in z.sets])
    u1 = solve_harmonic(g, z).values
    u2 = solve_harmonic(relabeled, z2).values
    assert np.abs(u2[perm] - u1).max() <= 1e-12


# ---------------------------------------------------------------------------
# Grouped solve
# ---------------------------------------------------------------------------

def test_grouped_matches_harmonic_columns():
    for seed in range(5):
        g = random_digraph(12, seed)
        z = random_zealots(g, seed + 10, k=3)
        u = solve_harmonic(g, z)
        for m in range(z.k):
            v = solve_grouped(g, z, m)
            assert np.abs(u.column(m) - v.values).max() <= 1e-9


def test_grouped_with_target_pins_to_one(path4):
    v = solve_grouped(path4, ZealotConfig.of([0], [3]), 0, extra=VertexSet.of([2]))
    assert v.values.tolist() == [1.0, 1.0, 1.0, 0.0]


def test_grouped_maximum_principle(grid11):
    center, corner = 60, 0
    v = solve_grouped(grid11, ZealotConfig.of([center], [corner]), 0)
    free = [i for i in range(121) if i not in (center, corner)]
    assert (v.values[free] > 0).all() and (v.values[free] < 1).all()


def test_grouped_rejects_overlapping_target(path4):
    with pytest.raises(GraphValidationError):
        solve_grouped(path4, ZealotConfig.of([0], [3]), 0, extra=VertexSet.of([3]))


def test_grouped_all_zealots_same_side(path3):
    # no opposing zealots: the field is identically 1 (nonsingular, not an error)
    v = solve_grouped(path3, ZealotConfig.of([0], []), 0)
    assert v.values.tolist() == [1.0, 1.0, 1.0]


# ---------------------------------------------------------------------------
# Influence
# ---------------------------------------------------------------------------

def test_influence_uniform_rows():
    u = OpinionField(np.full((6, 3), 1 / 3))
    for m in range(3):
        assert influence(u, m) == pytest.approx(1 / 3, abs=1e-15)


def test_influence_path3(path3):
    u = solve_harmonic(path3, ZealotConfig.of([0], [2]))
    assert influence(u, 0) == pytest.approx(0.5, abs=1e-12)


def test_influence_k4(k4_apex):
    u = solve_harmonic(k4_apex, ZealotConfig.of([0, 1, 2], [4]))
    assert influence(u, 0) == pytest.approx(0.75, abs=1e-10)


def test_influences_sum_to_one():
    g = random_digraph(10, 2)
    z = random_zealots(g, 3, k=4)
    u = solve_harmonic(g, z)
    assert sum(influence(u, m) for m in range(4)) == pytest.approx(1.0, abs=1e-9)


# ---------------------------------------------------------------------------
# Dirichlet energy
# ---------------------------------------------------------------------------

def edge_difference_energy(g, values) -> float:
    # independent oracle: half the weighted squared differences over edges
    total = 0.0
    for i, j, w in g.arcs():
        if i < j:
            total += w * float(((values[i] - values[j]) ** 2).sum())
    return 0.5 * total


def test_energy_constant_field_zero(path3):
    u = OpinionField(np.full((3, 2), 0.5))
    assert dirichlet_energy(path3, u) == 0.0


def test_energy_path3_half(path3):
    u = np.array([[1.0, 0.0], [0.5, 0.5], [0.0, 1.0]])
    assert dirichlet_energy(path3, u) == pytest.approx(0.5, abs=1e-15)
    assert dirichlet_energy(path3, u) == pytest.approx(
        edge_difference_energy(path3, u), abs=1e-12)


def test_energy_matches_edge_oracle_random():
    g = random_connected_graph(12, 8)
    rng = np.random.default_rng(0)
    vals = rng.random((12, 2))
    vals /= vals.sum(axis=1, keepdims=True)
    assert dirichlet_energy(g, vals) == pytest.approx(
        edge_difference_energy(g, vals), rel=1e-12)


def test_energy_rejects_directed():
    with pytest.raises(GraphValidationError):
        dirichlet_energy(generate("directed_cycle", n=4), np.zeros((4, 1)))


def test_harmonic_minimizes_energy(path3):
    z = ZealotConfig.of([0], [2])
    u = solve_harmonic(path3, z)
    base = dirichlet_energy(path3, u)
    for bump in (0.1, -0.1):
        vals = np.array(u.values)
        vals[1, 0] += bump
        vals[1, 1] -= bump
        assert dirichlet_energy(path3, vals) > base


def test_harmonic_minimal_over_random_perturbations():
    g = random_connected_graph(14, 4)
    z = random_zealots(g, 6)
    u = solve_harmonic(g, z)
    base = dirichlet_energy(g, u)
    rng = np.random.default_rng(7)
    free = [i for i in range(g.n) if i not in z.union]
    for _ in range(50):
        vals = np.array(u.values)
        delta = rng.uniform(-0.05, 0.05, size=len(free))
        vals[free, 0] = np.clip(vals[free, 0] + delta, 0, 1)
        vals[free, 1] = 1 - vals[free, 0]
        assert dirichlet_energy(g, vals) >= base - 1e-12


# ---------------------------------------------------------------------------
# Dynamics
# ---------------------------------------------------------------------------

def test_dynamics_fixed_point(path3):
    z = ZealotConfig.of([0], [2])
    u = solve_harmonic(path3, z)
    out = simulate_dynamics(path3, z, u, dt=0.4, steps=200)
    assert np.abs(out.values - u.values).max() <= 1e-12


def test_dynamics_converges_to_harmonic(path3):
    z = ZealotConfig.of([0], [2])
    u0 = OpinionField(np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    out = simulate_dynamics(path3, z, u0, dt=0.4, steps=400)
    assert out.values[1] == pytest.approx([0.5, 0.5], abs=1e-10)


def test_dynamics_keeps_rows_on_simplex():
    g = generate("random_geometric", n=25, radius=0.4, seed=5)
    z = ZealotConfig.of([0], [1])
    vals = np.full((25, 2), 0.5)
    vals[0] = [1, 0]
    vals[1] = [0, 1]
    out = simulate_dynamics(g, z, OpinionField(vals), dt=0.05, steps=10_000)
    assert np.abs(out.values.sum(axis=1) - 1).max() <= 1e-9


def test_dynamics_rejects_unstable_dt(path3):
    z = ZealotConfig.of([0], [2])
    u = solve_harmonic(path3, z)
    with pytest.raises(StabilityError):
        simulate_dynamics(path3, z, u, dt=0.51, steps=1)  # max degree 2


def test_dynamics_rejects_wrong_boundary(path3):
    z = ZealotConfig.of([0], [2])
    bad = OpinionField(np.full((3, 2), 0.5))
    with pytest.raises(GraphValidationError):
        simulate_dynamics(path3, z, bad, dt=0.4, steps=1)


# ---------------------------------------------------------------------------
# Monte-Carlo oracle
# ---------------------------------------------------------------------------

def test_mc_at_zealots_is_exact(path4):
    z = ZealotConfig.of([0], [3])
    assert mc_hitting_probability(path4, z, 0, 0, walks=10, seed=0) == (1.0, 0.0)
    assert mc_hitting_probability(path4, z, 0, 3, walks=10, seed=0) == (0.0, 0.0)


def test_mc_matches_solver_on_path(path4):
    z = ZealotConfig.of([0], [3])
    est = mc_hitting_probability(path4, z, 0, 1, walks=100_000, seed=42)
    assert abs(est.probability - 2 / 3) <= 3 * est.std_error
    assert est.std_error == pytest.approx(
        np.sqrt(est.probability * (1 - est.probability) / 100_000))


def test_mc_matches_solver_on_weighted_digraph():
    g = Graph.from_edges(4, [(0, 1, 2.0), (0, 2, 1.0), (1, 0, 1.0), (1, 3, 1.0),
                             (2, 3, 1.0), (3, 0, 1.0), (2, 0, 3.0)], directed=True)
    z = ZealotConfig.of([3], [2])
    v = solve_grouped(g, z, 0)
    for vertex in (0, 1):
        est = mc_hitting_probability(g, z, 0, vertex, walks=60_000, seed=vertex)
        assert abs(est.probability - v.values[vertex]) <= 3 * max(est.std_error, 1e-9)


def test_mc_step_cap_raises():
    g = generate("cycle", n=60)
    z = ZealotConfig.of([0], [1])
    with pytest.raises(WalkCapError):
        mc_hitting_probability(g, z, 0, 30, walks=50, seed=1, step_cap=3)


def test_mc_deterministic_given_seed(path4):
    z = ZealotConfig.of([0], [3])
    a = mc_hitting_probability(path4, z, 0, 2, walks=5000, seed=7)
    b = mc_hitting_probability(path4, z, 0, 2, walks=5000, seed=7)
    assert a == b
