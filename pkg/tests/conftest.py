import numpy as np
import pytest

from influnet import Graph, ZealotConfig, generate
from influnet.properties import random_connected_graph, random_digraph, random_zealots

__all__ = ["random_digraph", "random_connected_graph", "random_zealots"]


@pytest.fixture(scope="session")
def path3() -> Graph:
    return generate("square_grid", width=3, height=1)


@pytest.fixture(scope="session")
def path4() -> Graph:
    return generate("square_grid", width=4, height=1)


@pytest.fixture(scope="session")
def grid11() -> Graph:
    return generate("square_grid", width=11, height=11)


@pytest.fixture(scope="session")
def k4_apex() -> Graph:
    """Complete graph on vertices 0..3 plus an apex vertex 4 joined to all of them."""
    edges = [(i, j) for i in range(4) for j in range(i + 1, 4)] + [(i, 4) for i in range(4)]
    return Graph.from_edges(5, edges)


@pytest.fixture(scope="session")
def star7() -> Graph:
    """Center 0 with leaves 1..6."""
    return Graph.from_edges(7, [(0, i) for i in range(1, 7)])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def two_singletons(a: int, b: int) -> ZealotConfig:
    return ZealotConfig.of([a], [b])
