"""Directed weighted graphs: representation, Laplacian, generators, and edge-list I/O.

Vertices are dense integer ids 0..n-1. An arc (i, j) means vertex i averages
over (listens to) vertex j, so opinions travel against arc direction.
Undirected graphs store both arc directions with symmetric weights.

Grid generators use 1-based (col, row) coordinates with row 1 at the bottom
and id = (row - 1) * width + (col - 1), so experiment configs can name
vertices the same way the figures do.
"""
from __future__ import annotations

import heapq
import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import GraphParseError, GraphValidationError


@dataclass(frozen=True)
class VertexSet:
    """Sorted, deduplicated, nonnegative vertex ids."""

    ids: tuple[int, ...] = ()

    def __post_init__(self):
        ids = tuple(int(i) for i in self.ids)
        if any(i < 0 for i in ids):
            raise GraphValidationError(f"negative vertex id in {ids}")
        if any(b <= a for a, b in zip(ids, ids[1:])):
            ids = tuple(sorted(set(ids)))
        object.__setattr__(self, "ids", ids)

    @classmethod
    def of(cls, ids) -> "VertexSet":
        return cls(tuple(int(i) for i in ids))

    def __iter__(self):
        return iter(self.ids)

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, v) -> bool:
        return int(v) in set(self.ids)

    def __or__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet.of(set(self.ids) | set(other.ids))

    def check_range(self, n: int) -> None:
        if self.ids and self.ids[-1] >= n:
            raise GraphValidationError(
                f"vertex id {self.ids[-1]} out of range for n={n}")


@dataclass(frozen=True)
class Graph:
    """Immutable directed weighted graph with positive out-degrees.

    out_edges[i] is a tuple of (target, weight) pairs sorted by target.
    coords, when present, are per-vertex layout positions; they are carried
    for rendering only and excluded from equality.
    """

    n: int
    out_edges: tuple[tuple[tuple[int, float], ...], ...]
    directed: bool
    coords: tuple[tuple[float, float], ...] | None = field(
        default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.n <= 0:
            raise GraphValidationError(f"need at least one vertex, got n={self.n}")
        if len(self.out_edges) != self.n:
            raise GraphValidationError("out_edges length does not match n")
        seen_arcs = {}
        for i, nbrs in enumerate(self.out_edges):
            if not nbrs:
                raise GraphValidationError(f"vertex {i} has zero out-degree")
            total = 0.0
            for j, w in nbrs:
                if not 0 <= j < self.n:
                    raise GraphValidationError(f"arc ({i},{j}) target out of range")
                if j == i:
                    raise GraphValidationError(f"self-loop at vertex {i}")
                if w < 0:
                    raise GraphValidationError(f"negative weight on arc ({i},{j})")
                if (i, j) in seen_arcs:
                    raise GraphValidationError(f"duplicate arc ({i},{j})")
                seen_arcs[(i, j)] = w
                total += w
            if total <= 0:
                raise GraphValidationError(f"vertex {i} has zero out-degree weight")
        if not self.directed:
            for (i, j), w in seen_arcs.items():
                if seen_arcs.get((j, i)) != w:
                    raise GraphValidationError(
                        f"undirected graph has asymmetric arc ({i},{j})")
        if self.coords is not None and len(self.coords) != self.n:
            raise GraphValidationError("coords length does not match n")

    @classmethod
    def from_edges(cls, n, edges, directed=False, coords=None) -> "Graph":
        """Build from an iterable of (src, dst[, weight]) tuples.

        For undirected graphs each edge is listed once and both arcs are added.
        """
        adj: list[dict[int, float]] = [dict() for _ in range(n)]
        for e in edges:
            i, j, w = (int(e[0]), int(e[1]), float(e[2]) if len(e) > 2 else 1.0)
            if not (0 <= i < n and 0 <= j < n):
                raise GraphValidationError(f"edge ({i},{j}) out of range for n={n}")
            if i == j:
                raise GraphValidationError(f"self-loop at vertex {i}")
            if j in adj[i] or (not directed and i in adj[j]):
                raise GraphValidationError(f"duplicate edge ({i},{j})")
            adj[i][j] = w
            if not directed:
                adj[j][i] = w
        out = tuple(tuple(sorted(d.items())) for d in adj)
        if coords is not None:
            coords = tuple((float(x), float(y)) for x, y in coords)
        return cls(n=n, out_edges=out, directed=directed, coords=coords)

    def arcs(self):
        """Iterate over all arcs as (src, dst, weight)."""
        for i, nbrs in enumerate(self.out_edges):
            for j, w in nbrs:
                yield i, j, w

    def edge_count(self) -> int:
        """Number of arcs (directed) or undirected edges."""
        arcs = sum(len(nbrs) for nbrs in self.out_edges)
        return arcs if self.directed else arcs // 2

    def neighbors(self, i: int) -> tuple[int, ...]:
        return tuple(j for j, _ in self.out_edges[i])


def adjacency(g: Graph) -> np.ndarray:
    """Dense weighted adjacency matrix A with A[i, j] = weight of arc (i, j)."""
    A = np.zeros((g.n, g.n))
    for i, j, w in g.arcs():
        A[i, j] = w
    return A


def out_degrees(g: Graph) -> np.ndarray:
    return np.array([sum(w for _, w in nbrs) for nbrs in g.out_edges])


def laplacian(g: Graph) -> np.ndarray:
    """Out-degree Laplacian L = D - A. Rows sum to zero."""
    A = adjacency(g)
    return np.diag(A.sum(axis=1)) - A


def is_strongly_connected(g: Graph) -> bool:
    """True iff every vertex reaches every other along directed arcs.

    BFS from vertex 0 on the graph and on its reverse.
    """
    fwd = [[j for j, _ in nbrs] for nbrs in g.out_edges]
    rev: list[list[int]] = [[] for _ in range(g.n)]
    for i, js in enumerate(fwd):
        for j in js:
            rev[j].append(i)
    for adj_list in (fwd, rev):
        seen = np.zeros(g.n, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in adj_list[u]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        if not seen.all():
            return False
    return True


def graph_distances(g: Graph, sources) -> np.ndarray:
    """Unweighted hop distance from the nearest source, ignoring arc weights.

    Arcs are traversed forward; for undirected graphs this is the usual
    graph distance. Unreachable vertices get -1.
    """
    dist = np.full(g.n, -1, dtype=int)
    queue = deque()
    for s in sources:
        dist[int(s)] = 0
        queue.append(int(s))
    while queue:
        u = queue.popleft()
        for v, _ in g.out_edges[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def is_automorphism(g: Graph, perm) -> bool:
    """Check that the permutation preserves the weighted arc set."""
    perm = np.asarray(perm, dtype=int)
    if perm.shape != (g.n,) or sorted(perm.tolist()) != list(range(g.n)):
        return False
    arcset = {(i, j): w for i, j, w in g.arcs()}
    for (i, j), w in arcset.items():
        if arcset.get((int(perm[i]), int(perm[j]))) != w:
            return False
    return True


# ---------------------------------------------------------------------------
# Grid coordinate helpers (1-based (col, row), row-major ids)
# ---------------------------------------------------------------------------

def grid_id(width: int, col: int, row: int) -> int:
    """Vertex id of 1-based (col, row) on a width-wide grid."""
    if not (1 <= col <= width) or row < 1:
        raise GraphValidationError(f"grid coordinate ({col},{row}) out of range")
    return (row - 1) * width + (col - 1)


def grid_coord(width: int, vid: int) -> tuple[int, int]:
    """Inverse of grid_id: 1-based (col, row) of a vertex id."""
    return vid % width + 1, vid // width + 1


def grid_rotation_perm(width: int, height: int) -> np.ndarray:
    """Permutation for a 90-degree rotation of a square grid.

    perm[target] = source, i.e. reading values through perm applies the
    rotation to a vertex function.
    """
    if width != height:
        raise GraphValidationError("rotation requires a square grid")
    perm = np.zeros(width * height, dtype=int)
    for r in range(height):
        for c in range(width):
            # (c, r) -> (r, width-1-c), 0-based
            perm[(width - 1 - c) * width + r] = r * width + c
    return perm


def grid_mirror_perm(width: int, height: int, axis: str) -> np.ndarray:
    """Permutation mirroring a grid horizontally (flip cols) or vertically (flip rows)."""
    perm = np.zeros(width * height, dtype=int)
    for r in range(height):
        for c in range(width):
            if axis == "horizontal":
                perm[r * width + (width - 1 - c)] = r * width + c
            elif axis == "vertical":
                perm[(height - 1 - r) * width + c] = r * width + c
            else:
                raise ValueError("axis must be 'horizontal' or 'vertical'")
    return perm


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def _check_dims(*dims):
    for d in dims:
        if int(d) <= 0:
            raise GraphValidationError(f"dimension must be positive, got {d}")


def _grid_edges(width: int, height: int, offset: int = 0):
    edges = []
    for r in range(height):
        for c in range(width):
            i = offset + r * width + c
            if c + 1 < width:
                edges.append((i, i + 1))
            if r + 1 < height:
                edges.append((i, i + width))
    return edges


def _grid_coords(width: int, height: int, x0: float = 0.0):
    return [(x0 + c, float(r)) for r in range(height) for c in range(width)]


def square_grid(width: int, height: int) -> Graph:
    _check_dims(width, height)
    if width * height < 2:
        raise GraphValidationError("grid needs at least two vertices")
    return Graph.from_edges(width * height, _grid_edges(width, height),
                            directed=False, coords=_grid_coords(width, height))


def square_grid_with_defect(width: int, height: int,
                            removed_edge: tuple[tuple[int, int], tuple[int, int]]) -> Graph:
    """Square grid with one edge removed; endpoints given as 1-based (col, row)."""
    _check_dims(width, height)
    (c1, r1), (c2, r2) = removed_edge
    a, b = grid_id(width, c1, r1), grid_id(width, c2, r2)
    edges = [e for e in _grid_edges(width, height) if {a, b} != set(e)]
    if len(edges) == width * height * 2 - width - height:
        raise GraphValidationError(f"removed edge {removed_edge} is not a grid edge")
    return Graph.from_edges(width * height, edges, directed=False,
                            coords=_grid_coords(width, height))


def h_graph(width: int = 5, height: int = 10,
            bridge_row: int | None = None) -> Graph:
    """Two width x height grids side by side joined by one bridge edge.

    The bridge connects (width, bridge_row) of the left grid to
    (1, bridge_row) of the right grid.
    """
    _check_dims(width, height)
    if bridge_row is None:
        bridge_row = (height + 1) // 2
    if not 1 <= bridge_row <= height:
        raise GraphValidationError(f"bridge row {bridge_row} outside grid")
    half = width * height
    left = grid_id(width, width, bridge_row)
    right = half + grid_id(width, 1, bridge_row)
    edges = _grid_edges(width, height) + _grid_edges(width, height, half)
    edges.append((left, right))
    coords = _grid_coords(width, height) + _grid_coords(width, height, x0=float(width))
    return Graph.from_edges(2 * half, edges, directed=False, coords=coords)


def cycle(n: int, directed: bool = False) -> Graph:
    _check_dims(n)
    if n < 3:
        raise GraphValidationError("cycle needs at least 3 vertices")
    edges = [(i, (i + 1) % n) for i in range(n)]
    angles = [2 * np.pi * i / n for i in range(n)]
    coords = [(float(np.cos(a)), float(np.sin(a))) for a in angles]
    return Graph.from_edges(n, edges, directed=directed, coords=coords)


def directed_cycle(n: int) -> Graph:
    """Cycle with all arcs oriented i -> i+1: each vertex listens to its successor."""
    return cycle(n, directed=True)


def ladder(length: int) -> Graph:
    """Two parallel paths of the given length joined by rungs (a 2-row grid)."""
    _check_dims(length)
    if length < 2:
        raise GraphValidationError("ladder needs length >= 2")
    return square_grid(length, 2)


def random_geometric(n: int, radius: float, seed: int) -> Graph:
    """Uniform points in the unit square, edges between pairs within radius.

    Deterministic given seed. Raises if the sampled graph is disconnected
    rather than silently repairing it.
    """
    _check_dims(n)
    if radius <= 0:
        raise GraphValidationError(f"radius must be positive, got {radius}")
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    diff = pts[:, None, :] - pts[None, :, :]
    d2 = (diff ** 2).sum(axis=2)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)
             if d2[i, j] <= radius * radius]
    degrees = np.zeros(n, dtype=int)
    for i, j in edges:
        degrees[i] += 1
        degrees[j] += 1
    if (degrees == 0).any():
        raise GraphValidationError(
            f"radius {radius} leaves isolated vertices (seed {seed}); "
            "increase radius or pick another seed")
    g = Graph.from_edges(n, edges, directed=False,
                         coords=[(float(x), float(y)) for x, y in pts])
    if not is_strongly_connected(g):
        raise GraphValidationError(
            f"radius {radius} gives a disconnected graph (seed {seed}); "
            "increase radius or pick another seed")
    return g


def random_tree(n: int, seed: int) -> Graph:
    """Uniform random labeled tree from a random Pruefer sequence."""
    _check_dims(n)
    if n < 2:
        raise GraphValidationError("tree needs at least 2 vertices")
    if n == 2:
        edges = [(0, 1)]
    else:
        rng = np.random.default_rng(seed)
        prufer = rng.integers(0, n, size=n - 2)
        degree = np.ones(n, dtype=int)
        for v in prufer:
            degree[v] += 1
        edges = []
        leaves = [i for i in range(n) if degree[i] == 1]
        heapq.heapify(leaves)
        for v in prufer:
            leaf = heapq.heappop(leaves)
            edges.append((leaf, int(v)))
            degree[v] -= 1
            if degree[v] == 1:
                heapq.heappush(leaves, int(v))
        u, w = heapq.heappop(leaves), heapq.heappop(leaves)
        edges.append((u, w))
    return Graph.from_edges(n, edges, directed=False,
                            coords=_tree_layout(n, edges))


def _tree_layout(n: int, edges) -> list[tuple[float, float]]:
    """Simple deterministic layered layout: depth below root 0, siblings spread on x."""
    children: list[list[int]] = [[] for _ in range(n)]
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    depth = np.full(n, -1)
    depth[0] = 0
    order = [0]
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in sorted(adj[u]):
            if depth[v] < 0:
                depth[v] = depth[u] + 1
                children[u].append(v)
                order.append(v)
                queue.append(v)
    # children precede parents when walking BFS order backwards
    xs = np.zeros(n)
    next_leaf_x = 0.0
    for u in reversed(order):
        if not children[u]:
            xs[u] = next_leaf_x
            next_leaf_x += 1.0
        else:
            xs[u] = float(np.mean([xs[v] for v in children[u]]))
    return [(float(xs[i]), float(-depth[i])) for i in range(n)]


def _lattice_from_networkx(nxg) -> Graph:
    import networkx as nx

    nodes = sorted(nxg.nodes())
    index = {u: i for i, u in enumerate(nodes)}
    pos = nx.get_node_attributes(nxg, "pos")
    edges = [(index[u], index[v]) for u, v in nxg.edges()]
    coords = [tuple(map(float, pos[u])) for u in nodes] if pos else None
    return Graph.from_edges(len(nodes), edges, directed=False, coords=coords)


def hex_lattice(rows: int, cols: int) -> Graph:
    _check_dims(rows, cols)
    import networkx as nx

    return _lattice_from_networkx(nx.hexagonal_lattice_graph(rows, cols))


def tri_lattice(rows: int, cols: int) -> Graph:
    _check_dims(rows, cols)
    import networkx as nx

    return _lattice_from_networkx(nx.triangular_lattice_graph(rows, cols))


FAMILIES = (
    "square_grid", "square_grid_with_defect", "h_graph", "random_geometric",
    "tree", "ladder", "hex_lattice", "tri_lattice", "cycle", "directed_cycle",
)


def generate(family: str, **params) -> Graph:
    """Build a named graph family; random families are deterministic given seed."""
    builders = {
        "square_grid": lambda p: square_grid(int(p["width"]), int(p["height"])),
        "square_grid_with_defect": lambda p: square_grid_with_defect(
            int(p["width"]), int(p["height"]),
            (tuple(p["removed_edge"][0]), tuple(p["removed_edge"][1]))),
        "h_graph": lambda p: h_graph(int(p.get("width", 5)), int(p.get("height", 10)),
                                     p.get("bridge_row")),
        "random_geometric": lambda p: random_geometric(
            int(p["n"]), float(p.get("radius", 0.3)), int(p.get("seed", 0))),
        "tree": lambda p: random_tree(int(p["n"]), int(p.get("seed", 0))),
        "ladder": lambda p: ladder(int(p["n"])),
        "hex_lattice": lambda p: hex_lattice(int(p["rows"]), int(p["cols"])),
        "tri_lattice": lambda p: tri_lattice(int(p["rows"]), int(p["cols"])),
        "cycle": lambda p: cycle(int(p["n"])),
        "directed_cycle": lambda p: directed_cycle(int(p["n"])),
    }
    if family not in builders:
        raise GraphValidationError(
            f"unknown graph family {family!r}; known: {', '.join(FAMILIES)}")
    try:
        return builders[family](params)
    except KeyError as exc:
        raise GraphValidationError(f"family {family!r} missing parameter {exc}") from None


# ---------------------------------------------------------------------------
# Edge-list I/O
# ---------------------------------------------------------------------------

def write_graph(g: Graph) -> str:
    """Edge-list text: header 'n <count> directed|undirected', one arc/edge per line.

    Undirected graphs list each edge once with src < dst.
    """
    lines = [f"n {g.n} {'directed' if g.directed else 'undirected'}"]
    for i, j, w in g.arcs():
        if not g.directed and j < i:
            continue
        if w == 1.0:
            lines.append(f"{i} {j}")
        else:
            lines.append(f"{i} {j} {w!r}")
    return "\n".join(lines) + "\n"


def read_graph(data: str | bytes) -> Graph:
    """Parse the edge-list format; reports offending line numbers."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    lines = data.splitlines()
    if not lines:
        raise GraphParseError("empty input")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "n" or head[2] not in ("directed", "undirected"):
        raise GraphParseError("expected header 'n <count> directed|undirected'", line=1)
    try:
        n = int(head[1])
    except ValueError:
        raise GraphParseError(f"bad vertex count {head[1]!r}", line=1) from None
    directed = head[2] == "directed"
    edges = []
    for lineno, raw in enumerate(lines[1:], start=2):
        text = raw.split("#")[0].strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) not in (2, 3):
            raise GraphParseError(f"expected 'src dst [weight]', got {raw!r}", line=lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise GraphParseError(f"could not parse {raw!r}", line=lineno) from None
        if not (0 <= i < n and 0 <= j < n):
            raise GraphParseError(f"vertex out of range in {raw!r}", line=lineno)
        if i == j:
            raise GraphParseError(f"self-loop at vertex {i}", line=lineno)
        if w < 0:
            raise GraphParseError(f"negative weight in {raw!r}", line=lineno)
        edges.append((i, j, w))
    try:
        return Graph.from_edges(n, edges, directed=directed)
    except GraphValidationError as exc:
        raise GraphParseError(str(exc)) from exc


def graph_to_json(g: Graph) -> dict:
    """JSON mirror of the edge-list schema, plus layout coords when available."""
    obj = {
        "n": g.n,
        "directed": g.directed,
        "edges": [[i, j, w] for i, j, w in g.arcs()
                  if g.directed or i < j],
    }
    if g.coords is not None:
        obj["coords"] = [[x, y] for x, y in g.coords]
    return obj


def graph_from_json(obj: dict) -> Graph:
    try:
        return Graph.from_edges(int(obj["n"]), obj["edges"],
                                directed=bool(obj["directed"]),
                                coords=obj.get("coords"))
    except (KeyError, TypeError) as exc:
        raise GraphParseError(f"bad graph JSON: {exc}") from exc


def graph_json_str(g: Graph) -> str:
    return json.dumps(graph_to_json(g), sort_keys=True)
