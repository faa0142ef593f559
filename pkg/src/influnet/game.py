"""Turn-based two-authority conversion game.

Players alternate converting one free vertex each to their zealot set; the
score is the pair of influence shares of the two sides' steady-state
opinions. States are immutable values; every mutation returns a new state.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    GameOverError,
    GraphValidationError,
    IllegalMoveError,
    OutOfTurnError,
)
from .graphs import Graph, VertexSet, is_strongly_connected
from .harmonic import ZealotConfig, influence, solve_grouped
from .relaxation import DEFAULT_EPSILON, relaxed_select
from .targeting import TargetingProblem, greedy

logger = logging.getLogger(__name__)

BRUTE_FREE_LIMIT = 60
STRATEGIES = ("human", "random", "greedy", "relaxation", "brute_small")


@dataclass(frozen=True)
class Player:
    """Strategy tag plus the knobs that make automatic play reproducible."""

    strategy: str
    seed: int | None = None
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise GraphValidationError(
                f"unknown strategy {self.strategy!r}; known: {', '.join(STRATEGIES)}")

    @property
    def is_ai(self) -> bool:
        return self.strategy != "human"


@dataclass(frozen=True)
class GameState:
    """Immutable game position; history replays to the current state."""

    graph: Graph
    zealots: tuple[VertexSet, VertexSet]
    turn: int                                  # 1 or 2
    history: tuple[tuple[int, int], ...]       # (player, vertex)
    rounds_per_player: int | None = 3
    shares: tuple[float, float] | None = None

    def __post_init__(self):
        z1, z2 = self.zealots
        if set(z1.ids) & set(z2.ids):
            raise GraphValidationError("the two zealot sets overlap")
        for z in self.zealots:
            z.check_range(self.graph.n)
        if self.turn not in (1, 2):
            raise GraphValidationError(f"turn must be 1 or 2, got {self.turn}")

    def zealot_config(self) -> ZealotConfig:
        return ZealotConfig.of(self.zealots[0].ids, self.zealots[1].ids)


def new_game(g: Graph, first_moves=None, rounds_per_player: int | None = 3) -> GameState:
    """Fresh game on a strongly connected graph, optionally pre-playing moves.

    first_moves is an ordered list of (player, vertex) applied under the
    normal turn rules, so seeds must alternate starting with player 1.
    """
    if not is_strongly_connected(g):
        raise GraphValidationError("game requires a strongly connected graph")
    if rounds_per_player is not None and rounds_per_player < 1:
        raise GraphValidationError("rounds_per_player must be >= 1 or None")
    state = GameState(graph=g, zealots=(VertexSet(), VertexSet()), turn=1,
                      history=(), rounds_per_player=rounds_per_player)
    for player, vertex in (first_moves or ()):
        state = apply_move(state, int(player), int(vertex))
    return state


def legal_moves(s: GameState) -> VertexSet:
    taken = set(s.zealots[0].ids) | set(s.zealots[1].ids)
    return VertexSet.of(i for i in range(s.graph.n) if i not in taken)


def is_over(s: GameState) -> bool:
    if not legal_moves(s):
        return True
    if s.rounds_per_player is None:
        return False
    return len(s.history) >= 2 * s.rounds_per_player


def score(s: GameState) -> tuple[float, float] | None:
    """Current influence shares (player 1, player 2); None until both sides own a vertex.

    Computed with a single grouped solve for player 1; the complement is
    player 2's share because total influence is 1.
    """
    if not s.zealots[0] or not s.zealots[1]:
        return None
    v = solve_grouped(s.graph, s.zealot_config(), 0)
    i1 = influence(v)
    return (i1, 1.0 - i1)


def apply_move(s: GameState, player: int, vertex: int) -> GameState:
    """Convert a free vertex to the moving player's side and recompute shares."""
    if is_over(s):
        raise GameOverError("the game has ended")
    if player != s.turn:
        raise OutOfTurnError(f"it is player {s.turn}'s turn, not player {player}'s")
    vertex = int(vertex)
    if not 0 <= vertex < s.graph.n:
        raise IllegalMoveError(f"vertex {vertex} out of range")
    if vertex not in legal_moves(s):
        raise IllegalMoveError(f"vertex {vertex} is already converted")
    zs = list(s.zealots)
    zs[player - 1] = VertexSet.of(set(zs[player - 1].ids) | {vertex})
    nxt = replace(s, zealots=(zs[0], zs[1]), turn=3 - player,
                  history=s.history + ((player, vertex),), shares=None)
    return replace(nxt, shares=score(nxt))


def replay(g: Graph, history, rounds_per_player: int | None = 3) -> GameState:
    return new_game(g, first_moves=history, rounds_per_player=rounds_per_player)


def _opening_move(s: GameState, player: Player) -> int:
    # every placement yields full influence while the board is empty, so the
    # argmax degenerates to the tie-break rule
    legal = list(legal_moves(s))
    if player.seed is not None:
        rng = np.random.default_rng((player.seed, len(s.history)))
        return int(rng.choice(legal))
    return legal[0]


def _minimax_move(s: GameState, me: int) -> int:
    """Exact 2-ply lookahead: pick the move whose worst-case reply leaves the
    largest own share."""
    legal = list(legal_moves(s))
    best_move, best_val = None, -np.inf
    for a in legal:
        mid = apply_move(s, me, a)
        if is_over(mid) or not legal_moves(mid):
            val = mid.shares[me - 1] if mid.shares else 1.0
        else:
            opp = 3 - me
            val = min(apply_move(mid, opp, b).shares[me - 1]
                      for b in legal_moves(mid))
        if val > best_val:
            best_val, best_move = val, a
    return int(best_move)


def ai_move(s: GameState, player: Player) -> int:
    """Choose the moving side's vertex according to the player's strategy.

    greedy equals single-step exact marginal maximization; relaxation takes
    the first pick of the relaxation-and-round heuristic; brute_small plays
    2-ply minimax up to BRUTE_FREE_LIMIT free vertices and falls back to
    greedy beyond that.
    """
    if not player.is_ai:
        raise GraphValidationError("ai_move called for a human player")
    if is_over(s):
        raise GameOverError("the game has ended")
    legal = list(legal_moves(s))
    if not legal:
        raise IllegalMoveError("no legal moves left")

    if player.strategy == "random":
        rng = np.random.default_rng(
            (player.seed if player.seed is not None else 0, len(s.history)))
        return int(rng.choice(legal))

    me = s.turn
    if player.strategy == "brute_small" and len(legal) <= BRUTE_FREE_LIMIT:
        # well-defined even on an empty board: lookahead places the opponent
        return _minimax_move(s, me)

    if not s.zealots[0] and not s.zealots[1]:
        return _opening_move(s, player)

    if player.strategy == "brute_small":
        logger.info("brute_small: %d free vertices exceed the limit %d; "
                    "falling back to greedy", len(legal), BRUTE_FREE_LIMIT)

    sets = [s.zealots[0].ids, s.zealots[1].ids]
    problem = TargetingProblem(s.graph, ZealotConfig.of(*sets), me - 1, budget=1)
    if player.strategy == "relaxation":
        sol = relaxed_select(problem, epsilon=player.epsilon)
    else:
        sol = greedy(problem)
    return sol.chosen.ids[0]
