"""Session-oriented HTTP/JSON API for the conversion game.

Each session owns an immutable graph and a GameState guarded by its own
lock, so mutations within a session are totally ordered while distinct
sessions proceed in parallel. Sessions expire after an idle TTL; optional
JSON snapshots let a restarted server replay them.
"""
from __future__ import annotations

import json
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import game as game_mod
from .errors import GameOverError, IllegalMoveError, InfluNetError, OutOfTurnError
from .experiments import influence_map, phi_map
from .graphs import generate, graph_from_json, graph_to_json
from .harmonic import solve_grouped

_AI_POOL = ThreadPoolExecutor(max_workers=4)


class PlayerSpec(BaseModel):
    strategy: str = "human"
    seed: int | None = None
    epsilon: float = 0.15


class SessionRequest(BaseModel):
    family: str
    params: dict = Field(default_factory=dict)
    players: list[PlayerSpec] = Field(default_factory=lambda: [PlayerSpec(), PlayerSpec()])
    rounds: int | None = 3
    first_moves: list[tuple[int, int]] | None = None


class MoveRequest(BaseModel):
    vertex: int | None = None


@dataclass
class Session:
    id: str
    graph_id: str
    graph: object
    players: tuple[game_mod.Player, game_mod.Player]
    state: game_mod.GameState
    family: str
    params: dict
    created: float = field(default_factory=time.time)
    last_active: float = field(default_factory=time.time)
    lock: threading.Lock = field(default_factory=threading.Lock)
    ai_fallback: bool = False

    def touch(self):
        self.last_active = time.time()


def _state_json(sess: Session) -> dict:
    s = sess.state
    both = bool(s.zealots[0]) and bool(s.zealots[1])
    field_vals = None
    if both:
        v = solve_grouped(s.graph, s.zealot_config(), 0)
        field_vals = [float(x) for x in v.values]
    return {
        "id": sess.id,
        "graph_id": sess.graph_id,
        "turn": s.turn,
        "over": game_mod.is_over(s),
        "zealots": {"1": list(s.zealots[0].ids), "2": list(s.zealots[1].ids)},
        "history": [[p, v] for p, v in s.history],
        "shares": list(s.shares) if s.shares else None,
        "field": field_vals,
        "legal_moves": list(game_mod.legal_moves(s).ids),
        "players": [{"strategy": p.strategy, "seed": p.seed, "epsilon": p.epsilon}
                    for p in sess.players],
        "rounds_per_player": s.rounds_per_player,
        "ai_fallback": sess.ai_fallback,
    }


def create_app(session_ttl: float = 3600.0, ai_budget_ms: int = 15000,
               snapshot_dir: Path | None = None,
               static_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="influnet game service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"])

    sessions: dict[str, Session] = {}
    graphs: dict[str, object] = {}
    registry_lock = threading.Lock()

    def _expire_locked():
        cutoff = time.time() - session_ttl
        for sid in [sid for sid, s in sessions.items() if s.last_active < cutoff]:
            graphs.pop(sessions[sid].graph_id, None)
            del sessions[sid]

    def _get(sid: str) -> Session:
        with registry_lock:
            _expire_locked()
            sess = sessions.get(sid)
        if sess is None:
            raise HTTPException(404, f"unknown session {sid}")
        return sess

    def _snapshot(sess: Session):
        if snapshot_dir is None:
            return
        snapshot_dir.mkdir(parents=True, exist_ok=True)
        payload = {
            "id": sess.id,
            "graph_id": sess.graph_id,
            "graph": graph_to_json(sess.graph),
            "family": sess.family,
            "params": sess.params,
            "players": [{"strategy": p.strategy, "seed": p.seed, "epsilon": p.epsilon}
                        for p in sess.players],
            "history": [[p, v] for p, v in sess.state.history],
            "rounds_per_player": sess.state.rounds_per_player,
        }
        (snapshot_dir / f"{sess.id}.json").write_text(json.dumps(payload, sort_keys=True))

    def _load_snapshots():
        if snapshot_dir is None or not snapshot_dir.exists():
            return
        for path in sorted(snapshot_dir.glob("*.json")):
            try:
                obj = json.loads(path.read_text())
                g = graph_from_json(obj["graph"])
                players = tuple(game_mod.Player(p["strategy"], p.get("seed"),
                                                p.get("epsilon", 0.15))
                                for p in obj["players"])
                state = game_mod.replay(g, [tuple(m) for m in obj["history"]],
                                        obj.get("rounds_per_player"))
                sess = Session(id=obj["id"], graph_id=obj["graph_id"], graph=g,
                               players=players, state=state,
                               family=obj.get("family", ""), params=obj.get("params", {}))
                with registry_lock:
                    sessions[sess.id] = sess
                    graphs[sess.graph_id] = g
            except (InfluNetError, KeyError, ValueError, json.JSONDecodeError):
                continue  # a bad snapshot never blocks startup

    def _ai_reply(sess: Session) -> int:
        """Compute the mover's AI choice within the time budget, else fall back to greedy."""
        player = sess.players[sess.state.turn - 1]
        future = _AI_POOL.submit(game_mod.ai_move, sess.state, player)
        try:
            vertex = future.result(timeout=ai_budget_ms / 1000.0)
            sess.ai_fallback = False
        except FutureTimeout:
            future.cancel()
            vertex = game_mod.ai_move(sess.state, game_mod.Player("greedy"))
            sess.ai_fallback = True
        return vertex

    _load_snapshots()

    @app.post("/sessions", status_code=201)
    def create_session(req: SessionRequest):
        if len(req.players) != 2:
            raise HTTPException(400, "exactly two players required")
        try:
            g = generate(req.family, **req.params)
            players = tuple(game_mod.Player(p.strategy, p.seed, p.epsilon)
                            for p in req.players)
            state = game_mod.new_game(g, first_moves=req.first_moves,
                                      rounds_per_player=req.rounds)
        except InfluNetError as exc:
            raise HTTPException(400, str(exc)) from exc
        sid = uuid.uuid4().hex[:12]
        sess = Session(id=sid, graph_id=f"g-{sid}", graph=g, players=players,
                       state=state, family=req.family, params=req.params)
        with registry_lock:
            _expire_locked()
            sessions[sid] = sess
            graphs[sess.graph_id] = g
        _snapshot(sess)
        return _state_json(sess)

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        sess = _get(sid)
        with sess.lock:
            sess.touch()
            return _state_json(sess)

    @app.post("/sessions/{sid}/moves")
    def post_move(sid: str, req: MoveRequest):
        sess = _get(sid)
        with sess.lock:
            sess.touch()
            state = sess.state
            mover = sess.players[state.turn - 1]
            ai_moves = []
            try:
                if req.vertex is not None:
                    if mover.is_ai:
                        raise OutOfTurnError(
                            f"player {state.turn} is controlled by the {mover.strategy} AI")
                    state = game_mod.apply_move(state, state.turn, req.vertex)
                    sess.state = state
                    while (not game_mod.is_over(state)
                           and sess.players[state.turn - 1].is_ai):
                        v = _ai_reply(sess)
                        state = game_mod.apply_move(state, state.turn, v)
                        sess.state = state
                        ai_moves.append([state.history[-1][0], v])
                else:
                    if not mover.is_ai:
                        raise OutOfTurnError(f"player {state.turn} is human; a vertex is required")
                    v = _ai_reply(sess)
                    state = game_mod.apply_move(state, state.turn, v)
                    sess.state = state
                    ai_moves.append([state.history[-1][0], v])
            except (OutOfTurnError, GameOverError) as exc:
                raise HTTPException(409, str(exc)) from exc
            except IllegalMoveError as exc:
                raise HTTPException(422, str(exc)) from exc
            _snapshot(sess)
            out = _state_json(sess)
            out["ai_moves"] = ai_moves
            return out

    @app.get("/sessions/{sid}/hints")
    def get_hints(sid: str, strategy: str = "greedy", eps: float = 0.15):
        sess = _get(sid)
        with sess.lock:
            sess.touch()
            state = sess.state
            if game_mod.is_over(state):
                raise HTTPException(409, "the game has ended")
            m = state.turn - 1
            z = state.zealot_config() if (state.zealots[0] or state.zealots[1]) else None
            if z is None:
                raise HTTPException(409, "hints need at least one converted vertex")
            try:
                if strategy == "greedy":
                    res = influence_map(state.graph, z, m)
                elif strategy == "relaxation":
                    res = phi_map(state.graph, z, m, epsilon=eps)
                else:
                    raise HTTPException(422, f"unknown hint strategy {strategy!r}")
            except InfluNetError as exc:
                raise HTTPException(409, str(exc)) from exc
            return {
                "strategy": strategy,
                "epsilon": eps if strategy == "relaxation" else None,
                "values": {str(i): v for i, v in sorted(res.values.items())},
                "raw": {str(i): v for i, v in sorted(res.raw.items())},
                "argmax": res.argmax,
                "degenerate": res.degenerate,
            }

    @app.get("/graphs/{gid}")
    def get_graph(gid: str):
        with registry_lock:
            _expire_locked()
            g = graphs.get(gid)
        if g is None:
            raise HTTPException(404, f"unknown graph {gid}")
        return graph_to_json(g)

    if static_dir is not None and Path(static_dir).exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
