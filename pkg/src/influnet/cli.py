"""Command-line entry points.

Verbs: energy-map, phi-map, match, greedy, relax-select, props, serve.
Experiment verbs accept either a JSON spec file (--spec) or the individual
flags; flag values override the file.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import InfluNetError
from .experiments import (
    ExperimentSpec,
    run_energy_map,
    run_match,
    run_phi_map,
    run_property_suite,
    summarize,
)
from .relaxation import relaxed_select
from .targeting import TargetingProblem, greedy


def _add_spec_flags(sub):
    sub.add_argument("--spec", type=Path, help="JSON file with the experiment spec")
    sub.add_argument("--graph", dest="family", help="graph family name")
    sub.add_argument("--params", help="JSON object of family parameters")
    sub.add_argument("--zealots", help="JSON list of vertex-id lists, one per opinion")
    sub.add_argument("--m", dest="authority", type=int, help="authority opinion index (0-based)")
    sub.add_argument("--eps", help="epsilon or comma-separated list")
    sub.add_argument("--budget", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--rounds", type=int)
    sub.add_argument("--strategies", help="JSON list of two player configs (match)")
    sub.add_argument("--out", help="output path stem")


def _build_spec(args) -> ExperimentSpec:
    obj = {}
    if args.spec:
        obj = json.loads(Path(args.spec).read_text())
    if args.family:
        obj["family"] = args.family
    if args.params:
        obj["params"] = json.loads(args.params)
    if args.zealots:
        obj["zealots"] = json.loads(args.zealots)
    if args.authority is not None:
        obj["authority"] = args.authority
    if args.eps:
        parts = [float(x) for x in str(args.eps).split(",")]
        obj["epsilon"] = parts[0] if len(parts) == 1 else parts
    if args.budget is not None:
        obj["budget"] = args.budget
    if args.seed is not None:
        obj["seed"] = args.seed
    if args.rounds is not None:
        obj["rounds"] = args.rounds
    if args.strategies:
        obj["strategies"] = json.loads(args.strategies)
    if args.out:
        obj["out"] = args.out
    if "family" not in obj:
        raise InfluNetError("a graph family is required (--graph or --spec)")
    return ExperimentSpec.from_json(obj)


def _cmd_energy_map(args) -> int:
    spec = _build_spec(args)
    res = run_energy_map(spec)
    print(json.dumps({"argmax": res.argmax, "degenerate": res.degenerate,
                      "spec_sha256": res.spec_hash}, sort_keys=True))
    return 0


def _cmd_phi_map(args) -> int:
    spec = _build_spec(args)
    results = run_phi_map(spec)
    for res in results:
        print(json.dumps({"epsilon": res.epsilon, "argmax": res.argmax,
                          "symmetry_deviation": res.symmetry,
                          "spec_sha256": res.spec_hash}, sort_keys=True))
    return 0


def _cmd_match(args) -> int:
    spec = _build_spec(args)
    transcript = run_match(spec)
    print(json.dumps(transcript, sort_keys=True))
    return 0


def _solution_cmd(args, select_fn) -> int:
    spec = _build_spec(args)
    problem = TargetingProblem(spec.build_graph(), spec.zealot_config(),
                               spec.authority, spec.budget)
    sol = select_fn(problem, spec)
    payload = sol.to_json()
    payload["spec_sha256"] = spec.digest()
    text = json.dumps(payload, sort_keys=True)
    if spec.out:
        Path(spec.out).write_text(text + "\n")
    print(text)
    return 0


def _cmd_greedy(args) -> int:
    return _solution_cmd(args, lambda p, spec: greedy(p))


def _cmd_relax_select(args) -> int:
    return _solution_cmd(args, lambda p, spec: relaxed_select(p, epsilon=spec.epsilons()[0]))


def _cmd_props(args) -> int:
    results = run_property_suite(seed=args.seed or 0, corrupt=args.corrupt)
    print(summarize(results))
    return 0 if all(r.passed for r in results) else 1


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(session_ttl=args.session_ttl, ai_budget_ms=args.ai_budget_ms,
                     snapshot_dir=args.snapshot_dir, static_dir=args.static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="influnet",
        description="Influence targeting on networks: heatmaps, optimizers, and the conversion game")
    subs = parser.add_subparsers(dest="command", required=True)

    for name, fn, doc in [
        ("energy-map", _cmd_energy_map, "exact single-placement influence heatmap"),
        ("phi-map", _cmd_phi_map, "relaxed-optimum weight heatmap"),
        ("match", _cmd_match, "play one automatic match and print the transcript"),
        ("greedy", _cmd_greedy, "greedy placement for a budget"),
        ("relax-select", _cmd_relax_select, "relaxation-guided placement for a budget"),
    ]:
        sub = subs.add_parser(name, help=doc)
        _add_spec_flags(sub)
        sub.set_defaults(fn=fn)

    props = subs.add_parser("props", help="run the invariant property suite")
    props.add_argument("--seed", type=int, default=0)
    props.add_argument("--corrupt", choices=["gradient"],
                       help="self-test hook: corrupt a check to prove it fails")
    props.set_defaults(fn=_cmd_props)

    serve = subs.add_parser("serve", help="run the game HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--session-ttl", type=float, default=3600.0,
                       help="idle session lifetime in seconds")
    serve.add_argument("--ai-budget-ms", type=int, default=15000,
                       help="AI reply time budget before greedy fallback")
    serve.add_argument("--snapshot-dir", type=Path, default=None,
                       help="directory for session snapshots surviving restarts")
    serve.add_argument("--static-dir", type=Path, default=None,
                       help="directory of built UI assets to serve at /")
    serve.set_defaults(fn=_cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except InfluNetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
