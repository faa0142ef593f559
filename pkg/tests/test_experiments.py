import json

import numpy as np
import pytest

from influnet import ZealotConfig, generate
from influnet.cli import main
from influnet.experiments import (
    ExperimentSpec,
    influence_map,
    localization_mass,
    phi_map,
    run_energy_map,
    run_match,
    run_phi_map,
    run_property_suite,
)
from influnet.graphs import VertexSet, grid_mirror_perm, square_grid


def grid5_spec(tmp_path=None, **kw):
    base = dict(family="square_grid", params={"width": 5, "height": 5},
                zealots=[[12], []], authority=1)
    base.update(kw)
    if tmp_path is not None:
        base["out"] = str(tmp_path / "map")
    return ExperimentSpec(**base)


def test_spec_round_trip():
    spec = grid5_spec(epsilon=[0.1, 0.2], budget=2)
    again = ExperimentSpec.from_json(json.loads(json.dumps(spec.to_json())))
    assert again.digest() == spec.digest()
    with pytest.raises(Exception):
        ExperimentSpec.from_json({"family": "cycle", "bogus": 1})


def test_energy_map_argmax_center_neighbors(tmp_path):
    spec = grid5_spec(tmp_path)
    res = run_energy_map(spec)
    assert res.argmax == [7, 11, 13, 17]
    assert not res.degenerate
    assert set(res.values.values()) <= set(np.clip(list(res.values.values()), 0, 1))
    csv = (tmp_path / "map.csv").read_text()
    assert csv.startswith(f"# spec_sha256: {spec.digest()}")


def test_energy_map_deterministic_bytes(tmp_path):
    spec1 = grid5_spec(tmp_path)
    run_energy_map(spec1)
    first = (tmp_path / "map.csv").read_bytes(), (tmp_path / "map.json").read_bytes()
    run_energy_map(grid5_spec(tmp_path))
    second = (tmp_path / "map.csv").read_bytes(), (tmp_path / "map.json").read_bytes()
    assert first == second


def test_energy_map_degenerate_flag():
    # both candidates of the 3-path around a center zealot tie exactly
    spec = ExperimentSpec(family="square_grid", params={"width": 3, "height": 1},
                          zealots=[[1], []], authority=1)
    res = run_energy_map(spec)
    assert res.degenerate
    assert set(res.values.values()) == {0.0}
    assert res.argmax == [0, 2]


def test_phi_map_symmetry_report(tmp_path):
    spec = grid5_spec(tmp_path, epsilon=0.15)
    results = run_phi_map(spec)
    assert len(results) == 1
    res = results[0]
    assert res.symmetry  # rotation + both mirrors survive on the symmetric grid
    assert max(res.symmetry.values()) <= 1e-4
    assert res.argmax and set(res.argmax) <= {7, 11, 13, 17}


def test_phi_map_multi_eps_files(tmp_path):
    spec = grid5_spec(tmp_path, epsilon=[0.15, 0.05])
    results = run_phi_map(spec)
    assert len(results) == 2
    assert (tmp_path / "map_eps0.15.csv").exists()
    assert (tmp_path / "map_eps0.05.csv").exists()


def test_localization_mass():
    g = square_grid(3, 3)
    phi = np.zeros(9)
    phi[1] = 0.75
    phi[8] = 0.25
    assert localization_mass(g, VertexSet.of([0]), phi, hops=1) == pytest.approx(0.75)
    assert localization_mass(g, VertexSet.of([0]), phi, hops=4) == pytest.approx(1.0)


def test_hint_map_equals_cli_map(grid11):
    # the map the service serves must be byte-equivalent to the CLI's
    z = ZealotConfig.of([60], [0])
    a = influence_map(grid11, z, 1)
    b = influence_map(grid11, z, 1)
    assert a.values == b.values and a.argmax == b.argmax


def test_run_match_greedy_beats_random():
    spec = ExperimentSpec(family="square_grid", params={"width": 4, "height": 4},
                          strategies=[{"strategy": "greedy"}, {"strategy": "random", "seed": 5}],
                          rounds=2, seed=1)
    t = run_match(spec)
    assert len(t["moves"]) == 4
    assert t["final_shares"][0] + t["final_shares"][1] == pytest.approx(1.0, abs=1e-9)
    assert t["winner"] in (0, 1, 2)
    # deterministic transcript
    assert run_match(spec) == t


def test_run_match_needs_two_strategies():
    with pytest.raises(Exception):
        run_match(ExperimentSpec(family="cycle", params={"n": 5},
                                 strategies=[{"strategy": "greedy"}]))


def test_property_suite_passes_and_corruption_fails():
    results = run_property_suite(seed=0)
    assert all(r.passed for r in results), [r for r in results if not r.passed]
    names = {r.name for r in results}
    assert "gradient_finite_difference" in names
    corrupted = run_property_suite(seed=0, corrupt="gradient")
    bad = {r.name: r for r in corrupted}["gradient_finite_difference"]
    assert not bad.passed


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def test_cli_energy_map(tmp_path, capsys):
    out = tmp_path / "fig"
    rc = main(["energy-map", "--graph", "square_grid",
               "--params", '{"width": 5, "height": 5}',
               "--zealots", "[[12], []]", "--m", "1", "--out", str(out)])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["argmax"] == [7, 11, 13, 17]
    assert (tmp_path / "fig.csv").exists() and (tmp_path / "fig.json").exists()


def test_cli_greedy_and_relax_select(tmp_path, capsys):
    args = ["--graph", "square_grid", "--params", '{"width": 4, "height": 1}',
            "--zealots", "[[0], [3]]", "--m", "0", "--budget", "1"]
    assert main(["greedy"] + args) == 0
    sol = json.loads(capsys.readouterr().out)
    assert sol["chosen"] == [2]
    assert main(["relax-select"] + args + ["--eps", "0.2"]) == 0
    sol2 = json.loads(capsys.readouterr().out)
    assert len(sol2["chosen"]) == 1


def test_cli_spec_file(tmp_path, capsys):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps({
        "family": "square_grid", "params": {"width": 3, "height": 1},
        "zealots": [[1], []], "authority": 1}))
    assert main(["energy-map", "--spec", str(spec_path)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["degenerate"] is True


def test_cli_match(capsys):
    rc = main(["match", "--graph", "cycle", "--params", '{"n": 8}',
               "--strategies", '[{"strategy": "greedy"}, {"strategy": "random", "seed": 2}]',
               "--rounds", "2"])
    assert rc == 0
    t = json.loads(capsys.readouterr().out)
    assert len(t["moves"]) == 4


def test_cli_bad_family_errors(capsys):
    rc = main(["energy-map", "--graph", "not_a_family", "--zealots", "[[0], []]"])
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_cli_requires_family(capsys):
    assert main(["greedy", "--zealots", "[[0], []]"]) == 2
