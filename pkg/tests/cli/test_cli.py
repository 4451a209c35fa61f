import json

import pytest

from string_threshold.cli import (
    EXIT_ASSERTION,
    EXIT_CAPACITY,
    EXIT_INPUT,
    EXIT_OK,
    EXIT_USAGE,
    RunManifest,
    _counterexamples,
    _with_out_dir,
    main,
    parse_ints,
    parse_seeds,
)

GRID = [
    [[0, 1], [3, 1]],
    [[0, 2], [3, 2]],
    [[1, 0], [1, 3]],
    [[2, 0], [2, 3]],
]


def run(tmp_path, *argv):
    return main(["--workers", "1", "--out-dir", str(tmp_path), *argv])


def load(tmp_path, name):
    return json.loads((tmp_path / name).read_text())


def test_verify_quarter(tmp_path):
    assert run(tmp_path, "verify", "quarter", "--s", "4") == EXIT_OK
    report = load(tmp_path, "verify.json")
    assert report["passed"] is True
    assert report["min_phi"] == "1/4"
    assert report["graph_count"] == 11
    manifest = RunManifest.from_json((tmp_path / "verify.manifest.json").read_text())
    assert manifest.subcommand == "verify"
    assert manifest.seed == 0
    assert set(manifest.outputs) == {"verify.json"}


def test_verify_capacity(tmp_path):
    assert run(tmp_path, "verify", "quarter", "--s", "8") == EXIT_CAPACITY


def test_verify_clique_bound(tmp_path):
    assert run(tmp_path, "verify", "clique-bound", "--clique-t", "3", "--s", "4") == EXIT_OK
    assert load(tmp_path, "verify.json")["details"]["bound"] == "3/8"


@pytest.mark.parametrize(
    "argv",
    [[], ["verify", "bogus"], ["geometry", "sideways"], ["minimize-phi", "--graph", "!"]],
)
def test_usage(tmp_path, argv):
    assert run(tmp_path, *argv) == EXIT_USAGE


def test_help():
    assert main(["--help"]) == EXIT_OK


def test_enumerate_patterns(tmp_path):
    assert run(tmp_path, "enumerate-patterns", "--max-vertices", "7") == EXIT_OK
    assert len(load(tmp_path, "patterns.json")) == 5
    assert run(tmp_path, "--format", "graph6", "enumerate-patterns", "--max-vertices", "6") == EXIT_OK
    assert (tmp_path / "patterns.g6").read_text().splitlines()[0] == "D~{"


def test_admissible(tmp_path):
    assert run(tmp_path, "admissible", "--graph", "C?") == EXIT_OK
    assert load(tmp_path, "admissible.json") == {"admissible_free": True}
    assert run(tmp_path, "admissible", "--graph", "C?", "--H", "Bw") == EXIT_OK
    found = load(tmp_path, "admissible.json")
    assert found["admissible_free"] is False
    assert found["subset"] == [0, 1, 2]
    assert found["H"] == "Bw"


def test_admissible_weighted(tmp_path):
    weights = tmp_path / "weights.json"
    weights.write_text(json.dumps({"k": 3, "weights": {"0,1": "1/2", "0,2": "1/2", "1,2": "1/2"}}))
    assert run(tmp_path, "admissible", "--weighted", str(weights), "--H", "Bw", "--eps", "1/5") == EXIT_OK
    assert load(tmp_path, "admissible.json")["admissible_free"] is False
    assert run(tmp_path, "admissible") == EXIT_USAGE


def test_minimize_phi(tmp_path):
    assert run(tmp_path, "minimize-phi", "--graph", "C?", "--graph", "C~") == EXIT_OK
    results = load(tmp_path, "minimize-phi.json")
    assert [entry["minimum"]["value"] for entry in results] == ["1/4", "5/8"]
    assert all(entry["problems"] == [] for entry in results)


def test_minimize_phi_oracles(tmp_path):
    assert run(tmp_path, "minimize-phi", "--graph", "Bw", "--oracles") == EXIT_OK
    entry = load(tmp_path, "minimize-phi.json")[0]
    assert entry["descent"] == pytest.approx(2 / 3)
    assert entry["grid"] == pytest.approx(2 / 3, abs=1e-3)


def test_reduce_weights(tmp_path):
    weights = tmp_path / "weights.json"
    weights.write_text(json.dumps({"k": 3, "weights": {"0,1": "3/10", "0,2": "7/10", "1,2": "1"}}))
    assert run(tmp_path, "reduce-weights", "--weights", str(weights)) == EXIT_OK
    result = load(tmp_path, "reduce-weights.json")
    assert result["partition"] == [[0], [1, 2]]
    assert result["quotient"]["phi"] == ["1/3", "2/3"]
    assert result["violations"] == []
    assert "weights.json" in json.dumps(load(tmp_path, "reduce-weights.manifest.json")["input_hashes"])


def test_reduce_weights_with_repair(tmp_path):
    weights = tmp_path / "weights.json"
    pairs = {"0,1": 0, "0,2": 0, "0,3": 0, "1,2": 0, "1,3": 1, "2,3": 1}
    weights.write_text(json.dumps({"k": 4, "weights": pairs}))
    assert run(tmp_path, "reduce-weights", "--weights", str(weights)) == EXIT_OK
    result = load(tmp_path, "reduce-weights.json")
    assert result["partition"] == [[0], [1, 3], [2]]
    assert result["violations"] == []


@pytest.mark.parametrize("content", [None, "{", '{"k": 2}'])
def test_reduce_weights_bad_input(tmp_path, content):
    weights = tmp_path / "weights.json"
    if content is not None:
        weights.write_text(content)
    status = run(tmp_path, "reduce-weights", "--weights", str(weights))
    assert status == (EXIT_INPUT if content == '{"k": 2}' else EXIT_USAGE)


def test_geometry_crossings(tmp_path):
    curves = tmp_path / "curves.json"
    curves.write_text(json.dumps(GRID))
    assert run(tmp_path, "geometry", "crossings", "--curves", str(curves)) == EXIT_OK
    found = load(tmp_path, "crossings.json")
    assert [c["curves"] for c in found] == [[0, 2], [0, 3], [1, 2], [1, 3]]
    assert found[0]["point"] == ["1", "1"]
    assert run(tmp_path, "geometry", "graph", "--curves", str(curves)) == EXIT_OK
    assert load(tmp_path, "graph.json")["edges"] == [[0, 2], [0, 3], [1, 2], [1, 3]]
    assert run(tmp_path, "geometry", "separator", "--curves", str(curves)) == EXIT_OK
    assert "pair" in load(tmp_path, "separator.json")


@pytest.mark.parametrize(
    "content",
    ["[[[0, 0]]]", "[[[0, 0], [2, 0]], [[1, 0], [1, 1]]]", "not json"],
)
def test_geometry_bad_curves(tmp_path, content):
    curves = tmp_path / "curves.json"
    curves.write_text(content)
    assert run(tmp_path, "geometry", "crossings", "--curves", str(curves)) == EXIT_INPUT


def test_geometry_needs_curves(tmp_path):
    assert run(tmp_path, "geometry", "graph") == EXIT_USAGE


def test_geometry_random(tmp_path):
    argv = ["geometry", "random", "--n", "5", "--segments", "3", "--width", "50", "--height", "50"]
    assert run(tmp_path, "--seed", "7", *argv) == EXIT_OK
    assert len(load(tmp_path, "curves.json")) == 5


def test_extremal(tmp_path):
    assert run(tmp_path, "extremal", "--ns", "8,12", "--seeds", "0..1") == EXIT_OK
    lines = (tmp_path / "extremal.csv").read_text().splitlines()
    assert lines[0] == "n,seed,edges,biclique,exact,log2n"
    assert len(lines) == 5


def test_embed(tmp_path):
    config = tmp_path / "embed.json.in"
    config.write_text(
        json.dumps(
            {
                "reduced": {"k": 2, "weights": {"0,1": "1/2"}},
                "H": 2,
                "block_size": 30,
                "intra_density": "1/2",
                "lam": "1/2",
            }
        )
    )
    assert run(tmp_path, "embed", "--config", str(config), "--runs", "3") == EXIT_OK
    summary = load(tmp_path, "embed.json")
    assert summary["runs"] == 3
    assert summary["verified"] == summary["successes"]
    assert len((tmp_path / "embed.csv").read_text().splitlines()) == 4


@pytest.mark.parametrize(
    "config",
    [
        [],
        {"reduced": {"k": 2, "weights": {"0,1": "1/2"}}, "H": 2},
        {"reduced": {"k": 3, "weights": {"0,1": 0, "0,2": 0, "1,2": 0}}, "H": 2, "block_size": 5},
    ],
)
def test_embed_bad_config(tmp_path, config):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    assert run(tmp_path, "embed", "--config", str(path)) == EXIT_USAGE


def test_replay(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    assert run(first, "verify", "quarter", "--s", "3") == EXIT_OK
    manifest = first / "verify.manifest.json"
    assert run(second, "replay", "--manifest", str(manifest)) == EXIT_OK
    assert load(second, "replay.json") == {"status": 0, "differing_outputs": []}


def test_replay_detects_changes(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    assert run(first, "verify", "quarter", "--s", "3") == EXIT_OK
    manifest = first / "verify.manifest.json"
    data = json.loads(manifest.read_text())
    data["outputs"]["verify.json"] = "0" * 64
    manifest.write_text(json.dumps(data))
    assert run(second, "replay", "--manifest", str(manifest)) == EXIT_ASSERTION
    assert load(second, "replay.json")["differing_outputs"] == ["verify.json"]


def test_with_out_dir():
    assert _with_out_dir(["--out-dir", "a", "verify", "--out-dir=b", "s8"], "c") == [
        "--out-dir",
        "c",
        "verify",
        "s8",
    ]


def test_counterexamples():
    violations = ["phi 1/5 < 1/4 for C?", "hereditary and direct admissible-free sets differ"]
    assert _counterexamples(violations) == ["C?"]


def test_parse():
    assert parse_seeds("3..5") == [3, 4, 5]
    assert parse_seeds("7") == [7]
    assert parse_ints("8,12") == [8, 12]


def test_geometry_extremal(tmp_path):
    assert run(tmp_path, "geometry", "extremal", "--n", "12", "--seeds", "1..2") == EXIT_OK
    lines = (tmp_path / "extremal.csv").read_text().splitlines()
    assert [line.split(",")[:2] for line in lines[1:]] == [["12", "1"], ["12", "2"]]
