import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from sortnet.cli import run
from sortnet.network import SortingNetwork, validate_network
from sortnet.sampler import RandomSource, sample_network

SCHEMAS = Path(__file__).resolve().parents[1] / "docs" / "schemas"


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def validate(doc, name):
    jsonschema.validate(doc, schema(name), cls=jsonschema.Draft202012Validator)


def test_schemas_are_valid():
    for path in SCHEMAS.glob("*.schema.json"):
        jsonschema.Draft202012Validator.check_schema(json.loads(path.read_text()))


def test_sample_stdout(capsys):
    assert run(["sample", "--n", "4", "--reps", "1", "--seed", "7"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1
    net = SortingNetwork.from_text(lines[0])
    assert net.n == 4 and validate_network(net.swaps, 4)


def test_sample_seed_env(capsys, monkeypatch):
    run(["sample", "--n", "6", "--reps", "3", "--seed", "11"])
    explicit = capsys.readouterr().out
    monkeypatch.setenv("SORTNET_SEED", "11")
    run(["sample", "--n", "6", "--reps", "3"])
    assert capsys.readouterr().out == explicit
    monkeypatch.setenv("SORTNET_SEED", "x")
    assert run(["sample", "--n", "6"]) == 2


def test_sample_jobs_independent(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert run(["sample", "--n", "20", "--reps", "6", "--seed", "3", "--out", str(a)]) == 0
    assert run(["sample", "--n", "20", "--reps", "6", "--seed", "3", "--jobs", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    # the replicate stream is the library's (seed, replicate) stream
    first = SortingNetwork.from_text(a.read_text().splitlines()[0])
    assert first == sample_network(20, RandomSource(3, 0))


def test_manifest(tmp_path):
    out = tmp_path / "nets.txt"
    assert run(["sample", "--n", "5", "--reps", "2", "--seed", "1", "--out", str(out)]) == 0
    man = json.loads(Path(str(out) + ".manifest.json").read_text())
    validate(man, "manifest")
    assert man["command"] == "sample" and man["seed"] == 1
    assert all(Path(p).exists() for p in man["outputs"])


def test_transform_check(tmp_path):
    out = tmp_path / "res.csv"
    assert run(["transform", "check", "--kgrid", "9", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "k,residual"
    rows = [tuple(map(float, line.split(","))) for line in lines[1:]]
    assert len(rows) == 9
    np.testing.assert_allclose([k for k, _ in rows], np.arange(1, 10) / 10)
    assert max(r for _, r in rows) < 1e-8


def test_verify_sine_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["verify", "sine", "--n", "10", "--reps", "2", "--seed", "1", "--out"]
    codes = {run(argv + [str(a)]), run(argv + [str(b)])}
    assert codes <= {0, 1}
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0].startswith("replicate,max_deviation,")


def test_usage_errors(capsys):
    assert run(["sample", "--n", "4", "--bogus"]) == 2
    assert "usage:" in capsys.readouterr().err
    assert run(["nonsense"]) == 2
    assert run(["sample", "--n", "1"]) == 2
    assert run(["render", "--n", "6000", "--out", "never.svg"]) == 2
    assert not Path("never.svg").exists()


def test_verify_exit_codes(tmp_path):
    # a tiny run misses the subnetwork tolerance; exit 1 still writes the JSON
    out = tmp_path / "s.json"
    code = run(["verify", "subnet", "--n", "30", "--m", "3", "--reps", "200", "--out", str(out)])
    assert code in (0, 1)
    doc = json.loads(out.read_text())
    validate(doc, "subnet")
    assert doc["tv"] == pytest.approx(0.5 * sum(abs(doc["subnetwork"].get(k, 0) - doc["geometric"].get(k, 0))
                                               for k in set(doc["subnetwork"]) | set(doc["geometric"])))
    assert run(["transform", "check", "--kgrid", "3", "--out", str(tmp_path / "t.csv")]) == 0


def test_flux_eval(tmp_path):
    path = tmp_path / "p.csv"
    M = 200
    t = np.arange(M + 1) / M
    path.write_text("t,h\n" + "".join(f"{float(a)!r},{float(b)!r}\n" for a, b in zip(t, -np.cos(np.pi * t))))
    out = tmp_path / "f.json"
    assert run(["flux", "eval", "--path", str(path), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    validate(doc, "flux_eval")
    assert doc["endpoints_negated"] is True and 1 - 1e-6 <= doc["flux"] < 1.001


def test_transform_ratio_measure(tmp_path, capsys):
    measure = {"locations": [1, 3], "probs": [0.5, 0.5]}
    validate(measure, "measure")
    assert run(["transform", "ratio", "--measure", json.dumps(measure), "--points", "5"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 6
    assert run(["transform", "ratio", "--measure", '{"locations": [1], "probs": [2]}']) == 2


def test_network_json_schema():
    validate(json.loads(sample_network(7, RandomSource(0, 0)).to_json()), "network")


def test_render_cli(tmp_path):
    nets = tmp_path / "n.txt"
    run(["sample", "--n", "5", "--reps", "2", "--seed", "4", "--out", str(nets)])
    svg = tmp_path / "w.svg"
    assert run(["render", "--in", str(nets), "--line", "1", "--out", str(svg)]) == 0
    first = svg.read_bytes()
    assert run(["render", "--in", str(nets), "--line", "1", "--out", str(svg)]) == 0
    assert svg.read_bytes() == first
    assert first.count(b"<polyline") == 5
    validate(json.loads(Path(str(svg) + ".manifest.json").read_text()), "manifest")
