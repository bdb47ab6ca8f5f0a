import csv
import io
import json
from importlib.resources import files

import jsonschema
import pytest

from synfilt.cli import DEFAULT_SEED, SEED_ENV, run


def invoke(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def schema(name):
    return json.loads((files("synfilt") / "schemas" / f"{name}.schema.json").read_text())


def check(name, text):
    doc = json.loads(text)
    jsonschema.Draft7Validator.check_schema(schema(name))
    jsonschema.validate(doc, schema(name))
    return doc


def test_cantor_encode_plain():
    assert invoke("cantor", "encode", "1/9") == (0, "0,0,2,3,2\n")
    assert invoke("cantor", "decode", "0,0,2,3,2") == (0, "1/9\n")


@pytest.mark.parametrize(
    "name, argv",
    [
        ("cantor", ["--output", "json", "cantor", "encode", "3/13"]),
        ("cantor", ["--output", "json", "cantor", "decode", "0,1,1"]),
        ("identities", ["simplex", "identities", "--max-n", "4", "--points", "20"]),
        ("identities", ["verify", "identities", "--max-n", "3", "--points", "10"]),
        ("factorize", ["simplex", "factorize", "3->2:[0,0,2,2]"]),
        ("compose", ["simplex", "compose", "2->3:[0,2,3]", "3->2:[0,0,1,2]"]),
        ("pushforward", ["verify", "pushforward", "--alpha", "4,0,4", "--n", "2000"]),
        ("pushforward", ["diri", "verify-pushforward", "--alpha", "1,2,3", "--face", "1", "--n", "2000"]),
        ("tower", ["verify", "tower", "--trials", "30"]),
        ("diri_sample", ["--output", "json", "diri", "sample", "--alpha", "1,2,3", "--n-samples", "5"]),
        ("density_grid", ["--output", "json", "diri", "density-grid", "--alpha", "0.5,1,2", "--resolution", "4"]),
    ],
)
def test_json_outputs_match_schemas(name, argv):
    code, text = invoke(*argv)
    assert code == 0
    check(name, text)


def test_filt_workflow(tmp_path):
    state = str(tmp_path / "s.json")
    code, text = invoke("filt", "--state", state, "init", "--alpha", "1,1,1", "--context", "0,0,1")
    assert code == 0
    doc = check("filtration_state", text)
    assert doc["t"] == 2 and doc["next_face_index"] == 1

    code, text = invoke("filt", "observe", "--state", state, "--k", "1")
    doc = check("filtration_state", text)
    assert doc["alpha"] == [1, 2, 1]
    assert doc["posterior_mean"] == ["1/4", "1/2", "1/4"]

    code, text = invoke("filt", "--state", state, "advance", "--fraction", "0.5")
    doc = check("filtration_state", text)
    assert doc["t"] == 3 and doc["alpha"] == [0.5, 0.5, 2, 1]

    code, text = invoke("filt", "--state", state, "past", "--s", "2")
    assert check("filt_past", text)["alpha"] == [1, 2, 1]
    code, text = invoke("filt", "--state", state, "show")
    check("filtration_state", text)
    # the persisted file is itself a valid state document
    check("filtration_state", (tmp_path / "s.json").read_text())


def test_filt_context_rational(tmp_path):
    state = str(tmp_path / "s.json")
    code, text = invoke("filt", "--state", state, "init", "--alpha", "1,2,1", "--context-rational", "1/9")
    assert code == 0
    assert json.loads(text)["context_digits"] == [0, 0, 2, 3, 2]


def test_same_seed_is_byte_identical():
    argv = ["verify", "pushforward", "--alpha", "1,2,3", "--n", "5000", "--seed", "7", "--workers", "3"]
    first, second = invoke(*argv), invoke(*argv)
    assert first == second
    other = invoke("verify", "pushforward", "--alpha", "1,2,3", "--n", "5000", "--seed", "8")
    assert other[1] != first[1]


def test_seed_env_override(monkeypatch):
    argv = ["diri", "sample", "--alpha", "1,1", "--n-samples", "3"]
    default = invoke(*argv)[1]
    assert default == invoke("--seed", str(DEFAULT_SEED), *argv)[1]
    monkeypatch.setenv(SEED_ENV, "123")
    assert invoke(*argv)[1] == invoke("--seed", "123", *argv)[1] != default


def test_csv_round_trips_doubles():
    code, text = invoke("--seed", "3", "diri", "sample", "--alpha", "1,2,3", "--n-samples", "20")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["x0", "x1", "x2"]
    code, js = invoke("--seed", "3", "--output", "json", "diri", "sample", "--alpha", "1,2,3", "--n-samples", "20")
    samples = json.loads(js)["samples"]
    for row, exact in zip(rows[1:], samples):
        assert [float(v) for v in row] == exact


def test_density_grid_csv_marks_infinity():
    code, text = invoke("diri", "density-grid", "--alpha", "0.5,1,1", "--resolution", "2")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0][-1] == "density"
    assert len(rows) == 1 + 6
    assert any(r[-1] == "inf" for r in rows[1:])


@pytest.mark.parametrize(
    "argv",
    [
        ["cantor", "encode", "9/7"],
        ["cantor", "encode", "0.25"],
        ["cantor", "decode", "2"],
        ["simplex", "factorize", "2->1:[1,0,0]"],
        ["simplex", "compose", "1->1:[0,1]", "2->2:[0,1,2]"],
        ["diri", "sample", "--alpha", "1,-1"],
        ["diri", "density-grid", "--alpha", "1,0,1"],
        ["verify", "pushforward", "--alpha", "1"],
        ["--seed", "-1", "cantor", "encode", "1/2"],
    ],
)
def test_invalid_input_exit_code(argv, capsys):
    code, _ = invoke(*argv)
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_missing_state_is_invalid(tmp_path):
    assert invoke("filt", "--state", str(tmp_path / "none.json"), "show")[0] == 2


def test_observation_outside_range_is_invalid(tmp_path):
    state = str(tmp_path / "s.json")
    invoke("filt", "--state", state, "init", "--alpha", "1,1")
    assert invoke("filt", "--state", state, "observe", "--k", "2")[0] == 2
    assert invoke("filt", "--state", state, "past", "--s", "5")[0] == 2


def test_check_failure_exit_code():
    code, text = invoke("--se-threshold", "0", "verify", "pushforward", "--alpha", "1,2,3", "--face", "0", "--n", "1000")
    assert code == 3
    assert check("pushforward", text)["passed"] is False


@pytest.mark.parametrize(
    "argv",
    [["--bogus"], ["cantor", "encode", "1/2", "--what"], ["nonsense"], [], ["diri", "sample"]],
)
def test_usage_exit_code(argv):
    assert invoke(*argv)[0] == 64
