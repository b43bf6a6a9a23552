import json

import pytest

from cascadeho import serialize
from cascadeho.cli import main
from cascadeho.scenarios import all_mutations, fixture, fixture_names


def write_fixture(tmp_path, name):
    path = tmp_path / f"{name}.json"
    path.write_text(serialize.dumps(fixture(name).payload))
    return str(path)


# --- documents --------------------------------------------------------------


def test_round_trip_is_canonical():
    for name in fixture_names():
        text = serialize.dumps(fixture(name).payload)
        assert serialize.dumps(serialize.loads(text)) == text, name


def test_rationals_survive_exactly():
    sys_ = fixture("one-interval").payload
    back = serialize.loads(serialize.dumps(sys_))
    comp = back.m1[("alpha", "beta")][0]
    assert comp.boundary_labels[0].t == sys_.m1[("alpha", "beta")][0].boundary_labels[0].t
    assert back.orbits["alpha"].action == sys_.orbits["alpha"].action


def test_loader_rejects_garbage():
    from cascadeho.errors import InputError

    for bad in (
        "not json",
        "[]",
        '{"schema_version": 99, "kind": "mbs", "payload": {}}',
        '{"schema_version": 1, "kind": "nope", "payload": {}}',
        '{"schema_version": 1, "kind": "mbs", "payload": {"orbits": [{}]}}',
    ):
        with pytest.raises(InputError):
            serialize.loads(bad)


# --- CLI --------------------------------------------------------------------


def test_validate_ok(tmp_path, capsys):
    path = write_fixture(tmp_path, "one-interval")
    assert main(["validate", path]) == 0
    assert capsys.readouterr().out.strip() == "ok"


def test_nch_text_and_json_agree(tmp_path, capsys):
    path = write_fixture(tmp_path, "one-interval")
    assert main(["nch", path]) == 0
    text = capsys.readouterr().out
    assert "c | 3: Z" in text
    assert main(["nch", path, "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert {
        (g["class"], g["grading"]): (g["free"], tuple(g["torsion"]))
        for g in data["groups"]
    } == fixture("one-interval").expected["nch"]


def test_chs1_reports_stable_range(tmp_path, capsys):
    path = write_fixture(tmp_path, "preq-112")
    assert main(["chs1", path, "--umax", "3", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["stable_range"] == 4
    assert ["2G", 5] in data["unstable_gradings"]


def test_compare_exit_codes(tmp_path, capsys):
    path = write_fixture(tmp_path, "preq-112")
    assert main(["compare", path, "--umax", "3"]) == 0
    out = capsys.readouterr().out
    assert out.count("[ok]") == 4


def test_scenario_pipe_equivalents(tmp_path, capsys):
    out = tmp_path / "preq.json"
    assert main(
        ["scenario", "prequantization", "--g", "1", "--e", "1", "--d", "2",
         "-o", str(out)]
    ) == 0
    assert out.read_text() == serialize.dumps(fixture("preq-112").payload)
    assert main(["egh", str(out)]) == 0
    assert "degree 0: rank 2" in capsys.readouterr().out


def test_scenario_fixture_subcommand(tmp_path, capsys):
    assert main(["scenario", "fixture", "--name", "one-circle"]) == 0
    text = capsys.readouterr().out
    assert serialize.dumps(serialize.loads(text)) == text


def test_morphism_command(tmp_path, capsys):
    path = tmp_path / "tc.json"
    path.write_text(serialize.dumps(fixture("trivial-cobordism").payload))
    assert main(["morphism", str(path), "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["ok"] and report["identity"]


def test_exit_code_validation_failure(tmp_path, capsys):
    mutation = next(
        m for m in all_mutations()
        if m.fixture == "one-interval" and m.cls == "label-sign-flip"
    )
    path = tmp_path / "bad.json"
    path.write_text(serialize.dumps(mutation.payload))
    assert main(["validate", str(path)]) == 1
    assert "label-sign-mismatch" in capsys.readouterr().out


def test_exit_code_square_nonzero(tmp_path, capsys):
    mutation = next(m for m in all_mutations() if m.cls == "square-break")
    path = tmp_path / "sq.json"
    path.write_text(serialize.dumps(mutation.payload))
    assert main(["validate", str(path)]) == 2


def test_exit_code_schema_error(tmp_path, capsys):
    path = tmp_path / "junk.json"
    path.write_text("{")
    assert main(["validate", str(path)]) == 3
    assert main(["validate", str(tmp_path / "missing.json")]) == 3
    assert main(["frobnicate"]) == 3


def test_wrong_kind_for_subcommand(tmp_path, capsys):
    path = write_fixture(tmp_path, "one-interval")
    assert main(["egh", path]) == 3


def test_threads_env(tmp_path, capsys, monkeypatch):
    path = write_fixture(tmp_path, "one-interval")
    monkeypatch.setenv("CASCADEHO_THREADS", "2")
    assert main(["nch", path]) == 0
    monkeypatch.setenv("CASCADEHO_THREADS", "banana")
    assert main(["nch", path]) == 3
