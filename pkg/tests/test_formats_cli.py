import json
import subprocess
import sys
from pathlib import Path

import pytest

from contextuality import formats
from contextuality.cli import parse_angles, run
from contextuality.errors import ParseError, ValidationError
from contextuality.fixtures import bell_events, bell_table, hardy_table
from contextuality.relational import model_to_instance

DATA = Path(__file__).resolve().parents[1] / "data"


def d(name):
    return str(DATA / name)


# -- formats -------------------------------------------------------------------


@pytest.mark.parametrize("model", [bell_table(), hardy_table()])
def test_model_roundtrip(model):
    data = json.loads(formats.dumps(formats.model_to_json(model)))
    _, loaded = formats.load_model(data)
    assert loaded.scenario.measurements == model.scenario.measurements
    assert formats.model_to_json(loaded) == formats.model_to_json(model)


def test_data_files_match_fixtures():
    _, model = formats.load_model(formats.read_json(d("bell_table.json")))
    weights = [sorted(t.weights.values()) for t in model.tables]
    assert weights == [sorted(t.weights.values()) for t in bell_table().tables]


def test_float_weights_rejected():
    data = formats.read_json(d("bell_table.json"))
    first = data["model"]["tables"][0]["rows"]
    key = next(iter(first))
    first[key] = 0.5
    with pytest.raises((ParseError, ValidationError)):
        formats.load_model(data)


def test_unreadable_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ParseError):
        formats.read_json(p)


@pytest.mark.parametrize(
    "name, kind",
    [
        ("bell_table.json", "model"),
        ("bell_events.json", "events"),
        ("triangle_cover.json", "cover"),
        ("hardy_instance.json", "instance"),
        ("square_r2_labeling.json", "labeling"),
    ],
)
def test_detect_format(name, kind):
    assert formats.detect_format(formats.read_json(d(name))) == kind


def test_events_roundtrip():
    sc = bell_table().scenario
    data = formats.events_to_json(bell_events(), sc)
    assert [str(e.formula) for e in formats.load_events(data, sc)] == [str(e.formula) for e in bell_events()]


def test_instance_roundtrip():
    inst = model_to_instance(hardy_table())
    again = formats.load_instance(json.loads(formats.dumps(formats.instance_to_json(inst))))
    assert [sorted(r.rows()) for r in again.relations] == [
        sorted(tuple(map(str, row)) for row in r.rows()) for r in inst.relations
    ]


def test_parse_angles():
    got = parse_angles("a1=0,a2=90,b1=180,b2=-90", degrees=True)
    assert got["b1"] == pytest.approx(3.141592653589793)
    assert got["b2"] == pytest.approx(-1.5707963267948966)
    with pytest.raises(ValidationError):
        parse_angles("a1=0,b1=180", degrees=True)
    with pytest.raises(ParseError):
        parse_angles("a1", degrees=False)


# -- CLI -----------------------------------------------------------------------


def test_check_bell_table():
    r = run(["check", d("bell_table.json")])
    assert r.exit_code == 0
    assert "probabilistically contextual:   yes" in r.stdout
    assert "violation certificate" in r.stdout


def test_check_json_hardy():
    r = run(["check", d("hardy_table.json"), "--json"])
    data = json.loads(r.stdout)
    assert data["logically_contextual"] and not data["strongly_contextual"]
    assert data["logical_witness"] == {"context": ["a1", "b1"], "section": {"a1": "0", "b1": "0"}}


def test_check_with_events_and_assert():
    r = run(["check", d("bell_table.json"), "--events", d("bell_events.json"), "--json"])
    assert json.loads(r.stdout)["bell"]["violation"] == "1/4"
    assert run(["check", d("bell_table.json"), "--assert-noncontextual"]).exit_code == 3
    assert run(["check", d("correlated_table.json"), "--assert-noncontextual"]).exit_code == 0


def test_bell_command():
    r = run(["bell", d("bell_table.json"), "--events", d("bell_events.json")])
    assert r.exit_code == 0 and "violation = 1/4" in r.stdout


def test_quantum_bell_table_cli():
    r = run(["quantum", "bell-table", "--angles", "a1=0,a2=60,b1=0,b2=60", "--degrees", "--json"])
    assert r.exit_code == 0
    assert json.loads(r.stdout) == formats.read_json(d("bell_table.json"))


def test_ks_commands():
    assert "contextual" in run(["ks", "check", d("triangle_cover.json")]).stdout
    crit = json.loads(run(["ks", "criterion", d("eighteen_nine_cover.json"), "--json"]).stdout)
    assert crit["failing_divisor"] == 2
    r = run(["ks", "realize", d("triangle_cover.json"), "--vectors", d("triangle_r2_labeling.json"), "--assert-realized"])
    assert r.exit_code == 3
    r = run(["ks", "realize", d("square_cover.json"), "--vectors", d("square_r2_labeling.json"), "--assert-realized"])
    assert r.exit_code == 0


def test_db_commands():
    r = run(["db", "acyclic", d("bell_schema.json")])
    assert r.exit_code == 0 and r.stdout.strip() == "cyclic"
    assert run(["db", "acyclic", d("bell_schema.json"), "--assert-acyclic"]).exit_code == 3
    assert run(["db", "acyclic", d("chain_instance.json"), "--assert-acyclic"]).exit_code == 0
    assert run(["db", "universal", d("hardy_instance.json")]).exit_code == 0
    assert run(["db", "join", d("triangle_instance.json")]).exit_code == 0
    ext = run(["db", "extend", d("chain_model.json"), "--json"])
    assert ext.exit_code == 0
    assert run(["db", "extend", d("bell_table.json")]).exit_code == 2


def test_exit_codes(tmp_path):
    assert run(["frobnicate"]).exit_code == 1
    assert run([]).exit_code == 1
    bad = tmp_path / "bad.json"
    bad.write_text("[1,")
    assert run(["validate", str(bad)]).exit_code == 1
    invalid = tmp_path / "invalid.json"
    invalid.write_text(json.dumps({"measurements": ["a"], "outcomes": {"a": ["0"]}, "contexts": [["a", "z"]]}))
    assert run(["validate", str(invalid)]).exit_code == 2
    # a cover file lacks the fields of a model file
    assert run(["check", d("eighteen_nine_cover.json")]).exit_code == 1
    # 16 global assignments exceed a bound of 10
    assert run(["check", d("bell_table.json"), "--bound", "10"]).exit_code == 2


def test_help_exits_zero():
    r = run(["--help"])
    assert r.exit_code == 0 and "usage" in r.stdout


@pytest.mark.parametrize("name", sorted(p.name for p in DATA.glob("*.json")))
def test_every_data_file_validates(name):
    assert run(["validate", d(name)]).exit_code == 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "contextuality.cli", "db", "acyclic", d("bell_schema.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "cyclic"
