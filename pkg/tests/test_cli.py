import json

import pytest

from conftest import point_presentation
from fimhom.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, UsageError, main, parse_bounds
from fimhom.module import Presentation
from fimhom.presentation_io import dump_presentation


@pytest.fixture
def write_presentation(tmp_path):
    def write(P, name="module.json"):
        path = tmp_path / name
        path.write_text(dump_presentation(P), encoding="utf-8")
        return str(path)

    return write


def test_parse_bounds():
    assert parse_bounds("3,3") == (3, 3)
    assert parse_bounds("4", m=3) == (4, 4, 4)
    with pytest.raises(UsageError):
        parse_bounds("3,3", m=3)
    with pytest.raises(UsageError):
        parse_bounds("a,b")
    with pytest.raises(UsageError):
        parse_bounds("-1")


def test_analyze_json(write_presentation, capsys):
    path = write_presentation(point_presentation((6,)))
    assert main(["analyze", path, "--smax", "3", "--format", "json"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["command"] == "analyze"
    assert report["hd"] == [0, 1, 2, 3]
    assert report["gd"] == 0
    assert report["prd"] == 1
    assert report["reg"] == 0
    assert report["torsion"] == [0]
    assert report["singular"] == [1]
    assert report["dims"][0] == {"object": [0], "dim": 1}
    assert report["homology"][2] == {"s": 2, "entries": [{"object": [2], "dim": 1}]}


def test_analyze_text(write_presentation, capsys):
    path = write_presentation(point_presentation((6,)))
    assert main(["analyze", path, "--smax", "3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "gd: 0  prd: 1  reg: 0" in out
    assert "torsion: (0)  tsum: 0" in out
    assert "singular: {1}" in out


def test_analyze_zero_presentation(write_presentation, capsys):
    path = write_presentation(Presentation(2, 2, (2, 2), ()))
    assert main(["analyze", path, "--format", "json"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["reg"] == "-inf"
    assert report["torsion"] == [-1, -1]
    assert report["singular"] == []
    assert all(row["entries"] == [] for row in report["homology"])


def test_parse_error_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"field": 4, "m": 1, "bounds": [2], "generators": []}', encoding="utf-8")
    assert main(["analyze", str(path)]) == EXIT_USAGE
    assert "field: field must be prime" in capsys.readouterr().err


def test_resolve(write_presentation, capsys):
    path = write_presentation(point_presentation((4,)))
    assert main(["resolve", path, "--smax", "2", "--format", "json"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["euler"] == {"ok": True, "defects": []}
    assert [c["generators"] for c in report["covers"]] == [[[0]], [[1]], [[2]]]


def test_tree(write_presentation, capsys):
    path = write_presentation(point_presentation((2, 2)))
    assert main(["tree", path, "--format", "json"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["node_count"] == 3
    assert report["depth"] == 1
    assert report["terminated"] is True
    assert [e["descent"] for e in report["edges"]] == [2, 2]


def test_tree_hitting_level_cap(write_presentation, capsys):
    path = write_presentation(point_presentation((3,)))
    assert main(["tree", path, "--level-cap", "0"]) == EXIT_FAIL
    assert "terminated: False" in capsys.readouterr().out


def test_verify_random_is_deterministic(capsys):
    argv = ["verify", "--random", "--seed", "42", "--count", "2", "--m", "1", "--bounds", "5", "--field", "3"]
    assert main(argv) == EXIT_OK
    first = capsys.readouterr().out
    assert main(argv) == EXIT_OK
    second = capsys.readouterr().out
    assert first == second
    assert first.startswith("verify random=True seed=42 count=2")
    assert "FAIL 0" in first


def test_verify_file(write_presentation, capsys):
    path = write_presentation(point_presentation((4,)))
    assert main(["verify", path, "--format", "json"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["cases"] == 1
    assert report["summary"]["FAIL"] == 0
    assert json.loads(json.dumps(report)) == report


def test_verify_writes_report_file(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("FIMHOM_REPORT_DIR", str(tmp_path / "reports"))
    argv = ["verify", "--random", "--seed", "3", "--count", "1", "--bounds", "3", "--format", "json"]
    assert main(argv) == EXIT_OK
    out = capsys.readouterr().out
    assert (tmp_path / "reports" / "verify_seed3_count1.json").read_text(encoding="utf-8") == out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["verify"],
        ["verify", "--random", "--field", "4"],
        ["verify", "--random", "--m", "0"],
        ["verify", "--random", "--m", "2", "--bounds", "3,3,3"],
        ["analyze", "missing.json", "--smax", "-1"],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE


def test_verify_random_and_file_conflict(write_presentation):
    path = write_presentation(point_presentation((2,)))
    assert main(["verify", "--random", path]) == EXIT_USAGE
