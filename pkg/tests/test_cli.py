import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from szilard import cli

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def _write(tmp_path, doc, name="s.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def _base(**over):
    doc = {"n": 2, "statistics": "fermi", "t1": 3.0, "t2": 1.0, "insertion_l": 0.4,
           "demon": {"populations": [0.8, 0.15, 0.05]}}
    doc.update(over)
    return doc


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_erasure_scenario_gaps(capsys):
    code, out, _ = run(["cycle", str(SCENARIOS / "erasure_three_level.json")], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["erasure_gaps_after_measurement"] == pytest.approx([-0.5108, 0.4055], abs=5e-5)
    assert rep["erasure_gaps_initial"] == pytest.approx([1.2528, 1.9459], abs=5e-5)
    assert rep["post_removal_demon"] == pytest.approx([0.3, 0.5, 0.2], abs=1e-9)


def test_bad_populations_exit_2(tmp_path, capsys):
    path = _write(tmp_path, _base(demon={"populations": [0.6, 0.2, 0.1]}))
    code, out, err = run(["cycle", path], capsys)
    assert code == 2
    assert out == ""
    assert "sum to 1" in err


def test_unknown_key_exit_2(tmp_path, capsys):
    code, out, err = run(["cycle", _write(tmp_path, _base(colour="blue"))], capsys)
    assert code == 2 and out == ""
    assert "colour" in err


def test_missing_file_exit_2(tmp_path, capsys):
    code, _, err = run(["cycle", str(tmp_path / "nope.json")], capsys)
    assert code == 2 and "cannot read" in err


def test_json_is_byte_identical(tmp_path, capsys):
    path = _write(tmp_path, _base())
    first = run(["cycle", path, "--out", "json"], capsys)[1]
    second = run(["cycle", path, "--out", "json"], capsys)[1]
    assert first == second
    rep = json.loads(first)
    for step in ("insertion", "measurement", "expansion", "erasure_isothermal"):
        assert f"work_{step}" in rep and f"heat_{step}" in rep
    assert abs(rep["first_law_residual"]) < 1e-9


def test_cycle_csv(tmp_path, capsys):
    code, out, _ = run(["cycle", _write(tmp_path, _base()), "--out", "csv"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["quantity", "value"]
    fields = dict(rows[1:])
    assert fields["statistics"] == "fermi"
    assert float(fields["w"]) == pytest.approx(float(fields["q1"]) - float(fields["q2"]), abs=1e-9)


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out, _ = run(["cycle", _write(tmp_path, _base()), "-o", str(target)], capsys)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["n"] == 2


def _sweep_doc(**over):
    doc = _base(sweep={"l": {"count": 3, "min": 0.2, "max": 0.6},
                       "t1": {"count": 2, "min": 1.5, "max": 4.0, "spacing": "log"}})
    doc.update(over)
    return doc


def test_sweep_header_rows_and_round_trip(tmp_path, capsys):
    code, out, err = run(["sweep", _write(tmp_path, _sweep_doc())], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "l,t1,w,w_over_t1,q1,q2,eta,first_law_residual"
    assert len(lines) == 7
    assert "6 rows" in err
    rows = list(csv.reader(io.StringIO(out)))
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    assert buf.getvalue() == out
    # 17 significant digits survive a float round trip
    for r in rows[1:]:
        for cell in r:
            assert cli._fmt(float(cell)) == cell


def test_sweep_low_temperature_row_count(capsys):
    code, out, _ = run(["sweep", str(SCENARIOS / "low_temperature_fermi_n2.json"), "--threads", "0"], capsys)
    assert code == 0
    assert len(out.splitlines()) == 1 + 101 * 40


def test_sweep_hot_sink_leaves_eta_empty(tmp_path, capsys):
    doc = _sweep_doc(t2=2.0)
    doc["sweep"]["t1"] = {"count": 2, "min": 1.0, "max": 4.0}
    code, out, err = run(["sweep", _write(tmp_path, doc)], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["eta"] == "" for r in rows] == [True, False] * 3
    assert "3 with undefined efficiency" in err


def test_sweep_node_failure_exit_3(tmp_path, capsys):
    doc = _sweep_doc(expansion=[1.0, 0.4, 0.4])
    code, out, err = run(["sweep", _write(tmp_path, doc)], capsys)
    assert code == 3 and out == ""
    assert "l=0.2" in err and "t1=1.5" in err


def test_sweep_without_block_exit_2(tmp_path, capsys):
    assert run(["sweep", _write(tmp_path, _base())], capsys)[0] == 2


def test_negative_threads_exit_2(tmp_path, capsys):
    assert run(["sweep", _write(tmp_path, _sweep_doc()), "--threads", "-2"], capsys)[0] == 2


@pytest.mark.parametrize("n,stats,expected", [
    (4, "fermi", ["0.20000000000000001", "0.40000000000000002", "0.59999999999999998", "0.80000000000000004"]),
    (4, "bose", ["0.5"]),
    (1, "bose", ["0.5"]),
])
def test_degenerate_points_command(n, stats, expected, capsys):
    code, out, _ = run(["degenerate-points", "--n", str(n), "--stats", stats], capsys)
    assert code == 0
    assert out.split() == expected
    assert [float(x) for x in out.split()] == pytest.approx([float(x) for x in expected])


def test_truncation_env_override(tmp_path, capsys, monkeypatch):
    path = _write(tmp_path, _base())
    default = json.loads(run(["cycle", path], capsys)[1])
    monkeypatch.setenv("SZILARD_TRUNC_EPS", "1e-30")
    finer = json.loads(run(["cycle", path], capsys)[1])
    assert finer["q1"] == pytest.approx(default["q1"], rel=1e-12)


@pytest.mark.parametrize("raw", ["lots", "0", "1e-3", "-1e-20"])
def test_bad_truncation_env_exit_2(tmp_path, capsys, monkeypatch, raw):
    monkeypatch.setenv("SZILARD_TRUNC_EPS", raw)
    code, out, err = run(["cycle", _write(tmp_path, _base())], capsys)
    assert code == 2 and out == ""
    assert "SZILARD_TRUNC_EPS" in err


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "szilard.cli", "degenerate-points", "--n", "2", "--stats", "fermi"],
                          capture_output=True, text=True, check=True)
    assert [float(x) for x in proc.stdout.split()] == pytest.approx([1 / 3, 2 / 3])
