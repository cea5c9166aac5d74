import json
import subprocess
import sys

import pytest

from glava.cli import main, read_hash_table
from glava.errors import ParseError
from glava.samples import (
    NONSQUARE_COLS,
    NONSQUARE_ROWS,
    PAIR_FIRST,
    PAIR_SECOND,
    SAMPLE_EDGES,
    SINGLE_SKETCH,
)
from glava.sketch import GLavaSummary


def write_table(path, row, col=None):
    lines = [f"%range {row.w}" + (f" {col.w}" if col else "")]
    for label in sorted(row.table):
        lines.append(f"{label} {row(label)}" + (f" {col(label)}" if col else ""))
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture
def files(tmp_path):
    stream = tmp_path / "fig1.txt"
    stream.write_text("# sample graph\n" + "".join(f"{x} {y}\n" for x, y in SAMPLE_EDGES))
    return {
        "dir": tmp_path,
        "stream": str(stream),
        "single": write_table(tmp_path / "single.map", SINGLE_SKETCH),
        "s1": write_table(tmp_path / "s1.map", PAIR_FIRST),
        "s2": write_table(tmp_path / "s2.map", PAIR_SECOND),
        "ns": write_table(tmp_path / "ns.map", NONSQUARE_ROWS, NONSQUARE_COLS),
    }


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def build(capsys, files, name, *tables, extra=()):
    out = files["dir"] / f"{name}.json"
    args = ["build", "--input", files["stream"], "--output", out]
    for t in tables:
        args += ["--hash-table", files[t]]
    code, _, err = run(capsys, *args, *extra)
    assert code == 0, err
    return out


def test_read_hash_table(files, tmp_path):
    assert read_hash_table(files["single"]) == SINGLE_SKETCH
    assert read_hash_table(files["ns"]) == (NONSQUARE_ROWS, NONSQUARE_COLS)
    bad = tmp_path / "bad.map"
    bad.write_text("a 1\nb two\n")
    with pytest.raises(ParseError):
        read_hash_table(str(bad))


def test_build_reproduces_single_sketch(capsys, files):
    path = build(capsys, files, "single", "single", extra=["--d", 1, "--cell-budget", 16])
    cells = GLavaSummary.load(path).sketches[0].cells.tolist()
    assert cells == [[0, 3, 1, 1], [2, 1, 1, 1], [1, 2, 0, 0], [0, 0, 1, 0]]


def test_build_nonsquare(capsys, files):
    path = build(capsys, files, "ns", "ns")
    assert GLavaSummary.load(path).sketches[0].cells.tolist() == [
        [2, 0], [3, 1], [0, 2], [0, 1], [2, 1], [1, 0], [1, 0]
    ]


def test_build_from_bounds(capsys, files):
    out = files["dir"] / "lemma.json"
    code, text, _ = run(capsys, "build", "--input", files["stream"], "--output", out,
                        "--epsilon", 0.05, "--delta", 0.05, "--format", "records")
    assert code == 0
    info = json.loads(text)
    assert info["d"] == 3 and info["shapes"] == ["55x55"] * 3 and info["elements"] == 14


def test_build_errors(capsys, files, tmp_path):
    missing = tmp_path / "nope.txt"
    code, _, err = run(capsys, "build", "--input", missing, "--output", tmp_path / "x.json",
                       "--cell-budget", 16)
    assert code == 2 and "nope.txt" in err
    code, _, _ = run(capsys, "build", "--input", files["stream"], "--output", tmp_path / "x.json")
    assert code == 1
    code, _, _ = run(capsys, "build", "--input", files["stream"], "--output", tmp_path / "x.json",
                     "--cell-budget", 10)
    assert code == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("a b\nc d -1\n")
    code, _, err = run(capsys, "build", "--input", bad, "--output", tmp_path / "x.json",
                       "--cell-budget", 16)
    assert code == 2 and "line 2" in err


def test_build_respects_seed_env(capsys, files, monkeypatch):
    out = files["dir"] / "env.json"
    monkeypatch.setenv("GLAVA_SEED", "42")
    run(capsys, "build", "--input", files["stream"], "--output", out, "--cell-budget", 16)
    assert GLavaSummary.load(out).seed == 42
    monkeypatch.setenv("GLAVA_SEED", "x")
    code, _, _ = run(capsys, "build", "--input", files["stream"], "--output", out, "--cell-budget", 16)
    assert code == 1


def test_query_commands(capsys, files):
    pair = build(capsys, files, "pair", "s1", "s2", extra=["--companions"])
    code, out, _ = run(capsys, "query", "--summary", pair, "edge", "g", "b")
    assert code == 0 and json.loads(out)["value"] == 1
    _, out, _ = run(capsys, "query", "--summary", pair, "reach", "a", "a")
    assert json.loads(out)["value"] is True
    _, out, _ = run(capsys, "query", "--summary", pair, "flow", "b", "--dir", "in")
    assert json.loads(out)["value"] == 5
    _, out, _ = run(capsys, "query", "--summary", pair, "degree", "b")
    assert json.loads(out)["value"] >= 4
    pattern = files["dir"] / "q.txt"
    pattern.write_text("a b\na c\n")
    _, out, _ = run(capsys, "query", "--summary", pair, "subgraph", "--pattern", pattern)
    assert json.loads(out)["value"] == 4
    _, out, _ = run(capsys, "query", "--summary", pair, "--format", "table", "subgraph",
                    "--pattern", pattern, "--fast")
    assert out.startswith("subgraph: 4")


def test_query_errors(capsys, files):
    single = build(capsys, files, "single", "single")
    pattern = files["dir"] / "bound.txt"
    pattern.write_text("*1 b\nb *1\n")
    code, _, err = run(capsys, "query", "--summary", single, "subgraph", "--pattern", pattern, "--fast")
    assert code == 1 and "bound" in err
    code, _, err = run(capsys, "query", "--summary", single, "degree", "b")
    assert code == 1
    corrupt = files["dir"] / "corrupt.json"
    corrupt.write_text(single.read_text()[:40])
    code, _, _ = run(capsys, "query", "--summary", corrupt, "edge", "a", "b")
    assert code == 2
    code, _, _ = run(capsys, "query", "--summary", single, "edge", "a")
    assert code == 1


def monitor(capsys, monkeypatch, text, *args):
    import io

    monkeypatch.setattr(sys, "stdin", io.StringIO(text))
    code, out, err = run(capsys, "monitor", "--node", "b", "--cell-budget", 1024, "--d", 2, *args)
    alarms = [json.loads(line)["alarm"] for line in out.splitlines()]
    return code, alarms, err


def test_monitor_alarms(capsys, monkeypatch):
    code, alarms, _ = monitor(capsys, monkeypatch, "x b\ny b\nz b\n", "--threshold", 2)
    assert code == 0
    assert [a["ordinal"] for a in alarms] == [3]
    assert alarms[0]["estimate"] == 2 and alarms[0]["element"]["src"] == "z"


def test_monitor_negative_threshold(capsys, monkeypatch):
    _, alarms, _ = monitor(capsys, monkeypatch, "x c\nx b\n", "--threshold", -1)
    assert [a["ordinal"] for a in alarms] == [2]


def test_monitor_skips_malformed_lines(capsys, monkeypatch, tmp_path, caplog):
    save = tmp_path / "m.json"
    code, alarms, _ = monitor(capsys, monkeypatch, "x b\nnot a valid line\ny b\nz b\n",
                              "--threshold", 2, "--save", save)
    assert code == 0
    assert any("line 2" in r.getMessage() and r.levelname == "WARNING" for r in caplog.records)
    assert [a["ordinal"] for a in alarms] == [3]
    assert GLavaSummary.load(save).elements == 3


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", "--trials", 2, "--queries", 30, "--nodes", 50,
                       "--elements", 500, "--injective", "--format", "records")
    assert code == 0
    summary = json.loads(out.splitlines()[-1])["summary"]
    assert summary["violation_rate"] == 0 and summary["passed"]
    code, _, _ = run(capsys, "validate", "--trials", 0)
    assert code == 1
    code, _, _ = run(capsys, "validate", "--trials", 1, "--set", "bogus=1")
    assert code == 1


def test_bench(capsys):
    code, out, _ = run(capsys, "bench", "--elements", 2000, "--nodes", 100, "--repeats", 1,
                       "--queries", 20, "--format", "records")
    assert code == 0
    result = json.loads(out)
    assert result["touches_per_update"] == 3
    assert set(result["schedules"]) == {"square", "mixed"}
    code, _, _ = run(capsys, "bench", "--schedules", "")
    assert code == 1


def test_module_entry_point(files, tmp_path):
    out = tmp_path / "s.json"
    proc = subprocess.run(
        [sys.executable, "-m", "glava", "build", "--input", files["stream"], "--output", str(out),
         "--hash-table", files["single"]],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run(
        [sys.executable, "-m", "glava", "query", "--summary", str(out), "edge", "g", "b"],
        capture_output=True, text=True,
    )
    assert json.loads(proc.stdout)["value"] == 2
