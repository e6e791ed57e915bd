import json
import subprocess
import sys

import pytest

from unpred.cli import main
from unpred.pipeline import example_path

MODEL = str(example_path("robot6"))
TASK = "F(p1 & F p2)"
CLOSED_LOOP_RUNS = {("1", "2", "4", "6"), ("1", "2", "4", "5", "6"), ("1", "2", "5", "6")}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def controller(tmp_path, capsys):
    out = tmp_path / "ctrl.json"
    code, _, _ = run(capsys, "synthesize", "--model", MODEL, "--formula", TASK, "--k", "3",
                     "--out", str(out))
    assert code == 0
    return out


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_validate(capsys, tmp_path):
    code, out, _ = run(capsys, "validate", "--model", MODEL)
    assert code == 0
    assert "6 states" in out
    bad = json.loads(example_path("robot6").read_text())
    bad["states"].append("7")
    code, out, _ = run(capsys, "validate", "--model", write(tmp_path, "bad.json", bad))
    assert code == 1
    assert "state 7 has no outgoing transition" in out


def test_compile(capsys, tmp_path):
    dot = tmp_path / "a.dot"
    code, out, _ = run(capsys, "compile", "--model", MODEL, "--formula", TASK, "--dot", str(dot))
    assert code == 0
    assert "product: 7 states, X_F=['x6'], X_F+s_F=['x6', 'x7']" in out
    assert "x6=(6,s3)" in out
    text = dot.read_text()
    assert text.startswith("digraph dfa {") and text.endswith("}\n")
    assert "doublecircle" in text and "dashed" in text


def test_synthesize(capsys, tmp_path):
    out = tmp_path / "c.json"
    code, text, _ = run(capsys, "synthesize", "--model", MODEL, "--formula", TASK, "--k", "3",
                        "--out", str(out), "--dot", "aes", "--dot", "det")
    assert code == 0
    assert "AES: 9 Y-states, 11 Z-states" in text
    for line in ["C(1) = c1", "C(1 2) = c1", "C(1 2 4) = c1", "C(1 2 5) = c2",
                 "C(1 2 4 5) = c2", "C(1 2 4 6) = c1"]:
        assert line in text
    raw = out.read_text()
    assert raw.endswith("\n")
    data = json.loads(raw)
    assert data["format"] == "unpred-controller" and data["k"] == 3
    assert raw == json.dumps(data, indent=2, sort_keys=True) + "\n"
    assert (tmp_path / "c.aes.dot").exists() and (tmp_path / "c.det.dot").exists()


def test_synthesize_no_solution(capsys, tmp_path):
    out = tmp_path / "c.json"
    code, text, _ = run(capsys, "synthesize", "--model", MODEL, "--formula", TASK, "--k", "1",
                        "--out", str(out))
    assert code == 2
    assert "no solution exists" in text
    assert not out.exists()


@pytest.mark.parametrize("argv", [
    ["synthesize", "--model", "/nonexistent/model.json", "--formula", TASK, "--k", "3"],
    ["synthesize", "--model", MODEL, "--formula", "F(p1 &", "--k", "3"],
    ["synthesize", "--model", MODEL, "--formula", "F p9", "--k", "3"],
    ["synthesize", "--model", MODEL, "--formula", TASK, "--k", "-1"],
    ["synthesize", "--model", MODEL, "--formula", TASK, "--k", "63"],
    ["synthesize", "--model", MODEL, "--formula", TASK],
    ["simulate", "--model", MODEL, "--formula", TASK, "--baseline", "x", "--seed", "-1"],
    ["frobnicate"],
])
def test_usage_errors(capsys, tmp_path, argv):
    if argv[0] == "synthesize":
        argv = argv + ["--out", str(tmp_path / "c.json")]
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1


def test_verify_controller(capsys, controller):
    code, out, _ = run(capsys, "verify", "--model", MODEL, "--formula", TASK, "--k", "3",
                       "--controller", str(controller))
    assert code == 0
    assert json.loads(out) == {"live": True, "task": True, "unpredictable": True, "witnesses": {}}


def test_verify_baseline(capsys, tmp_path):
    policy = write(tmp_path, "p.json", {"positional": {"1": "c1", "2": "c2", "3": "c1", "6": "c1"}})
    code, out, _ = run(capsys, "verify", "--model", MODEL, "--formula", TASK, "--k", "3",
                       "--baseline", policy)
    assert code == 3
    rep = json.loads(out)
    assert rep["live"] and rep["task"] and not rep["unpredictable"]
    assert rep["witnesses"]["prediction"] == ["1"]


def test_verify_malformed(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "verify", "--model", MODEL, "--formula", TASK, "--k", "3",
                       "--controller", str(bad))
    assert code == 1 and "not valid JSON" in err
    code, _, _ = run(capsys, "verify", "--model", MODEL, "--formula", TASK, "--k", "3",
                     "--controller", write(tmp_path, "x.json", {"format": "other"}))
    assert code == 1
    code, _, _ = run(capsys, "verify", "--model", MODEL, "--formula", TASK, "--k", "3")
    assert code == 1


def regions(text):
    return [line.split()[1] for line in text.splitlines()]


def test_simulate(capsys, controller):
    argv = ["simulate", "--model", MODEL, "--formula", TASK, "--controller", str(controller),
            "--steps", "8"]
    seen = set()
    for seed in range(12):
        code, out, _ = run(capsys, *argv, "--seed", str(seed))
        assert code == 0
        code2, out2, _ = run(capsys, *argv, "--seed", str(seed))
        assert out == out2
        lines = out.splitlines()
        assert len(lines) == 9
        done = [i for i, l in enumerate(lines) if "task completed" in l]
        assert len(done) == 1
        path = tuple(main_region(l) for l in lines[:done[0] + 1])
        assert path in CLOSED_LOOP_RUNS
        seen.add(path)
    assert len(seen) >= 2


def main_region(line):
    return line.split("region=")[1].split()[0]


def test_simulate_zero_steps(capsys, controller):
    code, out, _ = run(capsys, "simulate", "--model", MODEL, "--formula", TASK,
                       "--controller", str(controller), "--steps", "0")
    assert code == 0
    assert len(out.splitlines()) == 1
    assert "region=1" in out


def test_export(capsys, tmp_path):
    argv = ["export", "--model", MODEL, "--formula", TASK, "--k", "3"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(capsys, *argv, "--out", str(a))[0] == 0
    assert run(capsys, *argv, "--out", str(b))[0] == 0
    for target in ["dfa", "product", "aes", "det"]:
        assert (a / f"{target}.dot").read_bytes() == (b / f"{target}.dot").read_bytes()
    aes = (a / "aes.dot").read_text()
    assert aes.count("shape=circle") == 9
    assert aes.count("shape=box") == 11
    prod = (a / "product.dot").read_text()
    assert prod.count("peripheries=2") == 1
    assert prod.count("fillcolor") == 2


def test_export_empty_aes(capsys, tmp_path):
    chain = write(tmp_path, "chain.json", {
        "states": ["a", "b", "c"], "initial": "a", "inputs": ["u"],
        "transitions": [{"from": "a", "input": "u", "to": "b"},
                        {"from": "b", "input": "u", "to": "c"},
                        {"from": "c", "input": "u", "to": "c"}],
        "ap": ["p1"], "labels": {"c": ["p1"]}})
    code, out, _ = run(capsys, "export", "--model", chain, "--formula", "F p1", "--k", "2",
                       "--dot", "aes", "--dot", "det", "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / "aes.dot").read_text() == "digraph aes {\n  rankdir=LR;\n}\n"
    assert "skipping det" in out


def test_export_needs_k(capsys, tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["export", "--model", MODEL, "--formula", TASK, "--out", str(tmp_path)])
    assert info.value.code == 1
    code, _, _ = run(capsys, "export", "--model", MODEL, "--formula", TASK, "--dot", "product",
                     "--out", str(tmp_path))
    assert code == 0


def test_add_stop_flag(capsys):
    code, out, _ = run(capsys, "compile", "--model", MODEL, "--formula", TASK, "--add-stop", "6")
    assert code == 0
    assert "stop" in out


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "unpred.cli", "synthesize", "--model", MODEL,
                           "--formula", TASK, "--k", "1", "--out", str(tmp_path / "c.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert "no solution exists" in proc.stdout
