import io
import json
import subprocess
import sys

import pytest

from mallnets.cli import FAILED, OK, USAGE, main

from conftest import DATA, read


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


def test_bipolarize():
    code, text = run("bipolarize", DATA / "example.mall")
    assert code == OK
    assert text.splitlines() == [
        "n0 := n0^ * ((a & b) | n1 | n2 | (d & e))",
        "n1 := n1^ * ((a^ + b^) * c^)",
        "n2 := n2^ * (c * (d^ + e^))",
    ]


def test_bipolarize_schemes():
    code, text = run("bipolarize", DATA / "example.mall", "--schemes")
    assert code == OK
    schemes = [l.strip() for l in text.splitlines() if l.startswith("  ")]
    assert len(schemes) == 5
    assert "n2#2: n2, e <= c" in schemes
    assert "n1#1: n1, a, c <= -" in schemes


def test_bipolarize_json_lines():
    code, text = run("bipolarize", DATA / "example.mall", "--schemes", "--format", "json-lines")
    rows = [json.loads(l) for l in text.splitlines()]
    assert code == OK and [r["head"] for r in rows] == ["n0", "n1", "n2"]
    assert [len(r["schemes"]) for r in rows] == [1, 2, 2]


def test_bipolarize_output_is_a_program(tmp_path):
    _, text = run("bipolarize", DATA / "example.mall")
    (tmp_path / "p.bpl").write_text(text)
    code, _ = run("check-proof", DATA / "example.bsp", "--program", tmp_path / "p.bpl")
    assert code == OK


def test_check_proof():
    code, text = run("check-proof", DATA / "example.bsp", "--program", DATA / "example.bpl")
    assert code == OK and text == "ok n0 nodes=9\n"


def test_check_proof_failure(tmp_path):
    bad = tmp_path / "bad.bsp"
    bad.write_text("n1#2 ⊢ a, c, n1\n")
    code, text = run("check-proof", bad, "--program", DATA / "example.bpl")
    assert code == FAILED and text.startswith("error ")


def test_check_proof_needs_program():
    assert run("check-proof", DATA / "example.bsp")[0] == USAGE


def test_check_net_rejects_tangle():
    code, text = run("check-net", DATA / "tangle.net")
    lines = text.splitlines()
    assert code == FAILED
    assert lines[0].startswith("loop k@2c8591+1[b>b] ")
    assert lines[1].startswith("slice ")


@pytest.mark.parametrize("name", ["tangle-base.net", "empty.net"])
def test_check_net_accepts(name):
    code, text = run("check-net", DATA / name)
    assert code == OK and text.startswith("ok proof net")


def test_check_net_structure_violation(tmp_path):
    bad = tmp_path / "bad.net"
    bad.write_text("place a x\nlink l + top=a bottom=\nlink m + top=a bottom=\nconclusion\n")
    code, text = run("check-net", bad)
    assert code == FAILED
    assert text.splitlines()[0] == "violation [link] positive link without bottom place (l)"


def test_deseq_seq_round_trip(tmp_path):
    code, net = run("deseq", DATA / "example.bsp", "--program", DATA / "example.bpl")
    assert code == OK
    (tmp_path / "e.net").write_text(net)
    code, proof = run("seq", tmp_path / "e.net", "--program", DATA / "example.bpl")
    assert code == OK
    assert proof.splitlines() == [l for l in read("example.bsp").splitlines()
                                  if l.strip() and not l.lstrip().startswith("#")]


def test_seq_of_incorrect_net():
    assert run("seq", DATA / "tangle.net")[0] == FAILED


def test_simulate_text():
    code, text = run("simulate", "--program", DATA / "example.bpl", "--goal", "n0")
    assert code == OK
    lines = text.splitlines()
    assert len(lines) == 9 and sum("action=commit" in l for l in lines) == 3
    assert lines[0].startswith("step=0 agent=n0 action=begin locks=[g0] version=")


def test_simulate_is_deterministic():
    args = ("simulate", "--program", DATA / "example.bpl", "--goal", "n0,n0",
            "--policy", "random", "--seed", "5", "--format", "json-lines")
    first, second = run(*args), run(*args)
    assert first == second
    assert all(json.loads(l)["agent"] in {"n0", "n1", "n2"} for l in first[1].splitlines())


def test_simulate_needs_goal():
    assert run("simulate", "--program", DATA / "example.bpl")[0] == USAGE


def test_export_dot_highlights_loop():
    code, text = run("export-dot", DATA / "tangle.net")
    assert code == OK and text.startswith('digraph "net" {')
    assert "fillcolor" in text


def test_deseq_dot_and_json():
    _, dot = run("deseq", DATA / "example.bsp", "--program", DATA / "example.bpl",
                 "--format", "dot")
    assert dot.startswith("digraph")
    _, rows = run("deseq", DATA / "example.bsp", "--program", DATA / "example.bpl",
                  "--format", "json-lines")
    kinds = {json.loads(l)["kind"] for l in rows.splitlines()}
    assert {"place", "link", "hyper", "conclusion"} <= kinds


@pytest.mark.parametrize("argv", [
    [], ["frobnicate"], ["check-net"], ["check-net", "/no/such/file"],
    ["simulate", "--program", "/no/such/file", "--goal", "n0"],
])
def test_usage_errors(argv):
    assert run(*argv)[0] == USAGE


def test_parse_error_is_usage(tmp_path):
    bad = tmp_path / "bad.mall"
    bad.write_text("a | (b\n")
    assert run("bipolarize", bad)[0] == USAGE


def test_help_exits_zero():
    assert run("--help")[0] == OK


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "mallnets", "check-net", str(DATA / "tangle.net")],
                          capture_output=True, text=True)
    assert done.returncode == FAILED and done.stdout.startswith("loop ")
