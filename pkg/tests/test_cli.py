"""The command-line surface, driven through run() for speed."""

import json

import pytest

from tdilp.cli import run

TWO_BLOCKS = (
    "max: z\n"
    "z <= 5\n"
    "z - a1 <= 0\n"
    "a1 <= 4\n"
    "z - a2 <= 0\n"
    "a2 <= 4\n"
)


@pytest.fixture
def two_blocks(tmp_path):
    f = tmp_path / "blocks.ilp"
    f.write_text(TWO_BLOCKS)
    return str(f)


@pytest.fixture
def triangle(tmp_path):
    f = tmp_path / "triangle.graph"
    f.write_text("3\n1 2\n2 3\n1 3\n")
    return str(f)


def test_analyze(two_blocks, capsys):
    assert run(["analyze", two_blocks]) == 0
    out = capsys.readouterr().out
    assert "variables: 3" in out
    assert "constraints: 5" in out
    assert "ell: 5" in out
    assert "treedepth: 2 (exact)" in out


def test_analyze_writes_witness(two_blocks, tmp_path, capsys):
    w = tmp_path / "witness.json"
    assert run(["analyze", two_blocks, "--witness-out", str(w)]) == 0
    doc = json.loads(w.read_text())
    assert doc["kind"] == "treedepth"


def test_solve_optimal(two_blocks, capsys):
    assert run(["solve", two_blocks]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["status"] == "optimal"
    assert doc["value"] == 4
    assert doc["assignment"]["z"] == 4
    assert doc["kernel_vars"] == 2
    assert doc["original_vars"] == 3


def test_solve_infeasible_exit_code(tmp_path, capsys):
    f = tmp_path / "bad.ilp"
    f.write_text("max: x\nx <= 0\n-x <= -1\n")
    assert run(["solve", str(f)]) == 1
    assert json.loads(capsys.readouterr().out)["status"] == "infeasible"


def test_solve_unbounded(tmp_path, capsys):
    f = tmp_path / "ray.ilp"
    f.write_text("max: x\n-x <= 0\n")
    assert run(["solve", str(f)]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "unbounded"


def test_solve_bound_exhausted_exit_code(tmp_path, capsys):
    f = tmp_path / "far.ilp"
    f.write_text("max: x\nx <= 40\n-x <= -30\n")
    assert run(["solve", str(f), "--bound", "7"]) == 3
    assert json.loads(capsys.readouterr().out)["status"] == "bound_exhausted"


def test_solve_with_explicit_witness(two_blocks, tmp_path, capsys):
    w = tmp_path / "w.json"
    assert run(["analyze", two_blocks, "--witness-out", str(w)]) == 0
    capsys.readouterr()
    assert run(["solve", two_blocks, "--td", str(w)]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == 4


def test_solve_rejects_treewidth_witness_for_td(two_blocks, tmp_path, capsys):
    # hand it a treewidth witness where a treedepth one is required
    f = tmp_path / "tw.json"
    f.write_text(json.dumps({"kind": "treewidth", "parent": [-1], "bags": [[0, 1, 2]]}))
    assert run(["solve", two_blocks, "--td", str(f)]) == 2


def test_kernelize_lift_roundtrip(two_blocks, tmp_path, capsys):
    kern = tmp_path / "kernel.ilp"
    trace = tmp_path / "trace.json"
    assert run(["kernelize", two_blocks, "-o", str(kern), "--trace", str(trace)]) == 0
    assert "kernel: 2 of 3 variables, 1 pruning steps" in capsys.readouterr().out

    sol = tmp_path / "sol.json"
    assert run(["solve", str(kern)]) == 0
    sol.write_text(capsys.readouterr().out)

    assert run(["lift", "--trace", str(trace), "--solution", str(sol)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["status"] == "optimal"
    assert doc["value"] == 4
    assert doc["assignment"] == {"a1": 4, "a2": 4, "z": 4}
    assert doc["kernel_vars"] == 2
    assert doc["original_vars"] == 3


def test_generate_vc_to_stdout(triangle, capsys):
    assert run(["generate", "vc", "--graph", triangle, "--k", "2"]) == 0
    text = capsys.readouterr().out
    assert text.startswith("max:")
    assert "v1" in text and "x1" in text


def test_generate_3col_with_witness_and_verify(triangle, tmp_path, capsys):
    ins = tmp_path / "threecol.ilp"
    w = tmp_path / "w.json"
    assert run(["generate", "3col", "--graph", triangle, "-o", str(ins), "--witness", str(w)]) == 0
    out = capsys.readouterr().out
    assert f"wrote {ins}" in out

    assert run(["verify", str(ins), "--witness", str(w)]) == 0
    msg = capsys.readouterr().out
    assert "treedepth witness: valid, height 8" in msg


def test_generate_subsetsum_with_witness_and_verify(tmp_path, capsys):
    ins = tmp_path / "ss.ilp"
    w = tmp_path / "w.json"
    assert (
        run(["generate", "subsetsum", "--values", "1,2,3", "--target", "6", "-o", str(ins), "--witness", str(w)])
        == 0
    )
    capsys.readouterr()
    assert run(["verify", str(ins), "--witness", str(w)]) == 0
    msg = capsys.readouterr().out
    assert "treewidth witness: valid, width 2" in msg

    assert run(["solve", str(ins), "--propagate"]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "optimal"


def test_generate_vc_witness_flag_rejected(triangle, tmp_path, capsys):
    w = tmp_path / "w.json"
    code = run(["generate", "vc", "--graph", triangle, "--k", "1", "-o", str(tmp_path / "o.ilp"), "--witness", str(w)])
    assert code == 2


def test_verify_rejects_corrupted_witness(two_blocks, tmp_path, capsys):
    w = tmp_path / "w.json"
    # z (id 2) is adjacent to both blocks; a forest that splits them is wrong
    w.write_text(json.dumps({"kind": "treedepth", "parent": [-1, -1, 0]}))
    assert run(["verify", two_blocks, "--witness", str(w)]) == 1
    assert "INVALID" in capsys.readouterr().out


def test_oracle_ilp(two_blocks, capsys):
    assert run(["oracle", "ilp", two_blocks, "--box", "6"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["value"] == 4


def test_oracle_verdict_commands(triangle, capsys):
    assert run(["oracle", "3col", "--graph", triangle]) == 0
    assert capsys.readouterr().out.strip() == "true"
    assert run(["oracle", "vc", "--graph", triangle, "--k", "1"]) == 1
    assert capsys.readouterr().out.strip() == "false"
    assert run(["oracle", "subsetsum", "--values", "2,4", "--target", "5"]) == 1
    assert capsys.readouterr().out.strip() == "false"
    assert run(["oracle", "td", "--graph", triangle]) == 0
    assert capsys.readouterr().out.strip() == "3"


def test_oracle_budget_exit_code(tmp_path, capsys):
    f = tmp_path / "wide.ilp"
    f.write_text("max: " + " + ".join(f"x{i}" for i in range(10)) + "\n" + "".join(f"x{i} <= 1\n" for i in range(10)))
    assert run(["oracle", "ilp", str(f), "--box", "50"]) == 3


def test_bounds_table(capsys):
    assert run(["bounds", "--ell", "1", "--k", "2"]) == 0
    out = capsys.readouterr().out
    assert "e_1 = 134217730" in out
    assert "i  d_i  e_i" in out


def test_bounds_astronomical(capsys):
    assert run(["bounds", "--ell", "1", "--k", "3"]) == 0
    assert "2^" in capsys.readouterr().out


def test_usage_errors(tmp_path, capsys):
    assert run([]) == 2
    assert run(["solve", str(tmp_path / "missing.ilp")]) == 2
    bad = tmp_path / "bad.ilp"
    bad.write_text("max: x\nx ?? 3\n")
    assert run(["solve", str(bad)]) == 2
    assert run(["bounds", "--ell", "1", "--k", "0"]) == 2


def test_threads_flag_accepted(two_blocks, capsys):
    assert run(["--threads", "4", "solve", two_blocks]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == 4


def test_determinism_byte_for_byte(two_blocks, triangle, capsys):
    runs = []
    for _ in range(2):
        assert run(["solve", two_blocks]) == 0
        runs.append(capsys.readouterr().out)
    assert runs[0] == runs[1]

    runs = []
    for _ in range(2):
        assert run(["generate", "3col", "--graph", triangle]) == 0
        runs.append(capsys.readouterr().out)
    assert runs[0] == runs[1]
