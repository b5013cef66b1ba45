"""End-to-end tests of the command line interface.

Every invocation goes through cli.main in-process; exit codes and exact
output bytes are part of the contract.
"""

import json

import pytest

from cayleygibbs.cli import main

STANDARD = '{"k": 2, "s": 1, "A1": [1], "A2": [2]}'
SPLIT = '{"k": 2, "s": 1, "A1": [1, 3], "A2": [2]}'


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_ball_lists_words(capsys):
    code, out = run(capsys, "ball", "--k", "2", "--radius", "2")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "e"
    assert len(lines) == 1 + 3 + 6
    assert "a1.a2" in lines


def test_label_reports_class_and_representative(capsys):
    code, out = run(capsys, "label", "--spec", STANDARD, "--word", "a1.a2.a3")
    assert code == 0
    doc = json.loads(out)
    assert doc == {"word": "a1.a2.a3", "class": 2, "representative": "a2"}


def test_bare_key_spec_shorthand(capsys):
    code, out = run(capsys, "label", "--spec", "{k:2,s:1,A1:[1],A2:[2]}", "--word", "e")
    assert code == 0
    assert json.loads(out)["class"] == 0


def test_classes_covers_ball(capsys):
    code, out = run(capsys, "classes", "--spec", STANDARD, "--radius", "3")
    assert code == 0
    doc = json.loads(out)
    assert len(doc) == 1 + 3 + 6 + 12
    assert set(doc.values()) == {0, 1, 2}
    assert doc["e"] == 0


def test_oracle_passes_for_valid_spec(capsys):
    code, out = run(capsys, "oracle", "--spec", STANDARD, "--radius", "4")
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_invariance_exit_codes(capsys):
    code, out = run(capsys, "invariance", "--spec", STANDARD, "--radius", "4")
    assert code == 0
    assert json.loads(out)["holds"] is True
    code, out = run(
        capsys, "invariance", "--spec", SPLIT, "--radius", "4", "--expect-holds"
    )
    assert code == 2
    doc = json.loads(out)
    assert doc["holds"] is False
    assert doc["violations"]


def test_qvec_root(capsys):
    code, out = run(capsys, "qvec", "--spec", STANDARD, "--word", "e")
    assert code == 0
    assert json.loads(out)["counts"] == [1, 1, 1]


def test_derive_solve_roundtrip(capsys, tmp_path):
    system_file = tmp_path / "system.json"
    code, _ = run(capsys, "derive", "--spec", STANDARD, "--out", str(system_file))
    assert code == 0
    doc = json.loads(system_file.read_text())
    assert len(doc["states"]) == 9
    assert doc["counts"]["0,1"] == {"0,0": 1, "2,0": 1}

    code, via_file = run(
        capsys, "solve", "--system", str(system_file), "--theta", "0.8",
        "--starts", "40",
    )
    assert code == 0
    code, via_spec = run(
        capsys, "solve", "--spec", STANDARD, "--theta", "0.8", "--starts", "40"
    )
    assert code == 0
    assert via_file == via_spec
    doc = json.loads(via_spec)
    assert len(doc["solutions"]) == 3
    assert all(s["kind"] == "translation-invariant" for s in doc["solutions"])
    assert list(doc["solutions"][0]["fields"]) == doc["states"]


def test_solve_output_deterministic(capsys):
    _, first = run(capsys, "solve", "--spec", STANDARD, "--theta", "0.7", "--starts", "30")
    _, second = run(capsys, "solve", "--spec", STANDARD, "--theta", "0.7", "--starts", "30")
    assert first == second


def test_sweep_csv(capsys):
    code, out = run(
        capsys, "sweep", "--spec", STANDARD, "--thetas", "0.3,0.8", "--starts", "30"
    )
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "theta,n_ti,n_wp_I1,n_wp_I2,agreement"
    assert lines[1] == "0.3,1,0,0,true"
    assert lines[2].startswith("0.8,3,")


def test_sweep_range_grid(capsys):
    code, out = run(
        capsys, "sweep", "--spec", STANDARD, "--range", "0.3:0.5:0.1", "--starts", "10"
    )
    assert code == 0
    rows = out.strip().split("\n")[1:]
    assert [r.split(",")[0] for r in rows] == ["0.3", "0.4", "0.5"]


def test_poly_branch(capsys):
    code, out = run(capsys, "poly", "--theta", "0.8")
    assert code == 0
    doc = json.loads(out)
    assert doc["boundary_degenerate"] is False
    assert doc["roots"][0] == pytest.approx(7.872983346207417, abs=1e-12)
    assert doc["roots"][0] * doc["roots"][1] == pytest.approx(1.0, abs=1e-12)
    assert len(doc["solutions"]) == 3

    code, out = run(capsys, "poly", "--theta", "0.5")
    assert code == 0
    doc = json.loads(out)
    assert doc["boundary_degenerate"] is True
    assert doc["roots"] == []


def test_compat_exit_codes(capsys, tmp_path):
    _, out = run(capsys, "poly", "--theta", "0.8")
    fields = json.loads(out)["solutions"][-1]["fields"]
    good = tmp_path / "fields.json"
    good.write_text(json.dumps(fields))
    code, out = run(
        capsys, "compat", "--spec", STANDARD, "--theta", "0.8", "--fields", str(good)
    )
    assert code == 0
    assert json.loads(out)["passed"] is True

    fields["1,1"] += 0.05
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(fields))
    code, out = run(
        capsys, "compat", "--spec", STANDARD, "--theta", "0.8", "--fields", str(bad)
    )
    assert code == 2
    assert json.loads(out)["passed"] is False


def test_compat_accepts_dense_list(capsys, tmp_path):
    dense = tmp_path / "dense.json"
    dense.write_text(json.dumps([0.0] * 9))
    code, out = run(
        capsys, "compat", "--spec", STANDARD, "--theta", "0.6", "--fields", str(dense)
    )
    assert code == 0


def test_draw_dot_output(capsys):
    code, out = run(capsys, "draw", "--spec", STANDARD, "--radius", "2")
    assert code == 0
    assert out.startswith("graph cayley_ball {")
    assert out.rstrip().endswith("}")
    assert '"e" [style=filled, fillcolor="#1f77b4"' in out
    assert 'fillcolor="#d62728"' in out  # class 1
    assert 'fillcolor="#000000"' in out  # class 2
    assert out.count(" -- ") == 9  # tree edges in the radius-2 ball


def test_draw_without_spec_is_uncolored(capsys):
    code, out = run(capsys, "draw", "--k", "2", "--radius", "1")
    assert code == 0
    assert "fillcolor" not in out
    assert out.count(" -- ") == 3


def test_out_file_matches_stdout(capsys, tmp_path):
    _, stdout_text = run(capsys, "ball", "--k", "2", "--radius", "2")
    path = tmp_path / "ball.txt"
    code, empty = run(capsys, "ball", "--k", "2", "--radius", "2", "--out", str(path))
    assert code == 0 and empty == ""
    assert path.read_text() == stdout_text


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--theta", "0.8"])  # neither --spec nor --system
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--spec", STANDARD])  # no theta grid
    assert exc.value.code == 1


def test_bad_spec_reports_error(capsys):
    code = main(["label", "--spec", '{"k": 2}', "--word", "e"])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_bad_theta_reports_error(capsys):
    code = main(["solve", "--spec", STANDARD, "--theta", "1.5"])
    assert code == 1
